#pragma once

#include "swarmkld/core.hpp"
#include "swarmkld/rng.hpp"

#include <memory>
#include <numbers>
#include <vector>

namespace swarmkld {

/// Wraps an angle into (-pi, pi].
double wrap_angle(double theta) noexcept;

/// Gaussian density N(x; 0, sigma^2).
double gaussian_pdf(double x, double sigma) noexcept;

/// State-space model: transition sampler, observation model and the initial
/// cloud used by the filters. Implementations are read-only after
/// construction and safe to share across threads.
class StateSpaceModel {
 public:
  virtual ~StateSpaceModel() = default;

  [[nodiscard]] virtual std::size_t state_dim() const noexcept = 0;
  [[nodiscard]] virtual std::size_t obs_dim() const noexcept = 0;

  /// Noise-free part of the transition.
  [[nodiscard]] virtual StateVector propagate_mean(const StateVector& x) const = 0;
  [[nodiscard]] virtual StateVector transition_sample(const StateVector& x, Rng& rng) const = 0;

  /// Noise-free measurement h(x).
  [[nodiscard]] virtual Observation measure(const StateVector& x) const = 0;
  [[nodiscard]] virtual Observation observe(const StateVector& x, Rng& rng) const = 0;
  [[nodiscard]] virtual double likelihood(const StateVector& x, const Observation& z) const = 0;

  /// Ground-truth x0.
  [[nodiscard]] virtual StateVector initial_state(Rng& rng) const = 0;
  /// One particle of the filter's initial cloud given the first observation.
  [[nodiscard]] virtual StateVector initial_sample(const Observation& z0, Rng& rng) const = 0;

  /// Dimensions treated as "position" for RMSE, NEES and KLD binning.
  [[nodiscard]] virtual std::vector<std::size_t> position_dims() const = 0;
};

/// x_n = x_{n-1} + N(0, sigma1^2),  z_n = x_n + N(0, sigma2^2).
class LinearGauss1D final : public StateSpaceModel {
 public:
  struct Params {
    double sigma1 = 0.5;
    double sigma2 = 1.0;
    double x0_mean = 0.0;
    double x0_std = 1.0;
    // Initial cloud is N(z0, (init_spread * sigma2)^2).
    double init_spread = 1.0;
  };

  explicit LinearGauss1D(Params p);

  [[nodiscard]] const Params& params() const noexcept { return p_; }

  std::size_t state_dim() const noexcept override { return 1; }
  std::size_t obs_dim() const noexcept override { return 1; }
  StateVector propagate_mean(const StateVector& x) const override;
  StateVector transition_sample(const StateVector& x, Rng& rng) const override;
  Observation measure(const StateVector& x) const override;
  Observation observe(const StateVector& x, Rng& rng) const override;
  double likelihood(const StateVector& x, const Observation& z) const override;
  StateVector initial_state(Rng& rng) const override;
  StateVector initial_sample(const Observation& z0, Rng& rng) const override;
  std::vector<std::size_t> position_dims() const override { return {0}; }

 private:
  Params p_;
};

/// Constant-velocity target, state [px, vx, py, vy], observed in range and
/// bearing by a sensor at the origin. Process noise is the discrete
/// white-noise-acceleration model per axis.
class ConstantVelocity2D final : public StateSpaceModel {
 public:
  struct Params {
    double dt = 1.0;
    double sigma_a = 0.1;
    double sigma_r = 1.0;
    double bearing_std_deg = 1.0;
    StateVector x0{0.0, 1.0, 0.0, 1.0};
    // Initial cloud: x0 plus N(0, init_pos_std^2) per position axis and
    // N(0, init_velocity_std^2) per velocity axis.
    double init_pos_std = 0.1;
    double init_velocity_std = 0.1;
  };

  explicit ConstantVelocity2D(Params p);

  [[nodiscard]] const Params& params() const noexcept { return p_; }
  [[nodiscard]] double bearing_std_rad() const noexcept { return sigma_theta_; }

  std::size_t state_dim() const noexcept override { return 4; }
  std::size_t obs_dim() const noexcept override { return 2; }
  StateVector propagate_mean(const StateVector& x) const override;
  StateVector transition_sample(const StateVector& x, Rng& rng) const override;
  Observation measure(const StateVector& x) const override;
  Observation observe(const StateVector& x, Rng& rng) const override;
  double likelihood(const StateVector& x, const Observation& z) const override;
  StateVector initial_state(Rng& rng) const override;
  StateVector initial_sample(const Observation& z0, Rng& rng) const override;
  std::vector<std::size_t> position_dims() const override { return {0, 2}; }

 private:
  Params p_;
  double sigma_theta_;
};

struct Trajectory {
  std::vector<StateVector> states;
  std::vector<Observation> observations;
};

/// Ground truth and observations for `steps` time steps, starting at x0.
/// Truth and sensor noise come from two streams split off `rng`.
Trajectory simulate_trajectory(const StateSpaceModel& model, std::size_t steps, Rng& rng);

}  // namespace swarmkld
