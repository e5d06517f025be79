#include "swarmkld/models.hpp"

#include <stdexcept>

namespace swarmkld {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
  }
}

void require_dim(const StateVector& x, std::size_t dim) {
  if (x.size() != dim) throw std::invalid_argument("state dimension mismatch");
}

}  // namespace

double wrap_angle(double theta) noexcept {
  double r = std::remainder(theta, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

double gaussian_pdf(double x, double sigma) noexcept {
  const double u = x / sigma;
  return std::exp(-0.5 * u * u) / (sigma * std::sqrt(kTwoPi));
}

LinearGauss1D::LinearGauss1D(Params p) : p_(p) {
  require_positive(p_.sigma1, "sigma1");
  require_positive(p_.sigma2, "sigma2");
  require_positive(p_.x0_std, "x0_std");
  require_positive(p_.init_spread, "init_spread");
}

StateVector LinearGauss1D::propagate_mean(const StateVector& x) const {
  require_dim(x, 1);
  return x;
}

StateVector LinearGauss1D::transition_sample(const StateVector& x, Rng& rng) const {
  require_dim(x, 1);
  return StateVector{x[0] + p_.sigma1 * rng.normal()};
}

Observation LinearGauss1D::measure(const StateVector& x) const { return Observation{x[0]}; }

Observation LinearGauss1D::observe(const StateVector& x, Rng& rng) const {
  return Observation{x[0] + p_.sigma2 * rng.normal()};
}

double LinearGauss1D::likelihood(const StateVector& x, const Observation& z) const {
  return gaussian_pdf(z[0] - x[0], p_.sigma2);
}

StateVector LinearGauss1D::initial_state(Rng& rng) const {
  return StateVector{p_.x0_mean + p_.x0_std * rng.normal()};
}

StateVector LinearGauss1D::initial_sample(const Observation& z0, Rng& rng) const {
  return StateVector{z0[0] + p_.init_spread * p_.sigma2 * rng.normal()};
}

ConstantVelocity2D::ConstantVelocity2D(Params p)
    : p_(p), sigma_theta_(p.bearing_std_deg * std::numbers::pi / 180.0) {
  require_positive(p_.dt, "dt");
  require_positive(p_.sigma_a, "sigma_a");
  require_positive(p_.sigma_r, "sigma_r");
  require_positive(p_.bearing_std_deg, "bearing_std_deg");
  require_positive(p_.init_pos_std, "init_pos_std");
  require_positive(p_.init_velocity_std, "init_velocity_std");
  require_dim(p_.x0, 4);
}

StateVector ConstantVelocity2D::propagate_mean(const StateVector& x) const {
  require_dim(x, 4);
  return StateVector{x[0] + p_.dt * x[1], x[1], x[2] + p_.dt * x[3], x[3]};
}

StateVector ConstantVelocity2D::transition_sample(const StateVector& x, Rng& rng) const {
  StateVector out = propagate_mean(x);
  const double half_dt2 = 0.5 * p_.dt * p_.dt;
  const double ax = p_.sigma_a * rng.normal();
  const double ay = p_.sigma_a * rng.normal();
  out[0] += half_dt2 * ax;
  out[1] += p_.dt * ax;
  out[2] += half_dt2 * ay;
  out[3] += p_.dt * ay;
  return out;
}

Observation ConstantVelocity2D::measure(const StateVector& x) const {
  return Observation{std::hypot(x[0], x[2]), std::atan2(x[2], x[0])};
}

Observation ConstantVelocity2D::observe(const StateVector& x, Rng& rng) const {
  const Observation h = measure(x);
  const double r = h[0] + p_.sigma_r * rng.normal();
  const double theta = wrap_angle(h[1] + sigma_theta_ * rng.normal());
  // A negative range draw is folded onto the opposite bearing.
  if (r < 0.0) return Observation{-r, wrap_angle(theta + std::numbers::pi)};
  return Observation{r, theta};
}

double ConstantVelocity2D::likelihood(const StateVector& x, const Observation& z) const {
  const Observation h = measure(x);
  const double direct = gaussian_pdf(z[0] - h[0], p_.sigma_r) * gaussian_pdf(wrap_angle(z[1] - h[1]), sigma_theta_);
  // observe() folds a negative range draw onto the opposite bearing; that
  // branch has density at (-r, theta + pi). Negligible unless close in.
  const double folded = gaussian_pdf(-z[0] - h[0], p_.sigma_r) *
                        gaussian_pdf(wrap_angle(z[1] + std::numbers::pi - h[1]), sigma_theta_);
  return direct + folded;
}

StateVector ConstantVelocity2D::initial_state(Rng& /*rng*/) const { return p_.x0; }

StateVector ConstantVelocity2D::initial_sample(const Observation& z0, Rng& rng) const {
  // The target starts next to the sensor, where the first fix pins
  // nothing down; the cloud is drawn around the known start instead.
  (void)z0;
  StateVector x = p_.x0;
  x[0] += p_.init_pos_std * rng.normal();
  x[1] += p_.init_velocity_std * rng.normal();
  x[2] += p_.init_pos_std * rng.normal();
  x[3] += p_.init_velocity_std * rng.normal();
  return x;
}

Trajectory simulate_trajectory(const StateSpaceModel& model, std::size_t steps, Rng& rng) {
  if (steps == 0) throw std::invalid_argument("simulate_trajectory: steps must be >= 1");
  Rng truth = rng.split();
  Rng sensor = rng.split();
  Trajectory t;
  t.states.reserve(steps);
  t.observations.reserve(steps);
  StateVector x = model.initial_state(truth);
  for (std::size_t k = 0; k < steps; ++k) {
    if (k > 0) x = model.transition_sample(x, truth);
    t.states.push_back(x);
    t.observations.push_back(model.observe(x, sensor));
  }
  return t;
}

}  // namespace swarmkld
