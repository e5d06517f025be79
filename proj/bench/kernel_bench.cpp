// Serial vs OpenMP timings of the per-particle kernels.
//
//   kernel_bench [particles] [repeats]

#include "swarmkld/bench.hpp"
#include "swarmkld/cso.hpp"
#include "swarmkld/filter.hpp"
#include "swarmkld/models.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

using namespace swarmkld;

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
  fn();  // warm-up
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

void report(const char* name, const std::function<void(Exec)>& fn, int repeats) {
  const double serial = time_ms([&] { fn(Exec::serial); }, repeats);
  const double parallel = time_ms([&] { fn(Exec::parallel); }, repeats);
  std::printf("%-22s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::stoul(argv[1]) : 20000;
  const int repeats = argc > 2 ? std::stoi(argv[2]) : 20;
  std::printf("particles=%zu repeats=%d threads=%d\n", n, repeats, max_threads());

  const ConstantVelocity2D model({});
  Rng rng(42);
  const StateVector truth = model.initial_state(rng);
  const Observation z = model.observe(truth, rng);
  std::vector<StateVector> states(n);
  for (auto& s : states) s = model.initial_sample(z, rng);
  const ParticleSet set = ParticleSet::uniform(states);
  const ParticleSet weighted = reweight(set, z, model, Exec::serial);
  const CsoConfig cso;
  Rng role_rng(7);
  const RoleAssignment roles = assign_roles(weighted.weights(), cso, role_rng);

  report("predict", [&](Exec e) { Rng r(1); (void)predict(set, model, r, e); }, repeats);
  report("likelihoods", [&](Exec e) { (void)evaluate_likelihoods(set.states(), z, model, e); }, repeats);
  report("cso_moves", [&](Exec e) { (void)cso_moves(weighted, roles, cso, Rng(3), e); }, repeats);
  report("cso_rejuvenate", [&](Exec e) { Rng r(5); (void)cso_rejuvenate(weighted, z, model, cso, r, e); },
         repeats);

  ExperimentConfig config = default_sweepcv_config();
  config.steps = 20;
  report("cv trial (CPF)", [&](Exec e) { (void)run_trial(config, Algorithm::cpf, 11, {}, e); },
         std::max(1, repeats / 10));
  return 0;
}
