#include "swarmkld/theory.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <sstream>

namespace swarmkld::theory {
namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

template <class Fn>
CheckResult timed(std::string name, Fn&& fn) {
  const auto t0 = Clock::now();
  CheckResult r = fn();
  r.name = std::move(name);
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

std::vector<double> random_masses(std::size_t m, Rng& rng) {
  std::vector<double> v(m);
  for (double& x : v) x = rng.uniform() < 0.15 ? 0.0 : -std::log1p(-rng.uniform());
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[0] = 1.0;
  return v;
}

CheckResult karamata_sweep(std::size_t pairs, Rng& rng) {
  std::size_t violations = 0;
  std::size_t not_majorized = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < pairs; ++t) {
    const auto m = 2 + static_cast<std::size_t>(rng.uniform() * 9.0);   // 2..10
    const auto n = 2 + static_cast<std::size_t>(rng.uniform() * 49.0);  // 2..50
    const auto transfers = 1 + static_cast<std::size_t>(rng.uniform() * 3.0 * static_cast<double>(m));
    const auto [p, q] = robin_hood_pair(m, transfers, rng);
    if (!majorizes(p.values(), q.values())) {
      ++not_majorized;
      continue;
    }
    const auto rep = karamata_check(p, q, n);
    min_slack = std::min(min_slack, rep.slack);
    if (!rep.holds) ++violations;
  }
  return {"", violations == 0 && not_majorized == 0,
          fmt("pairs=%zu violations=%zu generator_failures=%zu min_slack=%.3e", pairs, violations,
              not_majorized, min_slack)};
}

CheckResult oracle_equivalence(std::size_t instances, Rng& rng) {
  double worst = 0.0;
  std::size_t largest = 0;
  for (std::size_t t = 0; t < instances; ++t) {
    const auto m = 1 + static_cast<std::size_t>(rng.uniform() * 8.0);  // 1..8
    std::size_t n_cap = 20;
    if (m >= 2) {
      n_cap = std::min<std::size_t>(
          n_cap, static_cast<std::size_t>(std::floor(std::log(kBruteForceLimit) / std::log(static_cast<double>(m)))));
    }
    const auto n = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n_cap));
    const auto p = BinProbabilityVector::normalized(random_masses(m, rng));
    const double exact = expected_occupied_exact(p, n);
    const double brute = brute_force_occupied(p, n);
    worst = std::max(worst, std::abs(exact - brute));
    largest = std::max(largest, static_cast<std::size_t>(std::pow(m, n)));
  }
  return {"", worst <= 1e-12,
          fmt("instances=%zu max_abs_diff=%.3e largest_outcome_space=%zu", instances, worst, largest)};
}

CheckResult concavity(std::size_t grid) {
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t n : {2u, 5u, 20u}) {
    std::vector<double> g(grid);
    for (std::size_t i = 0; i < grid; ++i) {
      g[i] = empty_prob(static_cast<double>(i) / static_cast<double>(grid - 1), n);
    }
    // f = 1 - g, so differences of f are negated differences of g; working
    // on g keeps them representable where f rounds to 1.
    std::size_t bad_first = 0;
    std::size_t bad_second = 0;
    for (std::size_t i = 0; i + 1 < grid; ++i) {
      if (!(g[i] - g[i + 1] > 0.0)) ++bad_first;
    }
    for (std::size_t i = 0; i + 2 < grid; ++i) {
      if (-(g[i + 2] - 2.0 * g[i + 1] + g[i]) > 0.0) ++bad_second;
    }
    ok = ok && bad_first == 0 && bad_second == 0;
    detail << "N=" << n << ": nonpositive_first=" << bad_first << " positive_second=" << bad_second << "; ";
  }
  const bool endpoints = occupancy_prob(0.0, 5) == 0.0 && occupancy_prob(1.0, 5) == 1.0;
  detail << "endpoints=" << (endpoints ? "ok" : "bad");
  return {"", ok && endpoints, detail.str()};
}

CheckResult monotone_in_n(Rng& rng) {
  std::size_t violations = 0;
  for (std::size_t t = 0; t < 200; ++t) {
    const auto m = 1 + static_cast<std::size_t>(rng.uniform() * 10.0);
    const auto p = BinProbabilityVector::normalized(random_masses(m, rng));
    double prev = 0.0;
    for (std::size_t n = 1; n <= 60; ++n) {
      const double e = expected_occupied_exact(p, n);
      if (e < prev - 1e-12) ++violations;
      prev = e;
    }
  }
  return {"", violations == 0, fmt("vectors=200 N=1..60 violations=%zu", violations)};
}

CheckResult hen_contraction(std::size_t count, Rng& rng) {
  ContractionAssumptions a;
  a.alpha = 0.5;
  a.l1 = a.l2 = 0.3;
  const auto r = hen_contraction_experiment(a, count, 1, rng);
  return {"", r.within(3.0) && r.measured < 1.0,
          fmt("alpha=0.5 S1=S2=0.3 n=%zu measured=%.6f closed_form=%.6f se=%.2e", count, r.measured,
              r.expected, r.standard_error)};
}

CheckResult hen_composition(std::size_t count, Rng& rng) {
  ContractionAssumptions a;
  a.alpha = 0.5;
  a.l1 = a.l2 = 0.3;
  const auto r = hen_contraction_experiment(a, count, 2, rng);
  return {"", r.within(3.0),
          fmt("two rounds: measured=%.6f single_squared=%.6f se=%.2e", r.measured, r.expected, r.standard_error)};
}

CheckResult chick_contraction(std::size_t count, Rng& rng) {
  const auto r = chick_contraction_experiment(0.8, 0.0, count, rng);
  return {"", r.within(3.0) && r.measured < 1.0,
          fmt("Lambda=0.8 c_m=0 n=%zu measured=%.6f closed_form=%.6f se=%.2e", count, r.measured,
              r.expected, r.standard_error)};
}

CheckResult rooster_neutrality(std::size_t draws, Rng& rng) {
  const auto m = rooster_moments(2, 0.5, draws, rng);
  bool ok = std::abs(m.second_moment - m.expected_second_moment) <= 0.02 * m.expected_second_moment;
  for (std::size_t d = 0; d < m.drift.size(); ++d) ok = ok && std::abs(m.drift[d]) <= 3.0 * m.drift_se[d];
  return {"", ok,
          fmt("dim=2 sigma=0.5 draws=%zu drift=(%.2e, %.2e) se=%.2e second_moment=%.5f expected=%.5f", draws,
              m.drift[0], m.drift[1], m.drift_se[0], m.second_moment, m.expected_second_moment)};
}

// Mixed population: roosters jitter, hens and chicks aligned. Checks
// E|D'|^2 <= rho E|D|^2 + B, allowing 3 standard errors of Monte Carlo noise
// since the synthetic setup makes the bound tight in expectation.
CheckResult global_bound(std::size_t count, Rng& rng) {
  ContractionAssumptions a;
  a.alpha = 0.5;
  a.l1 = a.l2 = 0.3;
  a.lambda_max = 0.8;
  const double sigma = 0.5;
  a.rooster_var_bound = sigma * sigma;
  const double pi_r = 0.2, pi_h = 0.4, pi_c = 0.4;
  CsoConfig cfg;
  cfg.hooks.s1 = a.l1;
  cfg.hooks.s2 = a.l2;
  cfg.rooster_sigma = sigma;
  cfg.lambda_max = a.lambda_max;
  std::vector<double> before(count), after(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double d = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(a.r0, 10.0 * a.r0);
    const double u = rng.uniform();
    double d_new = 0.0;
    if (u < pi_r) {
      d_new = rooster_update(StateVector{d}, cfg, rng)[0];
    } else if (u < pi_r + pi_h) {
      const double cr = rng.uniform(0.0, a.alpha), ch = rng.uniform(0.0, a.alpha);
      d_new = hen_update(StateVector{d}, StateVector{cr * d}, StateVector{ch * d}, {}, cfg, rng)[0];
    } else {
      const double cm = rng.uniform(0.0, a.alpha);
      d_new = chick_update(StateVector{d}, StateVector{cm * d}, cfg, rng)[0];
    }
    before[i] = d * d;
    after[i] = d_new * d_new;
  }
  const auto n = static_cast<double>(count);
  const double msd_before = std::accumulate(before.begin(), before.end(), 0.0) / n;
  const double msd_after = std::accumulate(after.begin(), after.end(), 0.0) / n;
  double var = 0.0;
  for (double v : after) var += (v - msd_after) * (v - msd_after);
  const double se = std::sqrt(var / (n - 1.0) / n);
  const double rho = a.global_factor(pi_r, pi_h, pi_c);
  const double bound = rho * msd_before + pi_r * a.rooster_var_bound;
  return {"", rho < 1.0 && msd_after <= bound + 3.0 * se,
          fmt("rho=%.5f B=%.4f msd_before=%.4f msd_after=%.4f bound=%.4f se=%.2e ratio=%.5f", rho,
              pi_r * a.rooster_var_bound, msd_before, msd_after, bound, se, msd_after / msd_before)};
}

CheckResult kld_spot_value() {
  KldConfig cfg;
  cfg.epsilon = 0.05;
  cfg.delta = 0.01;
  cfg.n_min = 1;
  cfg.n_max = 100000;
  const std::size_t n1 = kld_bound(1, cfg);
  const std::size_t n11 = kld_bound(11, cfg);
  return {"", n1 == 53 && n11 == 153, fmt("eps=0.05 delta=0.01: N(k=1)=%zu N(k=11)=%zu", n1, n11)};
}

}  // namespace

bool TheoryReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string TheoryReport::to_text() const {
  std::ostringstream os;
  os << "theory verification report (seed " << seed << ")\n";
  for (const auto& c : checks) {
    os << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail
       << fmt(" (%.2fs)", c.seconds) << "\n";
  }
  os << (all_passed() ? "all checks passed" : "some checks FAILED") << fmt(" in %.2fs\n", total_seconds);
  return os.str();
}

std::string TheoryReport::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["all_passed"] = all_passed();
  j["total_seconds"] = total_seconds;
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"seconds", c.seconds}});
  }
  return j.dump(2) + "\n";
}

TheoryReport run_theory_suite(std::uint64_t seed, const SuiteSizes& sizes) {
  const auto t0 = Clock::now();
  const Rng root(seed, 0x7e0);
  TheoryReport rep;
  rep.seed = seed;
  auto stream = [&](std::uint64_t tag) { return root.fork(tag); };
  {
    Rng r = stream(1);
    rep.checks.push_back(timed("karamata_occupancy", [&] { return karamata_sweep(sizes.karamata_pairs, r); }));
  }
  {
    Rng r = stream(2);
    rep.checks.push_back(timed("oracle_equivalence", [&] { return oracle_equivalence(sizes.oracle_instances, r); }));
  }
  rep.checks.push_back(timed("f_n_concavity", [&] { return concavity(sizes.concavity_grid); }));
  {
    Rng r = stream(3);
    rep.checks.push_back(timed("hen_contraction", [&] { return hen_contraction(sizes.hen_particles, r); }));
  }
  {
    Rng r = stream(4);
    rep.checks.push_back(timed("chick_contraction", [&] { return chick_contraction(sizes.chick_particles, r); }));
  }
  {
    Rng r = stream(5);
    rep.checks.push_back(timed("rooster_neutrality", [&] { return rooster_neutrality(sizes.rooster_draws, r); }));
  }
  rep.checks.push_back(timed("kld_bound_spot_value", [] { return kld_spot_value(); }));
  {
    Rng r = stream(6);
    rep.checks.push_back(timed("occupancy_monotone_in_n", [&] { return monotone_in_n(r); }));
  }
  {
    Rng r = stream(7);
    rep.checks.push_back(timed("hen_composition", [&] { return hen_composition(sizes.hen_particles, r); }));
  }
  {
    Rng r = stream(8);
    rep.checks.push_back(timed("global_mean_square_bound", [&] { return global_bound(sizes.hen_particles, r); }));
  }
  rep.total_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

}  // namespace swarmkld::theory
