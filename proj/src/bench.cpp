#include "swarmkld/bench.hpp"

#include "swarmkld/cso.hpp"
#include "swarmkld/filter.hpp"
#include "swarmkld/kld.hpp"
#include "swarmkld/rng.hpp"
#include "swarmkld/theory.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace swarmkld {

std::string_view algorithm_name(Algorithm a) noexcept { return a == Algorithm::pf ? "PF" : "CPF"; }

Algorithm parse_algorithm(std::string_view name) {
  if (name == "PF" || name == "pf") return Algorithm::pf;
  if (name == "CPF" || name == "cpf") return Algorithm::cpf;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "' (expected PF or CPF)");
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial) {
  return derive_seed(master_seed, trial);
}

namespace {

HistogramGrid kld_grid(const ExperimentConfig& config, const StateSpaceModel& model) {
  return HistogramGrid::zero_anchored(config.kld.bin_width, model.position_dims());
}

ParticleSet initial_cloud(const StateSpaceModel& model, const Observation& z0, std::size_t n,
                          Rng& rng, Exec exec) {
  const Rng base = rng.split();
  std::vector<StateVector> states(n);
  for_each_index(n, exec, [&](std::size_t i) {
    Rng local = base.fork(i);
    states[i] = model.initial_sample(z0, local);
  });
  return ParticleSet::uniform(std::move(states));
}

bool finite_record(const StepRecord& r) {
  return r.estimate.all_finite() && std::isfinite(r.nees) && std::isfinite(r.contraction);
}

}  // namespace

RunMetrics run_trial(const ExperimentConfig& config, Algorithm algorithm, std::uint64_t seed,
                     const StepObserver& observer, Exec exec) {
  RunMetrics m;
  try {
    config.validate();
    const auto model = make_model(config);
    const auto pos = model->position_dims();
    Rng truth_rng(seed, kTruthStream);
    Rng filter_rng(seed, kFilterStream);
    Rng cso_rng(seed, kCsoStream);
    const Trajectory traj = simulate_trajectory(*model, config.steps, truth_rng);
    const HistogramGrid grid = kld_grid(config, *model);

    // The step-0 cloud already reflects z0 (or the known start for CV), so
    // step 0 skips the reweight.
    ParticleSet cloud = initial_cloud(*model, traj.observations[0], config.n_init, filter_rng, exec);
    for (std::size_t k = 0; k < config.steps; ++k) {
      const Observation& z = traj.observations[k];
      if (k > 0) cloud = predict(cloud, *model, filter_rng, exec);
      ParticleSet weighted = k == 0 ? cloud : [&] {
        try {
          return reweight(cloud, z, *model, exec);
        } catch (const AllZeroWeights&) {
          ++m.weight_resets;
          return cloud.with_weights(uniform_weights(cloud.size()));
        }
      }();

      StepRecord rec;
      // Rejuvenation only follows a reweight, so step 0 is left alone.
      if (algorithm == Algorithm::cpf && k > 0) {
        const StateVector x_star = weighted_mean(weighted);
        CsoResult cso = cso_rejuvenate(weighted, z, *model, config.cso, cso_rng, exec);
        m.reverted_cso_rounds += cso.reverted_rounds;
        try {
          rec.contraction = theory::contraction_ratio(weighted, cso.set, x_star).ratio;
        } catch (const theory::ZeroBefore&) {
          rec.contraction = 1.0;
        }
        weighted = std::move(cso.set);
      }

      KldSampleResult selected = kld_sample(weighted_source(weighted), grid, config.kld, filter_rng);
      cloud = std::move(selected.set);

      rec.estimate = weighted_mean(cloud);
      rec.truth = traj.states[k];
      rec.n_selected = selected.drawn;
      rec.k_occupied = selected.occupied_bins;
      const NeesResult q = nees(rec.estimate, weighted_covariance(cloud, pos), rec.truth, pos);
      rec.nees = q.value;
      if (q.regularized) ++m.regularized_nees_steps;
      if (!finite_record(rec)) throw std::runtime_error("non-finite estimate at step " + std::to_string(k));
      if (observer) observer(k, cloud, rec.estimate);
      m.steps.push_back(std::move(rec));
    }
    summarize(m, pos);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    m.failed = true;
    m.failure = e.what();
  }
  return m;
}

PairedTrial run_paired_trial(const ExperimentConfig& config, std::uint64_t seed, Exec exec) {
  PairedTrial out;
  std::vector<ParticleSet> pf_clouds;
  std::vector<StateVector> pf_estimates;
  out.pf = run_trial(
      config, Algorithm::pf, seed,
      [&](std::size_t, const ParticleSet& cloud, const StateVector& est) {
        pf_clouds.push_back(cloud);
        pf_estimates.push_back(est);
      },
      exec);

  const auto model = make_model(config);
  const auto pos = model->position_dims();
  out.cpf = run_trial(
      config, Algorithm::cpf, seed,
      [&](std::size_t k, const ParticleSet& cloud, const StateVector&) {
        if (k >= pf_clouds.size()) return;
        std::vector<double> origin;
        for (std::size_t d : pos) origin.push_back(pf_estimates[k][d]);
        const HistogramGrid grid(config.kld.bin_width, origin, pos);
        const auto v = theory::majorization_from_particles(cloud, pf_clouds[k], grid);
        ++out.compared_steps;
        if (v.a_majorizes_b) ++out.cpf_majorizes_pf;
        if (v.b_majorizes_a) ++out.pf_majorizes_cpf;
      },
      exec);
  return out;
}

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

TrialRecord make_record(const SweepAxis& axis, double value, Algorithm a, std::size_t trial,
                        std::uint64_t seed, const RunMetrics& m, double major_rate) {
  TrialRecord r;
  r.sweep_var = axis.variable;
  r.sweep_value = value;
  r.algorithm = std::string(algorithm_name(a));
  r.trial = trial;
  r.trial_seed = seed;
  r.failed = m.failed;
  r.failure = m.failure;
  if (!m.failed) {
    r.rmse = m.position_rmse;
    r.n = m.avg_particles;
    r.nees = m.avg_nees;
    r.k = m.avg_occupied;
    r.major_rate = major_rate;
  }
  return r;
}

}  // namespace

ResultRow aggregate(std::span<const TrialRecord> records, std::uint64_t master_seed) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  ResultRow row;
  row.sweep_var = records.front().sweep_var;
  row.sweep_value = records.front().sweep_value;
  row.algorithm = records.front().algorithm;
  row.trials = records.size();
  row.seed = master_seed;
  std::vector<double> rmse, n, q, k, major;
  for (const auto& r : records) {
    if (r.failed) continue;
    rmse.push_back(r.rmse);
    n.push_back(r.n);
    q.push_back(r.nees);
    k.push_back(r.k);
    major.push_back(r.major_rate);
  }
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  const bool any = !rmse.empty();
  row.rmse_mean = any ? mean_of(rmse) : nan;
  row.rmse_std = sample_std(rmse);
  row.n_mean = any ? mean_of(n) : nan;
  row.n_std = sample_std(n);
  row.nees_mean = any ? mean_of(q) : nan;
  row.nees_std = sample_std(q);
  row.k_mean = any ? mean_of(k) : nan;
  row.major_rate = any ? mean_of(major) : nan;
  return row;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  struct Job {
    std::size_t axis;
    std::size_t value;
    std::size_t trial;
  };
  std::vector<Job> jobs;
  for (std::size_t a = 0; a < config.sweeps.size(); ++a) {
    for (std::size_t v = 0; v < config.sweeps[a].values.size(); ++v) {
      for (std::size_t t = 0; t < config.trials; ++t) jobs.push_back({a, v, t});
    }
  }

  std::vector<PairedTrial> results(jobs.size());
  const auto count = static_cast<long long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long long j = 0; j < count; ++j) {
    const Job& job = jobs[static_cast<std::size_t>(j)];
    ExperimentConfig c = config;
    set_sweep_value(c, c.sweeps[job.axis].variable, c.sweeps[job.axis].values[job.value]);
    PairedTrial& out = results[static_cast<std::size_t>(j)];
    try {
      out = run_paired_trial(c, trial_seed(config.seed, job.trial), Exec::serial);
    } catch (const std::exception& e) {
      out.pf.failed = out.cpf.failed = true;
      out.pf.failure = out.cpf.failure = e.what();
    }
  }

  SweepResult sweep;
  std::size_t j = 0;
  for (std::size_t a = 0; a < config.sweeps.size(); ++a) {
    const SweepAxis& axis = config.sweeps[a];
    for (double value : axis.values) {
      std::vector<TrialRecord> pf, cpf;
      for (std::size_t t = 0; t < config.trials; ++t, ++j) {
        const PairedTrial& p = results[j];
        const double steps = p.compared_steps > 0 ? static_cast<double>(p.compared_steps) : 1.0;
        const std::uint64_t seed = trial_seed(config.seed, t);
        pf.push_back(make_record(axis, value, Algorithm::pf, t, seed, p.pf,
                                 static_cast<double>(p.pf_majorizes_cpf) / steps));
        cpf.push_back(make_record(axis, value, Algorithm::cpf, t, seed, p.cpf,
                                  static_cast<double>(p.cpf_majorizes_pf) / steps));
      }
      sweep.rows.push_back(aggregate(pf, config.seed));
      sweep.rows.push_back(aggregate(cpf, config.seed));
      sweep.trials.insert(sweep.trials.end(), pf.begin(), pf.end());
      sweep.trials.insert(sweep.trials.end(), cpf.begin(), cpf.end());
    }
  }
  return sweep;
}

SweepResult run_sweep_1d(const ExperimentConfig& config) {
  if (config.model != ModelKind::linear1d) throw ConfigError("sweep1d needs model linear1d");
  return run_sweep(config);
}

SweepResult run_sweep_cv(const ExperimentConfig& config) {
  if (config.model != ModelKind::cv2d) throw ConfigError("sweepcv needs model cv2d");
  return run_sweep(config);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view s, const std::string& ctx) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError(ctx + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

template <class Int>
Int parse_int(std::string_view s, const std::string& ctx) {
  Int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError(ctx + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::trunc) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::out | std::ios::binary | mode);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// Sweep variable names are identifiers, but keep the CSV well-formed anyway.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

void write_results(std::span<const ResultRow> rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kResultHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.sweep_var) << ',' << format_double(r.sweep_value) << ',' << r.algorithm << ','
        << format_double(r.rmse_mean) << ',' << format_double(r.rmse_std) << ','
        << format_double(r.n_mean) << ',' << format_double(r.n_std) << ','
        << format_double(r.nees_mean) << ',' << format_double(r.nees_std) << ','
        << format_double(r.k_mean) << ',' << format_double(r.major_rate) << ',' << r.trials << ','
        << r.seed << '\n';
  }
  finish(out, path);
}

std::vector<ResultRow> read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kResultHeader) {
    throw IoError("'" + path.string() + "': unexpected header");
  }
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string ctx = path.string() + ":" + std::to_string(lineno);
    const auto f = split_fields(line);
    if (f.size() != 13) throw IoError(ctx + ": expected 13 fields, got " + std::to_string(f.size()));
    ResultRow r;
    r.sweep_var = std::string(f[0]);
    r.sweep_value = parse_double(f[1], ctx);
    r.algorithm = std::string(f[2]);
    r.rmse_mean = parse_double(f[3], ctx);
    r.rmse_std = parse_double(f[4], ctx);
    r.n_mean = parse_double(f[5], ctx);
    r.n_std = parse_double(f[6], ctx);
    r.nees_mean = parse_double(f[7], ctx);
    r.nees_std = parse_double(f[8], ctx);
    r.k_mean = parse_double(f[9], ctx);
    r.major_rate = parse_double(f[10], ctx);
    r.trials = parse_int<std::size_t>(f[11], ctx);
    r.seed = parse_int<std::uint64_t>(f[12], ctx);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_trial_records(std::span<const TrialRecord> records, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "sweep_var,sweep_value,algorithm,trial,trial_seed,rmse,n,nees,k,major_rate,failed\n";
  for (const auto& r : records) {
    out << csv_field(r.sweep_var) << ',' << format_double(r.sweep_value) << ',' << r.algorithm << ','
        << r.trial << ',' << r.trial_seed << ',' << format_double(r.rmse) << ',' << format_double(r.n)
        << ',' << format_double(r.nees) << ',' << format_double(r.k) << ','
        << format_double(r.major_rate) << ',' << (r.failed ? 1 : 0) << '\n';
  }
  finish(out, path);
}

void write_sidecar(const ExperimentConfig& config, const SweepResult& result,
                   const std::filesystem::path& path) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& r : result.trials) {
    if (!r.failed) continue;
    failures.push_back({{"sweep_var", r.sweep_var},
                        {"sweep_value", r.sweep_value},
                        {"algorithm", r.algorithm},
                        {"trial", r.trial},
                        {"trial_seed", r.trial_seed},
                        {"message", r.failure}});
  }
  nlohmann::json j;
  j["config"] = to_json(config);
  j["run"] = {{"master_seed", config.seed},
              {"csv_header", kResultHeader},
              {"rows", result.rows.size()},
              {"failed_trials", failures}};
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

void write_trace(const RunMetrics& metrics, Algorithm algorithm, const std::filesystem::path& path,
                 bool append) {
  auto out = open_out(path, append ? std::ios::app : std::ios::trunc);
  const std::size_t dim = metrics.steps.empty() ? 0 : metrics.steps.front().estimate.size();
  if (!append) {
    out << "step,algorithm";
    for (std::size_t d = 0; d < dim; ++d) out << ",est_" << d;
    for (std::size_t d = 0; d < dim; ++d) out << ",truth_" << d;
    out << ",n,k,nees,contraction\n";
  }
  for (std::size_t t = 0; t < metrics.steps.size(); ++t) {
    const auto& s = metrics.steps[t];
    out << t << ',' << algorithm_name(algorithm);
    for (std::size_t d = 0; d < dim; ++d) out << ',' << format_double(s.estimate[d]);
    for (std::size_t d = 0; d < dim; ++d) out << ',' << format_double(s.truth[d]);
    out << ',' << s.n_selected << ',' << s.k_occupied << ',' << format_double(s.nees) << ','
        << format_double(s.contraction) << '\n';
  }
  finish(out, path);
}

}  // namespace swarmkld
