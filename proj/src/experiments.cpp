#include "vqt/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "vqt/bases.hpp"
#include "vqt/error.hpp"
#include "vqt/galois.hpp"
#include "vqt/tomography.hpp"
#include "vqt/witness.hpp"

namespace vqt::exp {

namespace {

std::vector<int> range_1_to(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 1);
  return v;
}

int integer_sqrt(int n) {
  int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  return r * r == n ? r : -1;
}

const char* noise_name(NoiseKind k) {
  return k == NoiseKind::None ? "none" : "uniform-multiplicative";
}

NoiseKind noise_from_string(const std::string& s) {
  if (s == "none") return NoiseKind::None;
  if (s == "uniform-multiplicative") return NoiseKind::UniformMultiplicative;
  throw InvalidInput("unknown noise kind '" + s + "'");
}

template <typename T>
void check_increasing(const std::vector<T>& v, const std::string& what) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) throw InvalidInput(what + " must be strictly increasing");
  }
}

// Sample s of a run uses seed + s.
std::uint64_t sample_seed(const ExperimentConfig& cfg, int s) {
  return cfg.seed + static_cast<std::uint64_t>(s);
}

NoiseModel noise_for(const ExperimentConfig& cfg, int s) {
  return NoiseModel{cfg.noise_kind, cfg.noise_kind == NoiseKind::None ? 0.0 : cfg.noise_level,
                    sample_seed(cfg, s)};
}

ReconstructOptions options_for(const ExperimentConfig& cfg) {
  ReconstructOptions o;
  o.solver = cfg.solver;
  o.threshold_factor = cfg.threshold_factor;
  o.epsilon_floor = cfg.epsilon_floor;
  o.witness_dims = cfg.witness_dims;
  return o;
}

// Measures the first n_projectors projectors and reconstructs.
TomographyResult reconstruct_prefix(const std::shared_ptr<const ProjectorSet>& ps,
                                    const RealVector& probabilities, int n_projectors,
                                    const NoiseModel& noise, const ReconstructOptions& options,
                                    const DensityMatrix& truth) {
  std::vector<int> lambdas(static_cast<std::size_t>(n_projectors));
  std::iota(lambdas.begin(), lambdas.end(), 0);
  auto records = noisy_frequencies(probabilities, lambdas, noise);
  return reconstruct(TomographyProblem::from_records(ps, std::move(records)), options, truth);
}

// Sample-mean sweep over projector counts for one truth state and one set of
// (possibly tampered) probabilities.
Panel sweep(const ExperimentConfig& cfg, const std::shared_ptr<const ProjectorSet>& ps,
            const DensityMatrix& truth, const RealVector& probabilities,
            const std::vector<int>& projector_counts, int threads) {
  const int n_counts = static_cast<int>(projector_counts.size());
  const int n_tasks = n_counts * cfg.samples;
  std::vector<TomographyResult> results(static_cast<std::size_t>(n_tasks));
  const ReconstructOptions options = options_for(cfg);
  parallel_for(n_tasks, threads, [&](int t) {
    const int c = t / cfg.samples;
    const int s = t % cfg.samples;
    results[t] = reconstruct_prefix(ps, probabilities, projector_counts[c], noise_for(cfg, s),
                                    options, truth);
  });

  Panel panel;
  for (int c = 0; c < n_counts; ++c) {
    SweepRow row;
    row.count = projector_counts[c];
    for (int s = 0; s < cfg.samples; ++s) {
      const auto& r = results[c * cfg.samples + s];
      const auto& d = *r.diagnostics;
      row.purity += d.purity;
      row.fidelity += d.fidelity;
      row.trace_distance += d.trace_distance;
      row.entanglement += d.witnessed_entanglement.value_or(0.0);
      row.n_flagged += static_cast<int>(r.incompatible.size());
      for (int lambda : r.incompatible) panel.flags.push_back({row.count, s, lambda});
    }
    const double n = cfg.samples;
    row.purity /= n;
    row.fidelity /= n;
    row.trace_distance /= n;
    row.entanglement /= n;
    panel.rows.push_back(row);
  }
  return panel;
}

io::Json row_to_json(const SweepRow& r) {
  return io::Json{{"count", r.count},
                  {"purity", r.purity},
                  {"fidelity", r.fidelity},
                  {"trace_distance", r.trace_distance},
                  {"entanglement", r.entanglement},
                  {"n_flagged", r.n_flagged}};
}

io::Json fig4_row_to_json(const Fig4Row& r) {
  return io::Json{{"n_observables", r.n_observables},
                  {"mean_fraction", r.mean_fraction},
                  {"stderr_fraction", r.stderr_fraction},
                  {"mean_trace_distance", r.mean_trace_distance},
                  {"n_entangled", r.n_entangled},
                  {"n_separable", r.n_separable}};
}

std::shared_ptr<const ProjectorSet> basis_for(const ExperimentConfig& cfg) {
  if (cfg.experiment == Experiment::Fig4 ||
      (cfg.experiment == Experiment::Custom && cfg.basis == "gell-mann")) {
    return std::make_shared<const ProjectorSet>(
        observables_to_projectors(gell_mann_observables(cfg.dim)));
  }
  return std::make_shared<const ProjectorSet>(mub(cfg.dim));
}

}  // namespace

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::Fig1: return "fig1";
    case Experiment::Fig2: return "fig2";
    case Experiment::Fig3: return "fig3";
    case Experiment::Fig4: return "fig4";
    case Experiment::Custom: return "custom";
  }
  return "unknown";
}

Experiment experiment_from_string(const std::string& s) {
  for (auto e : {Experiment::Fig1, Experiment::Fig2, Experiment::Fig3, Experiment::Fig4,
                 Experiment::Custom}) {
    if (s == to_string(e)) return e;
  }
  throw InvalidInput("unknown experiment '" + s + "'");
}

ExperimentConfig ExperimentConfig::defaults(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::Fig1:
      c.dim = 9;
      c.samples = 20;
      c.noise_kind = NoiseKind::UniformMultiplicative;
      c.noise_level = 0.5;
      c.counts = range_1_to(90);
      c.incompatible_classes = {2, 9};
      c.witness_dims = BipartiteDims{3, 3};
      break;
    case Experiment::Fig2:
      c.dim = 32;
      c.counts = range_1_to(33);
      c.witness_dims = BipartiteDims{2, 16};
      break;
    case Experiment::Fig3:
      c.dim = 16;
      c.samples = 10;
      c.ranks = {1, 2, 4, 8, 16};
      c.solver.gap_tol = 1e-10;
      c.solver.feas_tol = 1e-10;
      break;
    case Experiment::Fig4:
      c.dim = 6;
      c.samples = 50;
      c.counts = range_1_to(36);
      c.witness_dims = BipartiteDims{2, 3};
      c.solver.gap_tol = 1e-10;
      c.solver.feas_tol = 1e-10;
      break;
    case Experiment::Custom:
      c.dim = 9;
      c.witness_dims = BipartiteDims{3, 3};
      break;
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const io::Json& input) {
  if (!input.is_object()) throw InvalidInput("config must be a JSON object");
  const io::Json& j = input.contains("manifest_version") && input.contains("config")
                          ? input.at("config")
                          : input;
  if (!j.is_object() || !j.contains("experiment")) {
    throw InvalidInput("config needs an \"experiment\" key");
  }
  try {
    ExperimentConfig c = defaults(experiment_from_string(j.at("experiment").get<std::string>()));
    for (const auto& [key, v] : j.items()) {
      if (key == "experiment") {
        continue;
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "samples") {
        c.samples = v.get<int>();
      } else if (key == "dim") {
        c.dim = v.get<int>();
      } else if (key == "noise") {
        for (const auto& [nk, nv] : v.items()) {
          if (nk == "kind") {
            c.noise_kind = noise_from_string(nv.get<std::string>());
          } else if (nk == "level") {
            c.noise_level = nv.get<double>();
          } else {
            throw InvalidInput("unknown key noise." + nk);
          }
        }
      } else if (key == "counts") {
        c.counts = v.get<std::vector<int>>();
      } else if (key == "ranks") {
        c.ranks = v.get<std::vector<int>>();
      } else if (key == "beta") {
        c.beta = v.get<double>();
      } else if (key == "beta_incompatible") {
        c.beta_incompatible = v.get<double>();
      } else if (key == "incompatible_classes") {
        c.incompatible_classes = v.get<std::vector<int>>();
      } else if (key == "threshold") {
        c.threshold = v.get<double>();
      } else if (key == "threshold_factor") {
        c.threshold_factor = v.get<double>();
      } else if (key == "epsilon_floor") {
        c.epsilon_floor = v.get<double>();
      } else if (key == "solver") {
        for (const auto& [sk, sv] : v.items()) {
          if (sk == "gap_tol") {
            c.solver.gap_tol = sv.get<double>();
          } else if (sk == "feas_tol") {
            c.solver.feas_tol = sv.get<double>();
          } else if (sk == "max_iters") {
            c.solver.max_iters = sv.get<int>();
          } else if (sk == "step_fraction") {
            c.solver.step_fraction = sv.get<double>();
          } else {
            throw InvalidInput("unknown key solver." + sk);
          }
        }
      } else if (key == "basis") {
        c.basis = v.get<std::string>();
      } else if (key == "state") {
        for (const auto& [sk, sv] : v.items()) {
          if (sk == "kind") {
            c.state.kind = sv.get<std::string>();
          } else if (sk == "beta") {
            c.state.beta = sv.get<double>();
          } else if (sk == "rank") {
            c.state.rank = sv.get<int>();
          } else {
            throw InvalidInput("unknown key state." + sk);
          }
        }
      } else if (key == "witness_dims") {
        if (v.is_null()) {
          c.witness_dims.reset();
        } else {
          const auto dims = v.get<std::vector<int>>();
          if (dims.size() != 2) throw InvalidInput("witness_dims must have two entries");
          c.witness_dims = BipartiteDims{dims[0], dims[1]};
        }
      } else if (key == "output_dir") {
        c.output_dir = v.get<std::string>();
      } else {
        throw InvalidInput("unknown config key '" + key + "'");
      }
    }
    c.validate();
    return c;
  } catch (const io::Json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
}

io::Json ExperimentConfig::to_json() const {
  io::Json j;
  j["experiment"] = exp::to_string(experiment);
  j["seed"] = seed;
  j["samples"] = samples;
  j["dim"] = dim;
  j["noise"] = io::Json{{"kind", noise_name(noise_kind)}, {"level", noise_level}};
  j["counts"] = counts;
  j["ranks"] = ranks;
  j["beta"] = beta;
  j["beta_incompatible"] = beta_incompatible;
  j["incompatible_classes"] = incompatible_classes;
  j["threshold"] = threshold;
  j["threshold_factor"] = threshold_factor;
  j["epsilon_floor"] = epsilon_floor;
  j["solver"] = io::Json{{"gap_tol", solver.gap_tol},
                         {"feas_tol", solver.feas_tol},
                         {"max_iters", solver.max_iters},
                         {"step_fraction", solver.step_fraction}};
  j["basis"] = basis;
  j["state"] = io::Json{{"kind", state.kind}, {"beta", state.beta}, {"rank", state.rank}};
  j["witness_dims"] = witness_dims ? io::Json::array({witness_dims->a, witness_dims->b})
                                   : io::Json(nullptr);
  j["output_dir"] = output_dir;
  return j;
}

void ExperimentConfig::validate() const {
  if (samples < 1) throw InvalidInput("samples must be at least 1");
  if (dim < 2 || dim > 64) throw InvalidInput("dim must lie in [2, 64]");
  NoiseModel{noise_kind, noise_level, seed}.validate();
  solver.validate();
  if (!(threshold > 0.0)) throw InvalidInput("threshold must be positive");
  if (!(threshold_factor > 0.0)) throw InvalidInput("threshold_factor must be positive");
  if (!(epsilon_floor >= 0.0)) throw InvalidInput("epsilon_floor must be nonnegative");
  check_increasing(counts, "counts");
  check_increasing(ranks, "ranks");
  if (witness_dims && (witness_dims->a < 1 || witness_dims->b < 1 || witness_dims->total() != dim)) {
    throw InvalidInput("witness_dims must multiply to dim");
  }

  const bool uses_mub = experiment != Experiment::Fig4 &&
                        !(experiment == Experiment::Custom && basis == "gell-mann");
  if (uses_mub && !prime_power(dim)) {
    throw InvalidInput("dim " + std::to_string(dim) + " is not a prime power");
  }
  if (basis != "mub" && basis != "gell-mann") throw InvalidInput("basis must be mub or gell-mann");

  int max_count = 0;
  switch (experiment) {
    case Experiment::Fig1:
      if (integer_sqrt(dim) < 2) throw InvalidInput("fig1 needs dim = q^2 for a Werner state");
      if (beta < -1.0 || beta > 1.0 || beta_incompatible < -1.0 || beta_incompatible > 1.0) {
        throw InvalidInput("Werner parameters must lie in [-1, 1]");
      }
      for (int c : incompatible_classes) {
        if (c < 0 || c > dim) throw InvalidInput("incompatible class out of range");
      }
      max_count = dim * (dim + 1);
      break;
    case Experiment::Fig2:
      max_count = dim + 1;
      break;
    case Experiment::Fig3:
      if (ranks.empty()) throw InvalidInput("fig3 needs at least one rank");
      for (int r : ranks) {
        if (r < 1 || r > dim) throw InvalidInput("ranks must lie in [1, dim]");
      }
      max_count = dim + 1;
      break;
    case Experiment::Fig4:
      if (!witness_dims) throw InvalidInput("fig4 needs witness_dims");
      max_count = dim * dim;
      break;
    case Experiment::Custom:
      if (state.kind == "werner") {
        if (integer_sqrt(dim) < 2) throw InvalidInput("a Werner state needs dim = q^2");
        if (state.beta < -1.0 || state.beta > 1.0) throw InvalidInput("beta must lie in [-1, 1]");
      } else if (state.kind == "random-density") {
        if (state.rank < 1 || state.rank > dim) throw InvalidInput("state rank must lie in [1, dim]");
      } else if (state.kind != "random-pure") {
        throw InvalidInput("state kind must be werner, random-pure or random-density");
      }
      max_count = basis == "mub" ? dim * (dim + 1) : dim * dim * dim;
      break;
  }
  if (!counts.empty() && (counts.front() < 1 || counts.back() > max_count)) {
    throw InvalidInput("counts must lie in [1, " + std::to_string(max_count) + "]");
  }
  if (counts.empty() && experiment != Experiment::Fig3 && experiment != Experiment::Custom) {
    throw InvalidInput("counts must not be empty");
  }
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("spearman needs two equal-length series");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<Panel> run_fig1(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  const auto ps = basis_for(cfg);
  const int q = integer_sqrt(cfg.dim);
  const DensityMatrix truth = werner_state(cfg.beta, q);
  const RealVector p = exact_probabilities(truth, *ps);
  const RealVector p_other = exact_probabilities(werner_state(cfg.beta_incompatible, q), *ps);

  std::vector<Panel> panels;
  Panel clean = sweep(cfg, ps, truth, p, cfg.counts, threads);
  clean.name = "panel1";
  panels.push_back(std::move(clean));
  for (std::size_t k = 0; k < cfg.incompatible_classes.size(); ++k) {
    const int cls = cfg.incompatible_classes[k];
    RealVector mixed = p;
    for (int lambda : ps->class_members(cls)) mixed(lambda) = p_other(lambda);
    Panel panel = sweep(cfg, ps, truth, mixed, cfg.counts, threads);
    panel.name = "panel" + std::to_string(k + 2);
    panel.injected_class = cls;
    panels.push_back(std::move(panel));
  }
  return panels;
}

namespace {

DensityMatrix custom_state(const ExperimentConfig& cfg, int s) {
  if (cfg.state.kind == "werner") return werner_state(cfg.state.beta, integer_sqrt(cfg.dim));
  if (cfg.state.kind == "random-pure") return random_pure(cfg.dim, sample_seed(cfg, s));
  return random_density(cfg.dim, cfg.state.rank, sample_seed(cfg, s));
}

// Independent truth state per sample: one sweep per sample, then averaged.
Panel per_sample_sweep(const ExperimentConfig& cfg, const std::shared_ptr<const ProjectorSet>& ps,
                       const std::vector<int>& projector_counts, int threads,
                       const std::function<DensityMatrix(int)>& state_of) {
  ExperimentConfig single = cfg;
  single.samples = 1;
  Panel total;
  for (int s = 0; s < cfg.samples; ++s) {
    single.seed = sample_seed(cfg, s);
    const DensityMatrix truth = state_of(s);
    Panel one = sweep(single, ps, truth, exact_probabilities(truth, *ps), projector_counts, threads);
    if (s == 0) {
      total.rows = one.rows;
    } else {
      for (std::size_t i = 0; i < one.rows.size(); ++i) {
        auto& t = total.rows[i];
        t.purity += one.rows[i].purity;
        t.fidelity += one.rows[i].fidelity;
        t.trace_distance += one.rows[i].trace_distance;
        t.entanglement += one.rows[i].entanglement;
        t.n_flagged += one.rows[i].n_flagged;
      }
    }
    for (auto f : one.flags) {
      f.sample = s;
      total.flags.push_back(f);
    }
  }
  for (auto& t : total.rows) {
    t.purity /= cfg.samples;
    t.fidelity /= cfg.samples;
    t.trace_distance /= cfg.samples;
    t.entanglement /= cfg.samples;
  }
  return total;
}

}  // namespace

Panel run_fig2(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  const auto ps = basis_for(cfg);
  std::vector<int> projector_counts;
  for (int k : cfg.counts) projector_counts.push_back(k * cfg.dim);
  Panel panel = per_sample_sweep(cfg, ps, projector_counts, threads,
                                 [&](int s) { return random_pure(cfg.dim, sample_seed(cfg, s)); });
  panel.name = "fig2";
  return panel;
}

Panel run_custom(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  const auto ps = basis_for(cfg);
  const std::vector<int> counts = cfg.counts.empty() ? range_1_to(ps->size()) : cfg.counts;
  if (counts.back() > ps->size()) throw InvalidInput("counts exceed the number of projectors");
  Panel panel;
  if (cfg.state.kind == "werner") {
    const DensityMatrix truth = custom_state(cfg, 0);
    panel = sweep(cfg, ps, truth, exact_probabilities(truth, *ps), counts, threads);
  } else {
    panel = per_sample_sweep(cfg, ps, counts, threads, [&](int s) { return custom_state(cfg, s); });
  }
  panel.name = "custom";
  return panel;
}

std::vector<Fig3Sample> run_fig3_samples(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  const auto ps = basis_for(cfg);
  const int n_classes = ps->num_classes();
  const int n_tasks = static_cast<int>(cfg.ranks.size()) * cfg.samples;
  std::vector<Fig3Sample> out(static_cast<std::size_t>(n_tasks));
  ReconstructOptions options = options_for(cfg);
  options.witness_dims.reset();

  parallel_for(n_tasks, threads, [&](int t) {
    const int rank = cfg.ranks[t / cfg.samples];
    const int s = t % cfg.samples;
    const DensityMatrix truth =
        random_density(cfg.dim, rank, cfg.seed + 1000ull * static_cast<std::uint64_t>(rank) +
                                          static_cast<std::uint64_t>(s));
    const RealVector p = exact_probabilities(truth, *ps);
    auto reached = [&](int k) {
      const auto r = reconstruct_prefix(ps, p, k * cfg.dim, NoiseModel{}, options, truth);
      return 2.0 * r.diagnostics->trace_distance < cfg.threshold;
    };
    Fig3Sample sample{rank, s, n_classes, true};
    if (!reached(n_classes)) {
      sample.reached = false;
    } else {
      int lo = 1;
      int hi = n_classes;  // reached(hi) holds
      while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (reached(mid)) {
          hi = mid;
        } else {
          lo = mid + 1;
        }
      }
      sample.classes = hi;
    }
    out[t] = sample;
  });
  return out;
}

std::vector<Fig3Row> summarize_fig3(const std::vector<Fig3Sample>& samples, int dim) {
  std::vector<Fig3Row> rows;
  for (const auto& s : samples) {
    if (rows.empty() || rows.back().rank != s.rank) rows.push_back({s.rank, 0.0, s.classes * dim, 0});
    auto& r = rows.back();
    const int projectors = s.classes * dim;
    r.mean += projectors;
    r.min = std::min(r.min, projectors);
    r.max = std::max(r.max, projectors);
  }
  for (auto& r : rows) {
    const auto n = std::count_if(samples.begin(), samples.end(),
                                 [&](const Fig3Sample& s) { return s.rank == r.rank; });
    r.mean /= static_cast<double>(n);
  }
  return rows;
}

std::vector<Fig4Row> run_fig4(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  const auto ps = basis_for(cfg);
  const BipartiteDims dims = *cfg.witness_dims;
  const ReconstructOptions options = options_for(cfg);

  std::vector<DensityMatrix> truths;
  for (int s = 0; s < cfg.samples; ++s) truths.push_back(random_density(cfg.dim, cfg.dim, sample_seed(cfg, s)));
  std::vector<double> e_truth(truths.size());
  parallel_for(cfg.samples, threads, [&](int s) { e_truth[s] = entanglement_value(truths[s], dims); });

  const int n_counts = static_cast<int>(cfg.counts.size());
  const int n_tasks = n_counts * cfg.samples;
  std::vector<double> td(static_cast<std::size_t>(n_tasks));
  std::vector<double> e_est(static_cast<std::size_t>(n_tasks));
  parallel_for(n_tasks, threads, [&](int t) {
    const int c = t / cfg.samples;
    const int s = t % cfg.samples;
    const RealVector p = exact_probabilities(truths[s], *ps);
    const auto r = reconstruct_prefix(ps, p, cfg.counts[c] * cfg.dim, noise_for(cfg, s), options,
                                      truths[s]);
    td[t] = r.diagnostics->trace_distance;
    e_est[t] = r.diagnostics->witnessed_entanglement.value_or(0.0);
  });

  std::vector<Fig4Row> rows;
  for (int c = 0; c < n_counts; ++c) {
    Fig4Row row;
    row.n_observables = cfg.counts[c];
    std::vector<double> fractions;
    double td_sum = 0.0;
    for (int s = 0; s < cfg.samples; ++s) {
      td_sum += td[c * cfg.samples + s];
      if (e_truth[s] < -kEntanglementZeroTol) {
        fractions.push_back(e_est[c * cfg.samples + s] / e_truth[s]);
      }
    }
    row.mean_trace_distance = td_sum / cfg.samples;
    row.n_entangled = static_cast<int>(fractions.size());
    row.n_separable = cfg.samples - row.n_entangled;
    if (!fractions.empty()) {
      const double n = static_cast<double>(fractions.size());
      const double mean = std::accumulate(fractions.begin(), fractions.end(), 0.0) / n;
      double var = 0.0;
      for (double f : fractions) var += (f - mean) * (f - mean);
      row.mean_fraction = mean;
      row.stderr_fraction = fractions.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "count,purity,fidelity,trace_distance,entanglement,n_flagged\n";
  for (const auto& r : rows) {
    out << r.count << ',' << io::format_double(r.purity) << ',' << io::format_double(r.fidelity)
        << ',' << io::format_double(r.trace_distance) << ',' << io::format_double(r.entanglement)
        << ',' << r.n_flagged << '\n';
  }
  return out.str();
}

std::string flags_csv(const std::vector<FlagRecord>& flags) {
  std::ostringstream out;
  out << "count,sample,lambda\n";
  for (const auto& f : flags) out << f.count << ',' << f.sample << ',' << f.lambda << '\n';
  return out.str();
}

std::string fig3_csv(const std::vector<Fig3Row>& rows) {
  std::ostringstream out;
  out << "rank,mean,min,max\n";
  for (const auto& r : rows) {
    out << r.rank << ',' << io::format_double(r.mean) << ',' << r.min << ',' << r.max << '\n';
  }
  return out.str();
}

std::string fig3_samples_csv(const std::vector<Fig3Sample>& samples, int dim) {
  std::ostringstream out;
  out << "rank,sample,classes,projectors,reached\n";
  for (const auto& s : samples) {
    out << s.rank << ',' << s.sample << ',' << s.classes << ',' << s.classes * dim << ','
        << (s.reached ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string fig4_csv(const std::vector<Fig4Row>& rows) {
  std::ostringstream out;
  out << "n_observables,mean_fraction,stderr_fraction,mean_trace_distance,n_entangled,n_separable\n";
  for (const auto& r : rows) {
    out << r.n_observables << ',' << io::format_double(r.mean_fraction) << ','
        << io::format_double(r.stderr_fraction) << ',' << io::format_double(r.mean_trace_distance)
        << ',' << r.n_entangled << ',' << r.n_separable << '\n';
  }
  return out.str();
}

std::optional<double> flag_fraction_in_class(const Panel& panel, int cls, int dim) {
  if (panel.flags.empty()) return std::nullopt;
  const auto inside = std::count_if(panel.flags.begin(), panel.flags.end(),
                                    [&](const FlagRecord& f) { return f.lambda / dim == cls; });
  return static_cast<double>(inside) / static_cast<double>(panel.flags.size());
}

std::vector<std::string> run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                        int threads) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);
  const auto path = [&](const std::string& name) { return (std::filesystem::path(out_dir) / name).string(); };

  std::vector<std::string> files;
  auto emit = [&](const std::string& name, const std::string& contents) {
    io::write_text_file(path(name), contents);
    files.push_back(name);
  };

  const auto ps = basis_for(cfg);
  io::Json summary;
  summary["experiment"] = to_string(cfg.experiment);
  io::Json notes = io::Json::array();

  switch (cfg.experiment) {
    case Experiment::Fig1: {
      const auto panels = run_fig1(cfg, threads);
      io::Json ps_json = io::Json::array();
      for (const auto& p : panels) {
        emit("fig1_" + p.name + ".csv", sweep_csv(p.rows));
        emit("fig1_" + p.name + "_flags.csv", flags_csv(p.flags));
        io::Json pj{{"name", p.name}};
        if (p.injected_class) {
          const int cls = *p.injected_class;
          pj["injected_class"] = cls;
          pj["injected_lambdas"] = {cls * cfg.dim, cls * cfg.dim + cfg.dim - 1};
          const auto frac = flag_fraction_in_class(p, cls, cfg.dim);
          pj["fraction_flags_in_injected_class"] = frac ? io::Json(*frac) : io::Json(nullptr);
        } else {
          pj["injected_class"] = nullptr;
        }
        pj["total_flags"] = p.flags.size();
        pj["final_row"] = row_to_json(p.rows.back());
        ps_json.push_back(std::move(pj));
      }
      summary["panels"] = std::move(ps_json);
      break;
    }
    case Experiment::Fig2: {
      const Panel p = run_fig2(cfg, threads);
      emit("fig2.csv", sweep_csv(p.rows));
      io::Json rows = io::Json::array();
      for (const auto& r : p.rows) rows.push_back(row_to_json(r));
      summary["rows"] = std::move(rows);
      notes.push_back(
          "entanglement column: decomposable witness across the (first qubit | rest) cut; the "
          "genuine five-party witness is not computed, fidelity and trace distance stand in for it");
      break;
    }
    case Experiment::Fig3: {
      const auto samples = run_fig3_samples(cfg, threads);
      const auto rows = summarize_fig3(samples, cfg.dim);
      emit("fig3.csv", fig3_csv(rows));
      emit("fig3_samples.csv", fig3_samples_csv(samples, cfg.dim));
      io::Json rj = io::Json::array();
      std::vector<double> ranks, means;
      for (const auto& r : rows) {
        rj.push_back(io::Json{{"rank", r.rank}, {"mean", r.mean}, {"min", r.min}, {"max", r.max}});
        ranks.push_back(r.rank);
        means.push_back(r.mean);
      }
      summary["rows"] = std::move(rj);
      summary["spearman_rank_vs_mean"] = rows.size() >= 2 ? io::Json(spearman(ranks, means)) : io::Json(nullptr);
      summary["unreached_samples"] =
          std::count_if(samples.begin(), samples.end(), [](const Fig3Sample& s) { return !s.reached; });
      notes.push_back("classes are added in construction order; counts are reported in projectors");
      break;
    }
    case Experiment::Fig4: {
      const auto rows = run_fig4(cfg, threads);
      emit("fig4.csv", fig4_csv(rows));
      summary["final_row"] = fig4_row_to_json(rows.back());
      notes.push_back("states with no witnessed entanglement are excluded from the fraction mean");
      break;
    }
    case Experiment::Custom: {
      const Panel p = run_custom(cfg, threads);
      emit("custom.csv", sweep_csv(p.rows));
      emit("custom_flags.csv", flags_csv(p.flags));
      summary["final_row"] = row_to_json(p.rows.back());
      break;
    }
  }
  summary["notes"] = notes;
  emit("summary.json", summary.dump(2) + "\n");

  io::Json manifest;
  manifest["manifest_version"] = 1;
  manifest["config"] = cfg.to_json();
  io::Json seeds = io::Json::array();
  for (int s = 0; s < cfg.samples; ++s) seeds.push_back(sample_seed(cfg, s));
  manifest["seeds"] = io::Json{{"base", cfg.seed}, {"per_sample", std::move(seeds)}};
  manifest["solver"] = io::Json{{"algorithm", sdp::kAlgorithm}};
  manifest["rng"] = io::Json{{"state", kStateRngAlgorithm}, {"noise", kNoiseRngAlgorithm}};
  manifest["construction"] = io::Json{{"name", ps->info().construction},
                                      {"field_polynomial", ps->info().field_polynomial},
                                      {"dim", ps->dim()},
                                      {"classes", ps->num_classes()}};
  manifest["environment"] = io::Json{
      {"compiler", __VERSION__},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                    "." + std::to_string(EIGEN_MINOR_VERSION)}};
  manifest["outputs"] = files;
  manifest["notes"] = notes;
  io::write_text_file(path("manifest.json"), manifest.dump(2) + "\n");
  files.push_back("manifest.json");
  return files;
}

}  // namespace vqt::exp
