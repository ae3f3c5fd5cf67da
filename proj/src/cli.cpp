#include "vqt/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vqt/bases.hpp"
#include "vqt/error.hpp"
#include "vqt/experiments.hpp"
#include "vqt/io.hpp"
#include "vqt/states.hpp"
#include "vqt/tomography.hpp"
#include "vqt/witness.hpp"

namespace vqt {

namespace {

// Writes to the file when a path is given, otherwise to `out`.
void emit(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path.empty()) {
    out << contents;
  } else {
    io::write_text_file(path, contents);
  }
}

std::optional<BipartiteDims> dims_from(const std::vector<int>& v) {
  if (v.empty()) return std::nullopt;
  if (v[0] < 1 || v[1] < 1) throw InvalidInput("bipartite dimensions must be positive");
  return BipartiteDims{v[0], v[1]};
}

ProjectorSet basis_of_kind(const std::string& kind, int dim) {
  if (kind == "mub") return mub(dim);
  if (kind == "gell-mann") return observables_to_projectors(gell_mann_observables(dim));
  throw InvalidInput("unknown basis kind '" + kind + "'");
}

int integer_sqrt(int n) {
  int r = 1;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r * r == n ? r : -1;
}

struct BasesArgs {
  std::string kind = "mub";
  int dim = 0;
  std::string out;
};

struct SimulateArgs {
  std::string state = "werner";
  std::string state_file;
  double beta = -0.8;
  int dim = 9;
  int rank = 1;
  std::string basis;
  std::string basis_kind = "mub";
  int count = 0;
  double noise = 0.0;
  std::uint64_t seed = 1;
  std::string out;
};

struct ReconstructArgs {
  std::string records;
  std::string basis;
  std::string out;
  std::string reference;
  std::vector<int> witness_dims;
  double threshold_factor = 3.0;
  double epsilon_floor = 0.0;
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iters = 200;
};

struct WitnessArgs {
  std::string state;
  std::vector<int> dims;
  std::string out;
};

struct ExperimentArgs {
  std::string name;
  std::string config;
  std::uint64_t seed = 1;
  std::string out;
  double noise = 0.0;
  int threads = 1;
  int samples = 0;
};

void run_bases(const BasesArgs& a, std::ostream& out) {
  const ProjectorSet ps = basis_of_kind(a.kind, a.dim);
  emit(a.out, io::projector_set_to_json(ps).dump(2) + "\n", out);
}

void run_simulate(const SimulateArgs& a, std::ostream& out) {
  DensityMatrix rho;
  if (!a.state_file.empty()) {
    rho = io::density_from_json(io::read_json_file(a.state_file));
  } else if (a.state == "werner") {
    const int q = integer_sqrt(a.dim);
    if (q < 2) throw InvalidInput("a Werner state needs --dim q^2");
    rho = werner_state(a.beta, q);
  } else if (a.state == "random-pure") {
    rho = random_pure(a.dim, a.seed);
  } else if (a.state == "random-density") {
    rho = random_density(a.dim, a.rank, a.seed);
  } else {
    throw InvalidInput("unknown state '" + a.state + "'");
  }

  const ProjectorSet ps = a.basis.empty()
                              ? basis_of_kind(a.basis_kind, static_cast<int>(rho.dim()))
                              : io::projector_set_from_json(io::read_json_file(a.basis));
  if (ps.dim() != rho.dim()) throw InvalidInput("state and basis dimensions differ");
  const int count = a.count == 0 ? ps.size() : a.count;
  if (count < 1 || count > ps.size()) {
    throw InvalidInput("--count must lie in [1, " + std::to_string(ps.size()) + "]");
  }
  std::vector<int> lambdas(static_cast<std::size_t>(count));
  std::iota(lambdas.begin(), lambdas.end(), 0);
  const NoiseModel noise{a.noise > 0.0 ? NoiseKind::UniformMultiplicative : NoiseKind::None,
                         a.noise, a.seed};
  const auto records = noisy_frequencies(exact_probabilities(rho, ps), lambdas, noise);
  std::ostringstream csv;
  io::write_records_csv(csv, records);
  emit(a.out, csv.str(), out);
}

void run_reconstruct(const ReconstructArgs& a, std::ostream& out) {
  auto ps = std::make_shared<const ProjectorSet>(
      io::projector_set_from_json(io::read_json_file(a.basis)));
  std::ifstream in(a.records);
  if (!in) throw InvalidInput("cannot open " + a.records);
  auto records = io::read_records_csv(in);

  ReconstructOptions options;
  options.threshold_factor = a.threshold_factor;
  options.epsilon_floor = a.epsilon_floor;
  options.witness_dims = dims_from(a.witness_dims);
  options.solver.gap_tol = a.gap_tol;
  options.solver.feas_tol = a.feas_tol;
  options.solver.max_iters = a.max_iters;
  options.solver.validate();

  std::optional<DensityMatrix> reference;
  if (!a.reference.empty()) reference = io::density_from_json(io::read_json_file(a.reference));
  const auto result =
      reconstruct(TomographyProblem::from_records(ps, std::move(records)), options, reference);
  emit(a.out, io::tomography_result_to_json(result).dump(2) + "\n", out);
}

void run_witness(const WitnessArgs& a, std::ostream& out) {
  const DensityMatrix rho = io::density_from_json(io::read_json_file(a.state));
  const auto result = decomposable_witness(rho, *dims_from(a.dims));
  emit(a.out, io::witness_result_to_json(result).dump(2) + "\n", out);
}

void run_experiment_cmd(const ExperimentArgs& a, const CLI::App& cmd, std::ostream& out) {
  const exp::Experiment which = exp::experiment_from_string(a.name);
  exp::ExperimentConfig cfg;
  if (a.config.empty()) {
    cfg = exp::ExperimentConfig::defaults(which);
  } else {
    io::Json j = io::read_json_file(a.config);
    if (j.is_object() && !j.contains("experiment") && !j.contains("manifest_version")) {
      j["experiment"] = a.name;
    }
    cfg = exp::ExperimentConfig::from_json(j);
    if (cfg.experiment != which) {
      throw InvalidInput("config is for experiment " + std::string(exp::to_string(cfg.experiment)) +
                         ", not " + a.name);
    }
  }
  if (cmd.count("--seed") > 0) cfg.seed = a.seed;
  if (cmd.count("--samples") > 0) cfg.samples = a.samples;
  if (cmd.count("--noise") > 0) {
    cfg.noise_level = a.noise;
    cfg.noise_kind = a.noise > 0.0 ? NoiseKind::UniformMultiplicative : NoiseKind::None;
  }
  if (a.threads < 1) throw InvalidInput("--threads must be at least 1");
  cfg.validate();

  std::string dir = a.out;
  if (dir.empty()) dir = cfg.output_dir;
  if (dir.empty()) dir = std::string("runs/") + exp::to_string(which);
  for (const auto& f : exp::run_experiment(cfg, dir, a.threads)) out << dir << '/' << f << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum state tomography from partial and incompatible data"};
  app.name("vqt");
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  BasesArgs bases_args;
  auto* bases = app.add_subcommand("bases", "Measurement sets");
  bases->require_subcommand(1);
  auto* gen = bases->add_subcommand("gen", "Write a projector set as JSON");
  gen->add_option("--kind", bases_args.kind, "mub or gell-mann")
      ->check(CLI::IsMember({"mub", "gell-mann"}));
  gen->add_option("--dim", bases_args.dim, "Hilbert-space dimension")->required();
  gen->add_option("--out", bases_args.out, "Output file (default stdout)");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Write measurement records as CSV");
  sim->add_option("--state", sim_args.state, "werner, random-pure or random-density")
      ->check(CLI::IsMember({"werner", "random-pure", "random-density"}));
  sim->add_option("--state-file", sim_args.state_file, "Density matrix JSON instead of --state");
  sim->add_option("--beta", sim_args.beta, "Werner parameter");
  sim->add_option("--dim", sim_args.dim, "Hilbert-space dimension");
  sim->add_option("--rank", sim_args.rank, "Rank for random-density");
  sim->add_option("--basis", sim_args.basis, "Projector set JSON");
  sim->add_option("--basis-kind", sim_args.basis_kind, "mub or gell-mann when --basis is absent");
  sim->add_option("--count", sim_args.count, "Measure the first N projectors (default all)");
  sim->add_option("--noise", sim_args.noise, "Uniform multiplicative noise level in [0, 1)");
  sim->add_option("--seed", sim_args.seed, "Seed for the state and the noise");
  sim->add_option("--out", sim_args.out, "Output file (default stdout)");

  ReconstructArgs rec_args;
  auto* rec = app.add_subcommand("reconstruct", "Estimate a state from records");
  rec->add_option("--records", rec_args.records, "Records CSV")->required();
  rec->add_option("--basis", rec_args.basis, "Projector set JSON")->required();
  rec->add_option("--out", rec_args.out, "Output file (default stdout)");
  rec->add_option("--reference", rec_args.reference, "True state JSON for diagnostics");
  rec->add_option("--witness-dims", rec_args.witness_dims, "dA dB")->expected(2);
  rec->add_option("--threshold-factor", rec_args.threshold_factor, "Flag when delta*p exceeds this multiple of epsilon");
  rec->add_option("--epsilon-floor", rec_args.epsilon_floor, "Minimum additive noise bound per record");
  rec->add_option("--gap-tol", rec_args.gap_tol, "Relative duality gap tolerance");
  rec->add_option("--feas-tol", rec_args.feas_tol, "Relative residual tolerance");
  rec->add_option("--max-iters", rec_args.max_iters, "Interior-point iteration limit");

  WitnessArgs wit_args;
  auto* wit = app.add_subcommand("witness", "Optimal decomposable witness");
  wit->add_option("--state", wit_args.state, "Density matrix JSON")->required();
  wit->add_option("--dims", wit_args.dims, "dA dB")->expected(2)->required();
  wit->add_option("--out", wit_args.out, "Output file (default stdout)");

  ExperimentArgs exp_args;
  auto* ex = app.add_subcommand("experiment", "Run a configured experiment");
  ex->add_option("name", exp_args.name, "fig1, fig2, fig3, fig4 or custom")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4", "custom"}));
  ex->add_option("--config", exp_args.config, "Config or manifest JSON");
  ex->add_option("--seed", exp_args.seed, "Base seed");
  ex->add_option("--out", exp_args.out, "Output directory");
  ex->add_option("--noise", exp_args.noise, "Noise level; 0 disables noise");
  ex->add_option("--threads", exp_args.threads, "Worker threads");
  ex->add_option("--samples", exp_args.samples, "Samples per sweep point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      run_bases(bases_args, out);
    } else if (sim->parsed()) {
      run_simulate(sim_args, out);
    } else if (rec->parsed()) {
      run_reconstruct(rec_args, out);
    } else if (wit->parsed()) {
      run_witness(wit_args, out);
    } else if (ex->parsed()) {
      run_experiment_cmd(exp_args, *ex, out);
    }
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const SingularBasis& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace vqt
