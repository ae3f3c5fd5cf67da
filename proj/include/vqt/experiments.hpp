#pragma once

// Config-driven experiment runs: Werner sweeps with injected incompatible
// classes (fig1), five-qubit pure-state recovery (fig2), measurements needed
// versus rank (fig3), qubit-qutrit entanglement lower bounds (fig4), and a
// generic single sweep (custom).

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vqt/io.hpp"
#include "vqt/sdp.hpp"
#include "vqt/states.hpp"

namespace vqt::exp {

enum class Experiment { Fig1, Fig2, Fig3, Fig4, Custom };

const char* to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

/// State family for custom runs.
struct StateSpec {
  std::string kind = "werner";  // werner | random-pure | random-density
  double beta = -0.8;
  int rank = 1;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Fig1;
  std::uint64_t seed = 1;
  int samples = 1;
  NoiseKind noise_kind = NoiseKind::None;
  double noise_level = 0.0;
  /// Sweep grid: projectors (fig1, custom), classes (fig2), observables (fig4).
  std::vector<int> counts;
  std::vector<int> ranks;  // fig3
  int dim = 9;             // Hilbert-space dimension
  double beta = -0.8;
  double beta_incompatible = 0.8;
  /// fig1: class replaced by beta_incompatible data in panels 2, 3, ...
  std::vector<int> incompatible_classes;
  double threshold = 1e-6;  // fig3: Tr|rho - estimate| target
  double threshold_factor = 3.0;
  double epsilon_floor = 0.0;
  sdp::SolverSettings solver;
  std::string basis = "mub";  // custom: mub | gell-mann
  StateSpec state;            // custom
  std::optional<BipartiteDims> witness_dims;
  std::string output_dir;

  /// Full-size dimensions with desk-scale sample sizes.
  static ExperimentConfig defaults(Experiment e);

  /// Starts from defaults(experiment) and overrides the given keys. Unknown
  /// keys raise InvalidInput. A manifest ({"manifest_version", "config", ...})
  /// is accepted and its config section used.
  static ExperimentConfig from_json(const io::Json& j);

  /// Every field, in a fixed key order.
  io::Json to_json() const;

  /// Throws InvalidInput on non-positive sample sizes, a sweep grid that is
  /// not strictly increasing or out of range, or unsupported dimensions.
  void validate() const;
};

struct SweepRow {
  int count = 0;
  double purity = 0.0;
  double fidelity = 0.0;
  double trace_distance = 0.0;
  double entanglement = 0.0;
  int n_flagged = 0;  // summed over samples
};

struct FlagRecord {
  int count = 0;
  int sample = 0;
  int lambda = 0;
};

struct Panel {
  std::string name;
  std::optional<int> injected_class;
  std::vector<SweepRow> rows;  // sample means, except n_flagged
  std::vector<FlagRecord> flags;
};

struct Fig3Sample {
  int rank = 0;
  int sample = 0;
  int classes = 0;  // minimal classes reaching the threshold
  bool reached = true;
};

struct Fig3Row {
  int rank = 0;
  double mean = 0.0;  // projectors
  int min = 0;
  int max = 0;
};

struct Fig4Row {
  int n_observables = 0;
  double mean_fraction = 0.0;
  double stderr_fraction = 0.0;
  double mean_trace_distance = 0.0;
  int n_entangled = 0;
  int n_separable = 0;
};

/// Runs fn(0..n-1) on up to `threads` workers. Results must be written to
/// index-keyed slots; the first exception is rethrown after all workers stop.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

std::vector<Panel> run_fig1(const ExperimentConfig& cfg, int threads = 1);
Panel run_fig2(const ExperimentConfig& cfg, int threads = 1);
std::vector<Fig3Sample> run_fig3_samples(const ExperimentConfig& cfg, int threads = 1);
std::vector<Fig3Row> summarize_fig3(const std::vector<Fig3Sample>& samples, int dim);
std::vector<Fig4Row> run_fig4(const ExperimentConfig& cfg, int threads = 1);
Panel run_custom(const ExperimentConfig& cfg, int threads = 1);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string flags_csv(const std::vector<FlagRecord>& flags);
std::string fig3_csv(const std::vector<Fig3Row>& rows);
std::string fig3_samples_csv(const std::vector<Fig3Sample>& samples, int dim);
std::string fig4_csv(const std::vector<Fig4Row>& rows);

/// Fraction of flagged indices (with multiplicity) inside the given class;
/// nullopt when nothing was flagged.
std::optional<double> flag_fraction_in_class(const Panel& panel, int cls, int dim);

/// Runs the configured experiment, writes its CSVs, summary.json and
/// manifest.json into out_dir, and returns the written file names.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                        int threads = 1);

}  // namespace vqt::exp
