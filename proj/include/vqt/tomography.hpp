#pragma once

// Variational tomography: minimize Tr(H rho) + sum Delta over trace-one PSD
// rho, with H the sum of the unmeasured projectors and each measured
// frequency p relaxed multiplicatively to (1 -/+ Delta) p.

#include <memory>
#include <optional>
#include <vector>

#include "vqt/bases.hpp"
#include "vqt/linalg.hpp"
#include "vqt/sdp.hpp"
#include "vqt/states.hpp"

namespace vqt {

/// Measured records (the known set) and the remaining projector indices (the
/// unknown set) over one projector set.
struct TomographyProblem {
  std::shared_ptr<const ProjectorSet> projectors;
  std::vector<MeasurementRecord> measured;
  std::vector<int> unmeasured;

  /// Unknown set = every projector index that has no record.
  static TomographyProblem from_records(std::shared_ptr<const ProjectorSet> projectors,
                                        std::vector<MeasurementRecord> records);

  /// Throws InvalidInput unless measured and unmeasured indices are disjoint
  /// and together cover the projector set, and frequencies are nonnegative.
  void validate() const;
};

struct Diagnostics {
  double purity = 0.0;
  double fidelity = 0.0;
  double trace_distance = 0.0;
  std::optional<double> witnessed_entanglement;
};

struct ReconstructOptions {
  sdp::SolverSettings solver;
  double threshold_factor = 3.0;
  /// Relaxation scale floor: constraints use max(p, floor) * Delta, so records
  /// with p = 0 become additive bounds. Zero keeps the pure multiplicative form.
  double epsilon_floor = 0.0;
  /// Bipartite cut for witnessed entanglement in diagnostics.
  std::optional<BipartiteDims> witness_dims;
};

struct TomographyResult {
  DensityMatrix estimate;
  RealVector deltas;        // one per measured record
  double cost = 0.0;        // Tr(H estimate)
  double objective = 0.0;   // cost + sum of deltas, as returned by the solver
  sdp::Status solver_status = sdp::Status::NumericalFailure;
  bool certified = false;   // solver reached Optimal
  int iterations = 0;
  std::vector<int> incompatible;
  std::optional<Diagnostics> diagnostics;
};

/// H = sum of P_lambda over the unmeasured indices.
HermitianMatrix cost_operator(const ProjectorSet& ps, const std::vector<int>& unmeasured);

/// Conic program with the PSD block rho, one Delta per record, the trace
/// equality, and two inequalities per record (>= first, then <=).
sdp::ConicProgram assemble_sdp(const TomographyProblem& problem, double epsilon_floor = 0.0);

/// Solves the assembled program and post-processes the estimate. Throws
/// NumericalFailure if the solver fails; MaxIterations yields certified = false.
TomographyResult reconstruct(const TomographyProblem& problem,
                             const ReconstructOptions& options = {},
                             const std::optional<DensityMatrix>& reference = std::nullopt);

/// Absolute slack under which a relaxation is treated as numerical noise.
inline constexpr double kIncompatibleAbsTol = 1e-6;

/// Projector indices whose relaxation Delta * p exceeds threshold_factor * epsilon
/// (plus kIncompatibleAbsTol). Sorted, without duplicates.
std::vector<int> detect_incompatible(const TomographyResult& result,
                                     const std::vector<MeasurementRecord>& records,
                                     double threshold_factor = 3.0);

Diagnostics diagnostics(const DensityMatrix& estimate, const DensityMatrix& reference,
                        std::optional<BipartiteDims> witness_dims = std::nullopt);

}  // namespace vqt
