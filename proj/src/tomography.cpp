#include "vqt/tomography.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "vqt/error.hpp"
#include "vqt/witness.hpp"

namespace vqt {

TomographyProblem TomographyProblem::from_records(std::shared_ptr<const ProjectorSet> projectors,
                                                  std::vector<MeasurementRecord> records) {
  if (!projectors) throw InvalidInput("tomography problem needs a projector set");
  std::vector<bool> seen(static_cast<std::size_t>(projectors->size()), false);
  for (const auto& r : records) {
    if (r.lambda < 0 || r.lambda >= projectors->size()) {
      throw InvalidInput("record index " + std::to_string(r.lambda) + " out of range");
    }
    seen[r.lambda] = true;
  }
  TomographyProblem tp;
  tp.projectors = std::move(projectors);
  tp.measured = std::move(records);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) tp.unmeasured.push_back(static_cast<int>(i));
  }
  return tp;
}

void TomographyProblem::validate() const {
  if (!projectors) throw InvalidInput("tomography problem needs a projector set");
  const int total = projectors->size();
  std::vector<int> state(static_cast<std::size_t>(total), 0);  // 1 measured, 2 unmeasured
  for (const auto& r : measured) {
    if (r.lambda < 0 || r.lambda >= total) throw InvalidInput("record index out of range");
    if (!(r.frequency >= 0.0) || !(r.epsilon >= 0.0)) {
      throw InvalidInput("record " + std::to_string(r.lambda) + " has a negative value");
    }
    state[r.lambda] = 1;
  }
  for (int u : unmeasured) {
    if (u < 0 || u >= total) throw InvalidInput("unmeasured index out of range");
    if (state[u] == 1) throw InvalidInput("index " + std::to_string(u) + " is both measured and unmeasured");
    state[u] = 2;
  }
  if (std::find(state.begin(), state.end(), 0) != state.end()) {
    throw InvalidInput("measured and unmeasured sets do not cover the projector set");
  }
}

HermitianMatrix cost_operator(const ProjectorSet& ps, const std::vector<int>& unmeasured) {
  const Eigen::Index d = ps.dim();
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  for (int lambda : unmeasured) {
    const ComplexVector e = ps.vector(lambda);
    h.noalias() += e * e.adjoint();
  }
  return HermitianMatrix::symmetrized(h);
}

sdp::ConicProgram assemble_sdp(const TomographyProblem& problem, double epsilon_floor) {
  problem.validate();
  const ProjectorSet& ps = *problem.projectors;
  const auto d = static_cast<int>(ps.dim());
  const auto n = static_cast<int>(problem.measured.size());

  sdp::ConicProgram prog;
  prog.psd_dim = d;
  prog.nonneg_count = n;
  prog.objective.psd = cost_operator(ps, problem.unmeasured).matrix();
  prog.objective.nonneg = RealVector::Ones(n);
  prog.equalities.push_back({{ComplexMatrix::Identity(d, d), {}}, 1.0});

  prog.inequalities.reserve(2 * static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const auto& rec = problem.measured[k];
    const ComplexVector e = ps.vector(rec.lambda);
    const ComplexMatrix proj = e * e.adjoint();
    const double scale = std::max(rec.frequency, epsilon_floor);
    // Tr(rho P) + scale Delta >= p
    RealVector lower = RealVector::Zero(n);
    lower(k) = scale;
    prog.inequalities.push_back({{proj, lower}, rec.frequency, sdp::Sense::GreaterEqual});
    // Tr(rho P) - scale Delta <= p
    RealVector upper = RealVector::Zero(n);
    upper(k) = -scale;
    prog.inequalities.push_back({{proj, upper}, rec.frequency, sdp::Sense::LessEqual});
  }
  return prog;
}

TomographyResult reconstruct(const TomographyProblem& problem, const ReconstructOptions& options,
                             const std::optional<DensityMatrix>& reference) {
  const sdp::ConicProgram prog = assemble_sdp(problem, options.epsilon_floor);
  const sdp::ConicSolution sol = sdp::solve(prog, options.solver);
  if (sol.status != sdp::Status::Optimal && sol.status != sdp::Status::MaxIterations) {
    throw NumericalFailure(std::string("tomography program ended with status ") +
                           sdp::to_string(sol.status) + ": " + sol.message);
  }

  TomographyResult out;
  out.solver_status = sol.status;
  out.certified = sol.status == sdp::Status::Optimal;
  out.iterations = sol.iterations;
  out.estimate = DensityMatrix::project(sol.psd);
  out.deltas = sol.nonneg;
  out.objective = sol.objective_value;
  out.cost = (prog.objective.psd * out.estimate.matrix()).trace().real();
  out.incompatible = detect_incompatible(out, problem.measured, options.threshold_factor);
  if (reference) out.diagnostics = diagnostics(out.estimate, *reference, options.witness_dims);
  return out;
}

std::vector<int> detect_incompatible(const TomographyResult& result,
                                     const std::vector<MeasurementRecord>& records,
                                     double threshold_factor) {
  if (static_cast<std::size_t>(result.deltas.size()) != records.size()) {
    throw InvalidInput("detect_incompatible: result and records disagree in length");
  }
  std::set<int> flagged;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    const double relaxation = result.deltas(static_cast<Eigen::Index>(k)) * r.frequency;
    if (relaxation > threshold_factor * r.epsilon + kIncompatibleAbsTol) flagged.insert(r.lambda);
  }
  return {flagged.begin(), flagged.end()};
}

Diagnostics diagnostics(const DensityMatrix& estimate, const DensityMatrix& reference,
                        std::optional<BipartiteDims> witness_dims) {
  Diagnostics out;
  out.purity = purity(estimate);
  out.fidelity = fidelity(reference, estimate);
  out.trace_distance = trace_distance(estimate, reference);
  if (witness_dims) out.witnessed_entanglement = entanglement_value(estimate, *witness_dims);
  return out;
}

}  // namespace vqt
