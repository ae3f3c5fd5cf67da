#include "vqt/witness.hpp"

#include <string>

#include "vqt/error.hpp"

namespace vqt {

sdp::SolverSettings witness_solver_settings() {
  sdp::SolverSettings s;
  s.gap_tol = 1e-10;
  s.feas_tol = 1e-10;
  return s;
}

WitnessResult decomposable_witness(const DensityMatrix& rho, BipartiteDims dims,
                                   const sdp::SolverSettings& settings) {
  const Eigen::Index n = dims.total();
  if (n != rho.dim()) throw InvalidInput("witness: dA * dB does not match the state dimension");

  // One PSD block [[P, R], [R^dagger, Q]]: the objective only sees the
  // diagonal blocks, Tr(P rho) + Tr(Q rho^Gamma), so R is free and the
  // diagonal blocks are PSD whenever the whole block is.
  sdp::ConicProgram prog;
  prog.psd_dim = static_cast<int>(2 * n);
  prog.objective.psd = ComplexMatrix::Zero(2 * n, 2 * n);
  prog.objective.psd.topLeftCorner(n, n) = rho.matrix();
  prog.objective.psd.bottomRightCorner(n, n) = symmetrize(partial_transpose(rho.matrix(), dims));
  prog.equalities.push_back({{ComplexMatrix::Identity(2 * n, 2 * n), {}}, 1.0});

  const auto sol = sdp::solve(prog, settings);
  if (sol.status != sdp::Status::Optimal && sol.status != sdp::Status::MaxIterations) {
    throw NumericalFailure(std::string("witness program failed: ") + sdp::to_string(sol.status));
  }

  WitnessResult out;
  out.status = sol.status;
  out.p = symmetrize(sol.psd.topLeftCorner(n, n));
  out.q = symmetrize(sol.psd.bottomRightCorner(n, n));
  ComplexMatrix w = out.p + partial_transpose(out.q, dims);
  w /= w.trace().real();
  out.witness = HermitianMatrix::symmetrized(w);
  out.value = (out.witness.matrix() * rho.matrix()).trace().real();
  out.entanglement = std::min(out.value, 0.0);
  out.gap = sdp::kkt_residuals(prog, sol).gap;
  return out;
}

double entanglement_value(const DensityMatrix& rho, BipartiteDims dims,
                          const sdp::SolverSettings& settings) {
  return decomposable_witness(rho, dims, settings).entanglement;
}

double entanglement_fraction(const DensityMatrix& estimate, const DensityMatrix& truth,
                             BipartiteDims dims, const sdp::SolverSettings& settings) {
  const double e_truth = entanglement_value(truth, dims, settings);
  if (e_truth > -kEntanglementZeroTol) {
    throw UndefinedFraction("reference state has no witnessed entanglement");
  }
  return entanglement_value(estimate, dims, settings) / e_truth;
}

}  // namespace vqt
