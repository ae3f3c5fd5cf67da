#pragma once

// Trace-one decomposable entanglement witnesses W = P + Q^Gamma (P, Q PSD),
// optimized per state with the conic solver.

#include "vqt/linalg.hpp"
#include "vqt/sdp.hpp"

namespace vqt {

struct WitnessResult {
  HermitianMatrix witness;  // trace one
  double value = 0.0;       // Tr(W rho)
  double entanglement = 0.0;  // min(value, 0)
  ComplexMatrix p;
  ComplexMatrix q;
  double gap = 0.0;  // certified duality gap of the witness program
  sdp::Status status = sdp::Status::NumericalFailure;
};

/// Default solver settings for witness programs.
sdp::SolverSettings witness_solver_settings();

/// Minimizes Tr(W rho) over W = P + Q^Gamma with P, Q PSD and Tr W = 1, where
/// Gamma is the partial transpose on the second factor. A negative value
/// certifies entanglement across the (A | B) cut.
WitnessResult decomposable_witness(const DensityMatrix& rho, BipartiteDims dims,
                                   const sdp::SolverSettings& settings = witness_solver_settings());

/// min(decomposable witness value, 0).
double entanglement_value(const DensityMatrix& rho, BipartiteDims dims,
                          const sdp::SolverSettings& settings = witness_solver_settings());

/// Entanglement values at or above this are treated as zero when dividing.
inline constexpr double kEntanglementZeroTol = 1e-7;

/// E(estimate) / E(truth); throws UndefinedFraction when truth has no
/// witnessed entanglement.
double entanglement_fraction(const DensityMatrix& estimate, const DensityMatrix& truth,
                             BipartiteDims dims,
                             const sdp::SolverSettings& settings = witness_solver_settings());

}  // namespace vqt
