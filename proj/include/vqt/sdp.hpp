#pragma once

// Primal-dual interior-point solver for conic programs over one Hermitian
// positive-semidefinite block and a nonnegative orthant:
//
//   minimize    <C, X> + c^T x
//   subject to  <A_i, X> + a_i^T x  (= | >= | <=)  b_i
//               X Hermitian PSD (psd_dim x psd_dim),  x >= 0 (nonneg_count)
//
// where <A, X> = Re Tr(A X). Inequalities become equalities with extra
// nonnegative slacks; the search direction is HKM with a Mehrotra
// predictor-corrector step from an infeasible identity-scaled start.

#include <string>
#include <vector>

#include "vqt/linalg.hpp"

namespace vqt::sdp {

inline constexpr const char* kAlgorithm =
    "infeasible primal-dual path following, HKM direction, Mehrotra predictor-corrector";

/// A linear functional (X, x) -> Re Tr(psd X) + nonneg^T x. `psd` must be
/// Hermitian; an empty matrix or vector stands for zero.
struct LinearFunctional {
  ComplexMatrix psd;
  RealVector nonneg;
};

enum class Sense { GreaterEqual, LessEqual };

struct Equality {
  LinearFunctional f;
  double rhs = 0.0;
};

struct Inequality {
  LinearFunctional f;
  double rhs = 0.0;
  Sense sense = Sense::GreaterEqual;
};

struct ConicProgram {
  int psd_dim = 0;
  int nonneg_count = 0;
  LinearFunctional objective;
  std::vector<Equality> equalities;
  std::vector<Inequality> inequalities;

  /// Throws InvalidInput on shape errors, non-Hermitian blocks, or an empty program.
  void validate() const;

  /// Value of a functional at (X, x); empty parts count as zero.
  double evaluate(const LinearFunctional& f, const ComplexMatrix& X, const RealVector& x) const;
};

struct SolverSettings {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iters = 200;
  double step_fraction = 0.99;

  void validate() const;
};

enum class Status { Optimal, PrimalInfeasible, DualInfeasible, MaxIterations, NumericalFailure };

const char* to_string(Status s);

struct IterationInfo {
  int iteration = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double complementarity = 0.0;  // <X,Z> + x^T z
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double step_primal = 0.0;
  double step_dual = 0.0;
};

struct ConicSolution {
  Status status = Status::NumericalFailure;
  ComplexMatrix psd;   // primal Hermitian block (or a dual-infeasibility ray)
  RealVector nonneg;   // primal orthant block
  /// One multiplier per constraint, equalities first, then inequalities.
  /// Multipliers of >= rows are nonnegative, of <= rows nonpositive. On
  /// PrimalInfeasible this holds a Farkas ray y with b^T y = 1.
  RealVector dual;
  RealVector slacks;  // |lhs - rhs| per inequality
  double objective_value = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  std::vector<IterationInfo> history;
  std::string message;
};

ConicSolution solve(const ConicProgram& program, const SolverSettings& settings = {});

struct KktResiduals {
  double primal = 0.0;  // constraint and cone violation of (X, x)
  double dual = 0.0;    // cone and sign violation of the dual slack
  double gap = 0.0;     // |primal obj - dual obj| / (1 + |primal obj| + |dual obj|)
};

/// Recomputes residuals from the program and the reported primal/dual values
/// only, without touching solver internals.
KktResiduals kkt_residuals(const ConicProgram& program, const ConicSolution& solution);

}  // namespace vqt::sdp
