#pragma once

// Measurement sets: mutually unbiased bases, generalized Gell-Mann observables
// and their eigenprojectors, plus overlap-matrix linear inversion.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "vqt/linalg.hpp"

namespace vqt {

/// Where a projector set came from; recorded in exported files and manifests.
struct ConstructionInfo {
  std::string construction;
  std::string field_polynomial;  // empty when no finite field is involved
};

/// Position of a projector: class (complete measurement) and member within it.
struct ProjectorIndex {
  int cls = 0;
  int member = 0;
};

/// Ordered rank-one projectors grouped into complete measurements.
///
/// Each class is stored as a d x d unitary whose columns are the basis
/// vectors; projector lambda (0-based, class-major) is |e><e| for the
/// corresponding column.
class ProjectorSet {
 public:
  ProjectorSet() = default;

  /// Throws InvalidInput unless every class is a d x d unitary within 1e-10.
  ProjectorSet(Eigen::Index dim, std::vector<ComplexMatrix> classes, ConstructionInfo info);

  Eigen::Index dim() const { return dim_; }
  int num_classes() const { return static_cast<int>(classes_.size()); }
  int size() const { return num_classes() * static_cast<int>(dim_); }

  const ComplexMatrix& class_basis(int cls) const { return classes_.at(cls); }
  const std::vector<ComplexMatrix>& classes() const { return classes_; }
  const ConstructionInfo& info() const { return info_; }

  ProjectorIndex locate(int lambda) const;
  int flat_index(int cls, int member) const { return cls * static_cast<int>(dim_) + member; }

  /// Unit vector e with P_lambda = |e><e|.
  ComplexVector vector(int lambda) const;
  ComplexMatrix projector(int lambda) const;

  /// First d-1 projectors of every class, in flat order.
  std::vector<int> independent_subset() const;

  /// Flat indices of every projector in the given class.
  std::vector<int> class_members(int cls) const;

 private:
  Eigen::Index dim_ = 0;
  std::vector<ComplexMatrix> classes_;
  ConstructionInfo info_;
};

/// d + 1 mutually unbiased bases for a prime power d <= 64. Class 0 is the
/// computational basis, followed by the remaining product bases of the
/// base-p digit factorization, then the entangled classes. Throws UnsupportedDimension when d is not a prime power.
ProjectorSet mub(int d);

/// Identity followed by the d^2 - 1 generalized Gell-Mann matrices
/// (symmetric, antisymmetric, then diagonal), normalized to Tr(s_i s_j) = 2 delta_ij.
std::vector<HermitianMatrix> gell_mann_observables(int d);

/// One complete measurement per observable, formed by its eigenvectors in
/// ascending eigenvalue order; degenerate eigenspaces get an orthonormal basis.
ProjectorSet observables_to_projectors(const std::vector<HermitianMatrix>& observables);

/// Gram matrix Tr(P_mu P_nu) over the subset, without any conditioning check.
RealMatrix gram_matrix(const ProjectorSet& ps, const std::vector<int>& subset);

/// Overlap matrix S_{mu nu} = Tr(P_mu P_nu) with a cached factorization.
class OverlapMatrix {
 public:
  static constexpr double kMaxCondition = 1e12;

  /// Throws SingularBasis if the condition number exceeds kMaxCondition.
  OverlapMatrix(const ProjectorSet& ps, std::vector<int> subset);

  const RealMatrix& matrix() const { return s_; }
  const std::vector<int>& subset() const { return subset_; }
  double condition_number() const { return condition_; }
  RealVector solve(const RealVector& rhs) const { return llt_.solve(rhs); }

 private:
  std::vector<int> subset_;
  RealMatrix s_;
  Eigen::LLT<RealMatrix> llt_;
  double condition_ = 0.0;
};

OverlapMatrix overlap_matrix(const ProjectorSet& ps, const std::vector<int>& subset);

/// Reconstructs C_0 I + sum_lambda C_lambda P_lambda from probabilities on the
/// independent subset. The result has unit trace but need not be positive.
HermitianMatrix linear_inversion(const RealVector& probabilities, const ProjectorSet& ps);

}  // namespace vqt
