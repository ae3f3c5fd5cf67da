#pragma once

// Dense complex linear algebra used throughout the toolkit. Matrices are small
// (d <= 64), so everything is plain dense Eigen.

#include <Eigen/Dense>
#include <complex>
#include <utility>

namespace vqt {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kTraceTol = 1e-10;

/// Largest elementwise deviation |M - M^dagger|.
double hermitian_defect(const ComplexMatrix& m);

/// (M + M^dagger) / 2.
ComplexMatrix symmetrize(const ComplexMatrix& m);

/// A square complex matrix equal to its conjugate transpose.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  /// Validates Hermiticity within kHermitianTol; throws InvalidInput otherwise.
  explicit HermitianMatrix(ComplexMatrix m);

  /// Symmetrizes first, for solver outputs that carry small asymmetry.
  static HermitianMatrix symmetrized(const ComplexMatrix& m);

  static HermitianMatrix identity(Eigen::Index dim);
  static HermitianMatrix zero(Eigen::Index dim);

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }

 private:
  struct Unchecked {};
  HermitianMatrix(ComplexMatrix m, Unchecked) : m_(std::move(m)) {}

  ComplexMatrix m_;
};

/// Trace-one positive-semidefinite Hermitian matrix.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  /// Validates Hermiticity (1e-12), unit trace (1e-10) and min eigenvalue >= -1e-9.
  explicit DensityMatrix(ComplexMatrix m);

  /// Symmetrizes, clips eigenvalues below zero and renormalizes the trace.
  /// Throws NotPositiveSemidefinite if an eigenvalue is below -tol, or
  /// InvalidInput if the clipped trace vanishes.
  static DensityMatrix project(const ComplexMatrix& m, double tol = kPsdTol);

  static DensityMatrix maximally_mixed(Eigen::Index dim);
  static DensityMatrix pure(const ComplexVector& psi);

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  HermitianMatrix hermitian() const { return HermitianMatrix(m_); }

 private:
  ComplexMatrix m_;
};

struct EigenDecomposition {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // columns are the eigenvectors
};

EigenDecomposition herm_eig(const HermitianMatrix& m);

/// Checks Hermiticity of a raw matrix first (InvalidInput on failure).
EigenDecomposition herm_eig(const ComplexMatrix& m);

/// Smallest eigenvalue of the symmetrized matrix.
double min_eigenvalue(const ComplexMatrix& m);

/// Principal square root. With clip_negative, eigenvalues in [-1e-9, 0) are
/// taken as zero; otherwise any negative eigenvalue raises NotPositiveSemidefinite.
HermitianMatrix matrix_sqrt(const HermitianMatrix& m, bool clip_negative = true);

/// Uhlmann fidelity Tr sqrt(sqrt(a) b sqrt(a)) (root form, in [0, 1]).
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

/// (1/2) Tr|a - b|.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Tr|m| of a Hermitian matrix.
double trace_norm(const HermitianMatrix& m);

/// Tr(a^2).
double purity(const DensityMatrix& a);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

enum class Subsystem { A, B };

struct BipartiteDims {
  Eigen::Index a = 0;
  Eigen::Index b = 0;
  Eigen::Index total() const { return a * b; }
};

/// Transposes the indices of one tensor factor of an operator on C^dA (x) C^dB.
ComplexMatrix partial_transpose(const ComplexMatrix& m, BipartiteDims dims,
                                Subsystem subsystem = Subsystem::B);

}  // namespace vqt
