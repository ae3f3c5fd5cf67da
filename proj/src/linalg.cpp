#include "vqt/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vqt/error.hpp"

namespace vqt {

double hermitian_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

ComplexMatrix symmetrize(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

HermitianMatrix::HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw InvalidInput("Hermitian matrix must be square and non-empty");
  }
  const double defect = hermitian_defect(m_);
  if (defect > kHermitianTol) {
    throw InvalidInput("matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  }
}

HermitianMatrix HermitianMatrix::symmetrized(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidInput("Hermitian matrix must be square and non-empty");
  }
  return HermitianMatrix(symmetrize(m), Unchecked{});
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index dim) {
  return HermitianMatrix(ComplexMatrix::Identity(dim, dim), Unchecked{});
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index dim) {
  return HermitianMatrix(ComplexMatrix::Zero(dim, dim), Unchecked{});
}

namespace {

EigenDecomposition eig_unchecked(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("Hermitian eigendecomposition did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix reassemble(const ComplexMatrix& vectors, const RealVector& values) {
  return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  HermitianMatrix h(m_);
  const double tr = h.trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw InvalidInput("density matrix trace is " + std::to_string(tr));
  }
  const double lo = eig_unchecked(m_).values(0);
  if (lo < -kPsdTol) {
    throw NotPositiveSemidefinite("density matrix has eigenvalue " + std::to_string(lo));
  }
}

DensityMatrix DensityMatrix::project(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidInput("density matrix must be square and non-empty");
  }
  auto [values, vectors] = eig_unchecked(symmetrize(m));
  if (values(0) < -tol) {
    throw NotPositiveSemidefinite("eigenvalue " + std::to_string(values(0)) +
                                  " below tolerance");
  }
  values = values.cwiseMax(0.0);
  const double total = values.sum();
  if (!(total > 0.0)) throw InvalidInput("matrix has zero trace after clipping");
  values /= total;
  DensityMatrix out;
  out.m_ = symmetrize(reassemble(vectors, values));
  return out;
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  DensityMatrix out;
  out.m_ = ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
  return out;
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw InvalidInput("pure state vector is zero");
  const ComplexVector v = psi / norm;
  DensityMatrix out;
  out.m_ = v * v.adjoint();
  return out;
}

EigenDecomposition herm_eig(const HermitianMatrix& m) { return eig_unchecked(m.matrix()); }

EigenDecomposition herm_eig(const ComplexMatrix& m) { return herm_eig(HermitianMatrix(m)); }

double min_eigenvalue(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

HermitianMatrix matrix_sqrt(const HermitianMatrix& m, bool clip_negative) {
  auto [values, vectors] = herm_eig(m);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) < 0.0) {
      if (!clip_negative || values(i) < -kPsdTol) {
        throw NotPositiveSemidefinite("matrix_sqrt: eigenvalue " + std::to_string(values(i)));
      }
      values(i) = 0.0;
    }
  }
  return HermitianMatrix::symmetrized(reassemble(vectors, values.cwiseSqrt()));
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidInput("fidelity: dimension mismatch");
  const ComplexMatrix root = matrix_sqrt(a.hermitian()).matrix();
  const ComplexMatrix inner = symmetrize(root * b.matrix() * root);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(inner, Eigen::EigenvaluesOnly);
  // eigenvalues at rounding level would contribute their square root, so drop them
  const RealVector& ev = solver.eigenvalues();
  const double floor = 4.0 * static_cast<double>(ev.size()) * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, ev.cwiseAbs().maxCoeff());
  double total = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > floor) total += std::sqrt(ev(i));
  }
  return total;
}

double trace_norm(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidInput("trace_distance: dimension mismatch");
  return 0.5 * trace_norm(HermitianMatrix::symmetrized(a.matrix() - b.matrix()));
}

double purity(const DensityMatrix& a) { return a.matrix().squaredNorm(); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, BipartiteDims dims, Subsystem subsystem) {
  const Eigen::Index n = dims.total();
  if (dims.a <= 0 || dims.b <= 0 || m.rows() != n || m.cols() != n) {
    throw InvalidInput("partial_transpose: matrix is not (dA*dB) x (dA*dB)");
  }
  ComplexMatrix out(n, n);
  for (Eigen::Index ia = 0; ia < dims.a; ++ia) {
    for (Eigen::Index ib = 0; ib < dims.b; ++ib) {
      for (Eigen::Index ja = 0; ja < dims.a; ++ja) {
        for (Eigen::Index jb = 0; jb < dims.b; ++jb) {
          const Eigen::Index row = ia * dims.b + ib;
          const Eigen::Index col = ja * dims.b + jb;
          if (subsystem == Subsystem::B) {
            out(ia * dims.b + jb, ja * dims.b + ib) = m(row, col);
          } else {
            out(ja * dims.b + ib, ia * dims.b + jb) = m(row, col);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace vqt
