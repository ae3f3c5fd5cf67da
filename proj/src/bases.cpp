#include "vqt/bases.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "vqt/error.hpp"
#include "vqt/galois.hpp"

namespace vqt {

ProjectorSet::ProjectorSet(Eigen::Index dim, std::vector<ComplexMatrix> classes,
                           ConstructionInfo info)
    : dim_(dim), classes_(std::move(classes)), info_(std::move(info)) {
  if (dim_ < 1) throw InvalidInput("projector set dimension must be positive");
  const ComplexMatrix eye = ComplexMatrix::Identity(dim_, dim_);
  for (std::size_t l = 0; l < classes_.size(); ++l) {
    const auto& u = classes_[l];
    if (u.rows() != dim_ || u.cols() != dim_) {
      throw InvalidInput("class " + std::to_string(l) + " is not d x d");
    }
    const double defect = (u.adjoint() * u - eye).cwiseAbs().maxCoeff();
    if (defect > 1e-10) {
      throw InvalidInput("class " + std::to_string(l) + " is not an orthonormal basis");
    }
  }
}

ProjectorIndex ProjectorSet::locate(int lambda) const {
  if (lambda < 0 || lambda >= size()) {
    throw InvalidInput("projector index " + std::to_string(lambda) + " out of range");
  }
  const int d = static_cast<int>(dim_);
  return {lambda / d, lambda % d};
}

ComplexVector ProjectorSet::vector(int lambda) const {
  const auto [cls, member] = locate(lambda);
  return classes_[cls].col(member);
}

ComplexMatrix ProjectorSet::projector(int lambda) const {
  const ComplexVector e = vector(lambda);
  return e * e.adjoint();
}

std::vector<int> ProjectorSet::independent_subset() const {
  std::vector<int> out;
  out.reserve(classes_.size() * (dim_ - 1));
  for (int l = 0; l < num_classes(); ++l) {
    for (int i = 0; i + 1 < dim_; ++i) out.push_back(flat_index(l, i));
  }
  return out;
}

std::vector<int> ProjectorSet::class_members(int cls) const {
  if (cls < 0 || cls >= num_classes()) throw InvalidInput("class index out of range");
  std::vector<int> out;
  for (int i = 0; i < dim_; ++i) out.push_back(flat_index(cls, i));
  return out;
}

namespace {

// Odd characteristic: |v^b_a>_x = omega^{tr(b x^2 + a x)} / sqrt(d).
std::vector<ComplexMatrix> odd_mub_classes(const GaloisField& f) {
  const int d = f.order();
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  const double phase = 2.0 * std::numbers::pi / f.characteristic();
  std::vector<ComplexMatrix> classes;
  for (int b = 0; b < d; ++b) {
    ComplexMatrix u(d, d);
    for (int a = 0; a < d; ++a) {
      for (int x = 0; x < d; ++x) {
        const int e = f.trace(f.add(f.mul(b, f.mul(x, x)), f.mul(a, x)));
        u(x, a) = std::polar(norm, phase * e);
      }
    }
    classes.push_back(std::move(u));
  }
  return classes;
}

// Characteristic two: class b is spanned by i^{Q_b(x)} (-1)^{a.x} / sqrt(d),
// where Q_b(x) = x^T M_b x over Z_4 and (M_b)_{jk} = tr(b t^j t^k) is the
// binary trace form. M_b - M_b' = M_{b+b'} is invertible for b != b', which
// makes the classes mutually unbiased.
std::vector<ComplexMatrix> even_mub_classes(const GaloisField& f) {
  const int d = f.order();
  const int n = f.degree();
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  static const Complex kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  std::vector<ComplexMatrix> classes;
  for (int b = 0; b < d; ++b) {
    std::vector<int> form(static_cast<std::size_t>(n * n));
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) form[j * n + k] = f.trace(f.mul(b, f.mul(1 << j, 1 << k)));
    }
    ComplexMatrix u(d, d);
    for (int x = 0; x < d; ++x) {
      int q = 0;
      for (int j = 0; j < n; ++j) {
        if (!((x >> j) & 1)) continue;
        q += form[j * n + j];
        for (int k = j + 1; k < n; ++k) {
          if ((x >> k) & 1) q += 2 * form[j * n + k];
        }
      }
      for (int a = 0; a < d; ++a) {
        const int sign = std::popcount(static_cast<unsigned>(a & x)) & 1;
        u(x, a) = norm * kPowersOfI[(q + 2 * sign) % 4];
      }
    }
    classes.push_back(std::move(u));
  }
  return classes;
}

// True when tr(b t^j t^k) = 0 for all j != k over the polynomial basis
// t^0..t^{n-1}. The phase of class b then splits over the base-p digits of x,
// so the class is a product basis of n qudits of dimension p.
bool diagonal_form(const GaloisField& f, int b) {
  const int n = f.degree();
  const int p = f.characteristic();
  std::vector<int> basis(static_cast<std::size_t>(n), 1);
  for (int j = 1; j < n; ++j) basis[j] = basis[j - 1] * p;
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      if (f.trace(f.mul(b, f.mul(basis[j], basis[k]))) != 0) return false;
    }
  }
  return true;
}

}  // namespace

ProjectorSet mub(int d) {
  const auto pp = prime_power(d);
  if (!pp) {
    throw UnsupportedDimension(std::to_string(d) +
                               " is not a prime power; use gell_mann_observables instead");
  }
  if (d > GaloisField::kMaxOrder) throw UnsupportedSize("MUB dimension exceeds 64");
  const GaloisField field = GaloisField::of_order(d);

  // Computational basis, then the other product bases (local measurements
  // only), then the rest; field-element order within each group.
  std::vector<ComplexMatrix> classes;
  classes.push_back(ComplexMatrix::Identity(d, d));
  auto rest = field.characteristic() == 2 ? even_mub_classes(field) : odd_mub_classes(field);
  for (int pass = 0; pass < 2; ++pass) {
    for (int b = 0; b < d; ++b) {
      if (diagonal_form(field, b) == (pass == 0)) classes.push_back(std::move(rest[b]));
    }
  }

  ConstructionInfo info;
  info.construction = field.characteristic() == 2 ? "mub-z4-quadratic-forms" : "mub-wootters-fields";
  info.field_polynomial = "GF(" + std::to_string(d) + "): " + field.modulus_string();
  return ProjectorSet(d, std::move(classes), std::move(info));
}

std::vector<HermitianMatrix> gell_mann_observables(int d) {
  if (d < 2) throw InvalidInput("gell_mann_observables requires d >= 2");
  std::vector<HermitianMatrix> out;
  out.push_back(HermitianMatrix::identity(d));
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      ComplexMatrix m = ComplexMatrix::Zero(d, d);
      m(j, k) = 1.0;
      m(k, j) = 1.0;
      out.emplace_back(std::move(m));
    }
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      ComplexMatrix m = ComplexMatrix::Zero(d, d);
      m(j, k) = Complex(0, -1);
      m(k, j) = Complex(0, 1);
      out.emplace_back(std::move(m));
    }
  }
  for (int l = 1; l < d; ++l) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    const double scale = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) m(j, j) = scale;
    m(l, l) = -scale * l;
    out.emplace_back(std::move(m));
  }
  return out;
}

ProjectorSet observables_to_projectors(const std::vector<HermitianMatrix>& observables) {
  if (observables.empty()) throw InvalidInput("no observables given");
  const Eigen::Index d = observables.front().dim();
  std::vector<ComplexMatrix> classes;
  classes.reserve(observables.size());
  for (const auto& o : observables) {
    if (o.dim() != d) throw InvalidInput("observables have mismatched dimensions");
    classes.push_back(herm_eig(o).vectors);
  }
  return ProjectorSet(d, std::move(classes), {"observable-eigenprojectors", ""});
}

RealMatrix gram_matrix(const ProjectorSet& ps, const std::vector<int>& subset) {
  const auto m = static_cast<Eigen::Index>(subset.size());
  ComplexMatrix vecs(ps.dim(), m);
  for (Eigen::Index i = 0; i < m; ++i) vecs.col(i) = ps.vector(subset[i]);
  // Tr(P_mu P_nu) = |<e_mu|e_nu>|^2
  return (vecs.adjoint() * vecs).cwiseAbs2();
}

OverlapMatrix::OverlapMatrix(const ProjectorSet& ps, std::vector<int> subset)
    : subset_(std::move(subset)), s_(gram_matrix(ps, subset_)) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(s_, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  condition_ = lo > 0.0 ? hi / lo : INFINITY;
  if (!(condition_ <= kMaxCondition)) {
    throw SingularBasis("overlap matrix condition number " + std::to_string(condition_) +
                        " exceeds 1e12");
  }
  llt_.compute(s_);
  if (llt_.info() != Eigen::Success) throw SingularBasis("overlap matrix factorization failed");
}

OverlapMatrix overlap_matrix(const ProjectorSet& ps, const std::vector<int>& subset) {
  return OverlapMatrix(ps, subset);
}

HermitianMatrix linear_inversion(const RealVector& probabilities, const ProjectorSet& ps) {
  const auto subset = ps.independent_subset();
  const Eigen::Index d = ps.dim();
  if (static_cast<Eigen::Index>(subset.size()) != d * d - 1) {
    throw InvalidInput("independent subset has " + std::to_string(subset.size()) +
                       " projectors, expected d^2-1");
  }
  if (probabilities.size() != static_cast<Eigen::Index>(subset.size())) {
    throw InvalidInput("probability vector length does not match the independent subset");
  }
  const OverlapMatrix s(ps, subset);

  // p = C_0 1 + S C with C_0 = (1 - 1^T C) / d. Writing u = S^-1 p and
  // w = S^-1 1 gives C = u - C_0 w and C_0 = (1 - 1^T u) / (d - 1^T w).
  const RealVector ones = RealVector::Ones(probabilities.size());
  const RealVector u = s.solve(probabilities);
  const RealVector w = s.solve(ones);
  const double denom = static_cast<double>(d) - w.sum();
  if (std::abs(denom) < 1e-12) throw SingularBasis("identity lies in the span of the subset");
  const double c0 = (1.0 - u.sum()) / denom;
  const RealVector coeffs = u - c0 * w;

  ComplexMatrix rho = c0 * ComplexMatrix::Identity(d, d);
  for (std::size_t i = 0; i < subset.size(); ++i) {
    const ComplexVector e = ps.vector(subset[i]);
    rho += coeffs(static_cast<Eigen::Index>(i)) * (e * e.adjoint());
  }
  return HermitianMatrix::symmetrized(rho);
}

}  // namespace vqt
