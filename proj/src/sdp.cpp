#include "vqt/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vqt/error.hpp"

namespace vqt::sdp {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Everything rewritten as equalities: A(X) + B x = b with x >= 0, where the
// orthant holds the user's variables followed by one slack per inequality.
struct StandardForm {
  Eigen::Index d = 0;       // PSD block size
  Eigen::Index n = 0;       // orthant size
  Eigen::Index m = 0;       // rows kept after presolve
  ComplexMatrix a_cols;     // d^2 x m, column i = vec(A_i)
  SparseMatrix b_mat;       // m x n
  RealVector rhs;           // m
  ComplexMatrix c_psd;      // d x d
  RealVector c_lin;         // n
  std::vector<Eigen::Index> kept;  // original row of each kept row
  // Rows whose A_i = sign * v v^dagger, and the remaining general rows.
  std::vector<Eigen::Index> rank_one_rows;
  ComplexMatrix rank_one_vecs;  // d x (number of rank-one rows)
  RealVector rank_one_signs;
  std::vector<Eigen::Index> general_rows;
};

// Detects A = sign * v v^dagger for Hermitian A.
bool rank_one_factor(const ComplexMatrix& a, ComplexVector& v, double& sign) {
  if (a.size() == 0) return false;
  Eigen::Index j = 0;
  const double top = a.diagonal().real().cwiseAbs().maxCoeff(&j);
  if (!(top > 0.0)) return false;
  sign = a(j, j).real() > 0.0 ? 1.0 : -1.0;
  v = a.col(j) * (sign / std::sqrt(top));
  const double err = (a - sign * v * v.adjoint()).cwiseAbs().maxCoeff();
  return err <= 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff());
}

double functional_value(const ComplexMatrix& psd, const RealVector& lin, const ComplexMatrix& X,
                        const RealVector& x) {
  double v = 0.0;
  if (psd.size() > 0 && X.size() > 0) v += (psd.cwiseProduct(X.transpose())).sum().real();
  if (lin.size() > 0) v += lin.dot(x.head(lin.size()));
  return v;
}

ComplexMatrix matrix_of(const ComplexMatrix& cols, Eigen::Index j, Eigen::Index d) {
  return Eigen::Map<const ComplexMatrix>(cols.col(j).data(), d, d);
}

// Largest step alpha with S + alpha dS PSD, given the Cholesky factor of S.
// Iterations without a 30% gap reduction before giving up.
constexpr int kNoProgressIters = 12;

double max_step_psd(const Eigen::LLT<ComplexMatrix>& chol, const ComplexMatrix& ds) {
  if (ds.size() == 0) return kInf;
  const auto& l = chol.matrixL();
  ComplexMatrix t = l.solve(ds);
  t = l.solve(t.adjoint().eval()).adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (t + t.adjoint()), Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  return lo < 0.0 ? -1.0 / lo : kInf;
}

double max_step_lin(const RealVector& v, const RealVector& dv) {
  double alpha = kInf;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  }
  return alpha;
}

// Builds the equality-only form and removes linearly dependent rows. Returns
// false and fills `farkas` when the equality system itself is inconsistent.
bool build_standard_form(const ConicProgram& p, StandardForm& sf, RealVector& farkas) {
  const Eigen::Index d = p.psd_dim;
  const Eigen::Index n_user = p.nonneg_count;
  const Eigen::Index n_eq = static_cast<Eigen::Index>(p.equalities.size());
  const Eigen::Index n_in = static_cast<Eigen::Index>(p.inequalities.size());
  const Eigen::Index m_all = n_eq + n_in;
  const Eigen::Index n = n_user + n_in;

  ComplexMatrix a_all = ComplexMatrix::Zero(d * d, m_all);
  RealMatrix b_all = RealMatrix::Zero(m_all, n);
  RealVector rhs_all(m_all);
  auto fill_row = [&](Eigen::Index row, const LinearFunctional& f, double rhs) {
    if (f.psd.size() > 0 && d > 0) {
      a_all.col(row) = Eigen::Map<const ComplexVector>(f.psd.data(), d * d);
    }
    if (f.nonneg.size() > 0) b_all.row(row).head(n_user) = f.nonneg.transpose();
    rhs_all(row) = rhs;
  };
  for (Eigen::Index i = 0; i < n_eq; ++i) fill_row(i, p.equalities[i].f, p.equalities[i].rhs);
  for (Eigen::Index k = 0; k < n_in; ++k) {
    const auto& ineq = p.inequalities[k];
    fill_row(n_eq + k, ineq.f, ineq.rhs);
    b_all(n_eq + k, n_user + k) = ineq.sense == Sense::GreaterEqual ? -1.0 : 1.0;
  }

  // A row owning an orthant column no other row touches cannot take part in
  // a linear dependency, so only the remaining rows go through the QR.
  std::vector<Eigen::Index> kept;
  std::vector<Eigen::Index> shared;
  {
    std::vector<int> col_count(static_cast<std::size_t>(n), 0);
    for (Eigen::Index c = 0; c < n; ++c) col_count[c] = static_cast<int>((b_all.col(c).array() != 0.0).count());
    for (Eigen::Index i = 0; i < m_all; ++i) {
      bool owns = false;
      for (Eigen::Index c = 0; c < n && !owns; ++c) owns = b_all(i, c) != 0.0 && col_count[c] == 1;
      (owns ? kept : shared).push_back(i);
    }
  }

  if (!shared.empty()) {
    // Rank-revealing QR on the real coordinates of each shared row.
    const auto m_sh = static_cast<Eigen::Index>(shared.size());
    RealMatrix coords(2 * d * d + n, m_sh);
    RealVector rhs_sh(m_sh);
    for (Eigen::Index j = 0; j < m_sh; ++j) {
      if (d > 0) {
        coords.col(j).head(d * d) = a_all.col(shared[j]).real();
        coords.col(j).segment(d * d, d * d) = a_all.col(shared[j]).imag();
      }
      coords.col(j).tail(n) = b_all.row(shared[j]).transpose();
      rhs_sh(j) = rhs_all(shared[j]);
    }
    Eigen::ColPivHouseholderQR<RealMatrix> qr(coords);
    qr.setThreshold(1e-11);
    const Eigen::Index rank = qr.rank();
    const auto& perm = qr.colsPermutation().indices();
    if (rank < m_sh) {
      const auto r11 = qr.matrixR().topLeftCorner(rank, rank).template triangularView<Eigen::Upper>();
      RealVector b_indep(rank);
      for (Eigen::Index k = 0; k < rank; ++k) b_indep(k) = rhs_sh(perm(k));
      const double scale = 1.0 + rhs_sh.cwiseAbs().maxCoeff();
      for (Eigen::Index j = rank; j < m_sh; ++j) {
        const RealVector col = qr.matrixR().block(0, j, rank, 1);
        const RealVector coeff = r11.solve(col);
        const double mismatch = rhs_sh(perm(j)) - coeff.dot(b_indep);
        if (std::abs(mismatch) > 1e-9 * scale) {
          // y = e_j - sum_k coeff_k e_k has A^T y = 0 and b^T y = mismatch.
          farkas = RealVector::Zero(m_all);
          farkas(shared[perm(j)]) = 1.0;
          for (Eigen::Index k = 0; k < rank; ++k) farkas(shared[perm(k)]) -= coeff(k);
          farkas /= mismatch;
          return false;
        }
      }
    }
    for (Eigen::Index k = 0; k < rank; ++k) kept.push_back(shared[perm(k)]);
  }
  std::sort(kept.begin(), kept.end());

  sf.d = d;
  sf.n = n;
  sf.m = static_cast<Eigen::Index>(kept.size());
  sf.kept = kept;
  sf.a_cols.resize(d * d, sf.m);
  sf.rhs.resize(sf.m);
  std::vector<Triplet> triplets;
  for (Eigen::Index r = 0; r < sf.m; ++r) {
    sf.a_cols.col(r) = a_all.col(kept[r]);
    sf.rhs(r) = rhs_all(kept[r]);
    for (Eigen::Index c = 0; c < n; ++c) {
      if (b_all(kept[r], c) != 0.0) triplets.emplace_back(r, c, b_all(kept[r], c));
    }
  }
  sf.b_mat.resize(sf.m, n);
  sf.b_mat.setFromTriplets(triplets.begin(), triplets.end());

  std::vector<ComplexVector> vecs;
  std::vector<double> signs;
  for (Eigen::Index r = 0; r < sf.m && d > 0; ++r) {
    ComplexVector v;
    double sign = 1.0;
    if (rank_one_factor(matrix_of(sf.a_cols, r, d), v, sign)) {
      sf.rank_one_rows.push_back(r);
      vecs.push_back(v);
      signs.push_back(sign);
    } else {
      sf.general_rows.push_back(r);
    }
  }
  sf.rank_one_vecs.resize(d, static_cast<Eigen::Index>(vecs.size()));
  sf.rank_one_signs.resize(static_cast<Eigen::Index>(signs.size()));
  for (std::size_t k = 0; k < vecs.size(); ++k) {
    sf.rank_one_vecs.col(static_cast<Eigen::Index>(k)) = vecs[k];
    sf.rank_one_signs(static_cast<Eigen::Index>(k)) = signs[k];
  }

  sf.c_psd = d > 0 && p.objective.psd.size() > 0 ? ComplexMatrix(p.objective.psd)
                                                 : ComplexMatrix::Zero(d, d);
  sf.c_lin = RealVector::Zero(n);
  if (p.objective.nonneg.size() > 0) sf.c_lin.head(n_user) = p.objective.nonneg;
  return true;
}

class InteriorPoint {
 public:
  InteriorPoint(const StandardForm& sf, const SolverSettings& s) : sf_(sf), s_(s) {}

  ConicSolution run();

  const ComplexMatrix& X() const { return X_; }
  const RealVector& x() const { return x_; }
  const RealVector& y() const { return y_; }

 private:
  RealVector apply_a(const ComplexMatrix& M) const {
    if (sf_.d == 0) return RealVector::Zero(sf_.m);
    const Eigen::Map<const ComplexVector> v(M.data(), M.size());
    return (sf_.a_cols.adjoint() * v).real();
  }
  ComplexMatrix apply_a_adjoint(const RealVector& y) const {
    if (sf_.d == 0) return ComplexMatrix(0, 0);
    const ComplexVector v = sf_.a_cols * y.cast<Complex>();
    return Eigen::Map<const ComplexMatrix>(v.data(), sf_.d, sf_.d);
  }
  static double inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.size() == 0) return 0.0;
    return (a.cwiseProduct(b.conjugate())).sum().real();
  }

  struct Direction {
    ComplexMatrix dX, dZ;
    RealVector dx, dz, dy;
  };

  bool factor_schur();
  Direction direction(double sigma_mu, const Direction* affine, const ComplexMatrix& Rd,
                      const RealVector& rd, const RealVector& rp) const;

  const StandardForm& sf_;
  const SolverSettings& s_;

  ComplexMatrix X_, Z_, Zinv_;
  RealVector x_, z_, y_;
  Eigen::LLT<RealMatrix> schur_;
};

bool InteriorPoint::factor_schur() {
  const Eigen::Index d = sf_.d;
  const Eigen::Index m = sf_.m;
  RealMatrix M = RealMatrix::Zero(m, m);
  if (d > 0 && m > 0) {
    // M_ij = Re Tr(A_i X A_j Z^-1). For A_i = s_i v_i v_i^dagger this is
    // s_i s_j Re[(v_i^dagger X v_j)(v_j^dagger Z^-1 v_i)].
    const auto& r1 = sf_.rank_one_rows;
    const auto& gen = sf_.general_rows;
    const auto n1 = static_cast<Eigen::Index>(r1.size());
    const auto ng = static_cast<Eigen::Index>(gen.size());
    if (n1 > 0) {
      const ComplexMatrix& v = sf_.rank_one_vecs;
      const ComplexMatrix px = v.adjoint() * X_ * v;
      const ComplexMatrix pz = v.adjoint() * Zinv_ * v;
      const RealMatrix block = px.cwiseProduct(pz.transpose()).real();
      const RealVector& s = sf_.rank_one_signs;
      for (Eigen::Index j = 0; j < n1; ++j) {
        for (Eigen::Index i = 0; i < n1; ++i) M(r1[i], r1[j]) = s(i) * s(j) * block(i, j);
      }
    }
    if (ng > 0) {
      ComplexMatrix g(d * d, ng);
      for (Eigen::Index j = 0; j < ng; ++j) {
        const ComplexMatrix gj = X_ * matrix_of(sf_.a_cols, gen[j], d) * Zinv_;
        g.col(j) = Eigen::Map<const ComplexVector>(gj.data(), d * d);
      }
      const RealMatrix cross = (sf_.a_cols.adjoint() * g).real();  // m x ng
      for (Eigen::Index j = 0; j < ng; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) M(i, gen[j]) = cross(i, j);
      }
      // Rows i of rank-one type in the general columns were filled above; copy
      // them across so M is symmetric.
      for (Eigen::Index j = 0; j < ng; ++j) {
        for (Eigen::Index i = 0; i < n1; ++i) M(gen[j], r1[i]) = cross(r1[i], j);
      }
    }
    M = 0.5 * (M + M.transpose()).eval();
  }
  if (sf_.n > 0) {
    const RealVector ratio = x_.cwiseQuotient(z_);
    const SparseMatrix scaled = sf_.b_mat * ratio.asDiagonal();
    M += RealMatrix(scaled * sf_.b_mat.transpose());
  }
  const double diag_max = m > 0 ? M.diagonal().cwiseAbs().maxCoeff() : 0.0;
  schur_.compute(M);
  double reg = 1e-15 * std::max(1.0, diag_max);
  while (schur_.info() != Eigen::Success) {
    if (reg > 1e-8 * std::max(1.0, diag_max)) return false;
    RealMatrix shifted = M;
    shifted.diagonal().array() += reg;
    schur_.compute(shifted);
    reg *= 100.0;
  }
  return true;
}

InteriorPoint::Direction InteriorPoint::direction(double sigma_mu, const Direction* affine,
                                                  const ComplexMatrix& Rd, const RealVector& rd,
                                                  const RealVector& rp) const {
  const Eigen::Index d = sf_.d;
  Direction dir;
  // HKM: dX = sym[(sigma mu I - dXa dZa - X dZ) Z^-1] - X with dZ = Rd - A^*(dy).
  ComplexMatrix K;
  if (d > 0) {
    ComplexMatrix t = sigma_mu * ComplexMatrix::Identity(d, d) - X_ * Rd;
    if (affine) t -= affine->dX * affine->dZ;
    K = t * Zinv_;
    K = 0.5 * (K + K.adjoint()).eval() - X_;
  }
  RealVector k;
  if (sf_.n > 0) {
    RealVector comp = RealVector::Constant(sf_.n, sigma_mu);
    if (affine) comp -= affine->dx.cwiseProduct(affine->dz);
    k = comp.cwiseQuotient(z_) - x_ - x_.cwiseQuotient(z_).cwiseProduct(rd);
  }
  RealVector rhs = rp;
  if (d > 0) rhs -= apply_a(K);
  if (sf_.n > 0) rhs -= sf_.b_mat * k;
  dir.dy = schur_.solve(rhs);

  if (d > 0) {
    dir.dZ = Rd - apply_a_adjoint(dir.dy);
    ComplexMatrix t = X_ * apply_a_adjoint(dir.dy) * Zinv_;
    dir.dX = K + 0.5 * (t + t.adjoint());
  }
  if (sf_.n > 0) {
    dir.dz = rd - sf_.b_mat.transpose() * dir.dy;
    dir.dx = k + x_.cwiseQuotient(z_).cwiseProduct(sf_.b_mat.transpose() * dir.dy);
  }
  return dir;
}

ConicSolution InteriorPoint::run() {
  const Eigen::Index d = sf_.d;
  const Eigen::Index n = sf_.n;
  const Eigen::Index m = sf_.m;
  const double nu = static_cast<double>(d + n);

  // Identity-scaled starting point.
  double a_max = 0.0;
  double xi = 10.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double row_norm = sf_.a_cols.col(i).norm();
    if (n > 0) row_norm += RealVector(sf_.b_mat.row(i).transpose()).norm();
    a_max = std::max(a_max, row_norm);
    xi = std::max(xi, (1.0 + std::abs(sf_.rhs(i))) / (1.0 + row_norm) * std::sqrt(nu));
  }
  const double c_norm = std::sqrt(sf_.c_psd.squaredNorm() + sf_.c_lin.squaredNorm());
  const double eta = std::max({10.0, std::sqrt(nu), c_norm, a_max});
  X_ = xi * ComplexMatrix::Identity(d, d);
  Z_ = eta * ComplexMatrix::Identity(d, d);
  x_ = RealVector::Constant(n, xi);
  z_ = RealVector::Constant(n, eta);
  y_ = RealVector::Zero(m);

  const double b_scale = 1.0 + sf_.rhs.norm();
  const double c_scale = 1.0 + c_norm;

  ConicSolution out;
  out.status = Status::MaxIterations;
  double step_p = 1.0;
  double step_d = 1.0;
  int stalled = 0;
  double best_gap = kInf;
  int best_iter = 0;

  for (int iter = 0; iter <= s_.max_iters; ++iter) {
    const RealVector rp = sf_.rhs - apply_a(X_) - (n > 0 ? RealVector(sf_.b_mat * x_) : RealVector::Zero(m));
    const ComplexMatrix Rd = d > 0 ? ComplexMatrix(sf_.c_psd - apply_a_adjoint(y_) - Z_) : ComplexMatrix();
    const RealVector rd = n > 0 ? RealVector(sf_.c_lin - sf_.b_mat.transpose() * y_ - z_) : RealVector();
    const double pobj = inner(sf_.c_psd, X_) + (n > 0 ? sf_.c_lin.dot(x_) : 0.0);
    const double dobj = sf_.rhs.dot(y_);
    const double comp = inner(X_, Z_) + (n > 0 ? x_.dot(z_) : 0.0);
    const double pres = rp.norm() / b_scale;
    const double dres = std::sqrt((d > 0 ? Rd.squaredNorm() : 0.0) + (n > 0 ? rd.squaredNorm() : 0.0)) / c_scale;
    const double denom = 1.0 + std::abs(pobj) + std::abs(dobj);
    const double gap = std::max(std::abs(pobj - dobj), comp) / denom;

    out.history.push_back({iter, pobj, dobj, comp, pres, dres, step_p, step_d});
    out.iterations = iter;
    out.objective_value = pobj;
    out.dual_objective = dobj;
    out.gap = gap;
    out.primal_residual = pres;
    out.dual_residual = dres;

    if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(comp)) {
      out.status = Status::NumericalFailure;
      out.message = "non-finite iterate";
      return out;
    }
    if (gap <= s_.gap_tol && pres <= s_.feas_tol && dres <= s_.feas_tol) {
      out.status = Status::Optimal;
      return out;
    }

    // Infeasibility rays. A feasible primal X bounds the ray violation below
    // by 1 / (Tr X + sum x), so tiny violations only occur on diverging iterates.
    if (dobj > 0.0) {
      const RealVector ray = y_ / dobj;
      double viol = 0.0;
      if (d > 0) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(apply_a_adjoint(ray), Eigen::EigenvaluesOnly);
        viol = std::max(viol, eig.eigenvalues().maxCoeff());
      }
      if (n > 0) viol = std::max(viol, RealVector(sf_.b_mat.transpose() * ray).maxCoeff());
      if (viol <= s_.feas_tol && dobj > 1e3 * std::max(1.0, std::abs(pobj))) {
        out.status = Status::PrimalInfeasible;
        out.message = "dual objective diverged along a Farkas ray";
        return out;
      }
    }
    if (pobj < 0.0) {
      const double scale = -pobj;
      const RealVector ray_res = (apply_a(X_) + (n > 0 ? RealVector(sf_.b_mat * x_) : RealVector::Zero(m))) / scale;
      if (ray_res.norm() <= s_.feas_tol && scale > 1e3 * std::max(1.0, std::abs(dobj))) {
        out.status = Status::DualInfeasible;
        out.message = "primal objective unbounded along a recession ray";
        return out;
      }
    }
    if (iter == s_.max_iters) break;

    Eigen::LLT<ComplexMatrix> z_chol;
    Eigen::LLT<ComplexMatrix> x_chol;
    if (d > 0) {
      z_chol.compute(Z_);
      x_chol.compute(X_);
      if (z_chol.info() != Eigen::Success || x_chol.info() != Eigen::Success) {
        out.status = Status::NumericalFailure;
        out.message = "iterate left the PSD cone";
        return out;
      }
      Zinv_ = z_chol.solve(ComplexMatrix::Identity(d, d));
      Zinv_ = 0.5 * (Zinv_ + Zinv_.adjoint()).eval();
    }
    if (!factor_schur()) {
      out.status = Status::NumericalFailure;
      out.message = "Schur complement is numerically singular";
      return out;
    }

    const double mu = comp / nu;
    auto step_lengths = [&](const Direction& dir) {
      double ap = std::min(max_step_psd(x_chol, dir.dX), max_step_lin(x_, dir.dx));
      double ad = std::min(max_step_psd(z_chol, dir.dZ), max_step_lin(z_, dir.dz));
      return std::pair{ap, ad};
    };

    // Predictor.
    const Direction aff = direction(0.0, nullptr, Rd, rd, rp);
    auto [ap_aff, ad_aff] = step_lengths(aff);
    ap_aff = std::min(1.0, ap_aff);
    ad_aff = std::min(1.0, ad_aff);
    double comp_aff = 0.0;
    if (d > 0) comp_aff += inner(X_ + ap_aff * aff.dX, Z_ + ad_aff * aff.dZ);
    if (n > 0) comp_aff += (x_ + ap_aff * aff.dx).dot(z_ + ad_aff * aff.dz);
    const double ratio = std::max(0.0, comp_aff) / comp;
    const double sigma = std::clamp(ratio * ratio * ratio, 0.0, 1.0);

    // Corrector.
    const Direction dir = direction(sigma * mu, &aff, Rd, rd, rp);
    if (!dir.dy.allFinite()) {
      out.status = Status::NumericalFailure;
      out.message = "search direction is not finite";
      return out;
    }
    auto [ap, ad] = step_lengths(dir);
    const double gamma = std::min(s_.step_fraction, 0.9 + 0.09 * std::min(step_p, step_d));
    step_p = std::min(1.0, gamma * ap);
    step_d = std::min(1.0, gamma * ad);

    // Near a degenerate optimum the full step can land on the numerical
    // boundary of the cone; shorten it, and keep the last interior iterate if
    // even short steps fail.
    const ComplexMatrix X_prev = X_;
    const ComplexMatrix Z_prev = Z_;
    bool interior = false;
    for (int attempt = 0; attempt < 4 && !interior; ++attempt) {
      if (d > 0) {
        X_ = X_prev + step_p * dir.dX;
        X_ = 0.5 * (X_ + X_.adjoint()).eval();
        Z_ = Z_prev + step_d * dir.dZ;
        Z_ = 0.5 * (Z_ + Z_.adjoint()).eval();
        interior = Eigen::LLT<ComplexMatrix>(X_).info() == Eigen::Success &&
                   Eigen::LLT<ComplexMatrix>(Z_).info() == Eigen::Success;
      } else {
        interior = true;
      }
      if (!interior) {
        step_p *= 0.5;
        step_d *= 0.5;
      }
    }
    if (!interior) {
      X_ = X_prev;
      Z_ = Z_prev;
      out.message = "iterates reached the numerical boundary of the cone";
      break;
    }
    if (n > 0) {
      x_ += step_p * dir.dx;
      z_ += step_d * dir.dz;
    }
    y_ += step_d * dir.dy;

    // Only a feasible iterate can stall on the gap; infeasible programs keep
    // the gap large while the rays diverge.
    if (gap < 0.7 * best_gap || pres > s_.feas_tol || dres > s_.feas_tol) {
      best_gap = std::min(best_gap, gap);
      best_iter = iter;
    } else if (iter - best_iter >= kNoProgressIters) {
      out.message = "no progress in the duality gap";
      break;
    }
    stalled = (step_p < 1e-8 && step_d < 1e-8) ? stalled + 1 : 0;
    if (stalled >= 3) {
      out.message = "step lengths stalled";
      break;
    }
  }
  if (out.message.empty()) out.message = "iteration limit reached";
  return out;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::PrimalInfeasible: return "PrimalInfeasible";
    case Status::DualInfeasible: return "DualInfeasible";
    case Status::MaxIterations: return "MaxIterations";
    case Status::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

void SolverSettings::validate() const {
  if (!(gap_tol > 0.0) || !(feas_tol > 0.0) || max_iters <= 0) {
    throw InvalidInput("solver tolerances and iteration limit must be positive");
  }
  if (!(step_fraction > 0.0 && step_fraction < 1.0)) {
    throw InvalidInput("step_fraction must lie in (0, 1)");
  }
}

void ConicProgram::validate() const {
  if (psd_dim < 0 || nonneg_count < 0) throw InvalidInput("negative block size");
  if (psd_dim == 0 && nonneg_count == 0) throw InvalidInput("program has no variables");
  auto check = [&](const LinearFunctional& f, const std::string& what) {
    if (f.psd.size() > 0) {
      if (f.psd.rows() != psd_dim || f.psd.cols() != psd_dim) {
        throw InvalidInput(what + ": PSD coefficient has wrong shape");
      }
      if (hermitian_defect(f.psd) > kHermitianTol * std::max(1.0, f.psd.cwiseAbs().maxCoeff())) {
        throw InvalidInput(what + ": PSD coefficient is not Hermitian");
      }
    }
    if (f.nonneg.size() > 0 && f.nonneg.size() != nonneg_count) {
      throw InvalidInput(what + ": orthant coefficient has wrong length");
    }
  };
  check(objective, "objective");
  for (std::size_t i = 0; i < equalities.size(); ++i) check(equalities[i].f, "equality " + std::to_string(i));
  for (std::size_t i = 0; i < inequalities.size(); ++i) check(inequalities[i].f, "inequality " + std::to_string(i));
}

double ConicProgram::evaluate(const LinearFunctional& f, const ComplexMatrix& X, const RealVector& x) const {
  return functional_value(f.psd, f.nonneg, X, x);
}

ConicSolution solve(const ConicProgram& program, const SolverSettings& settings) {
  program.validate();
  settings.validate();

  const auto n_eq = static_cast<Eigen::Index>(program.equalities.size());
  const auto n_in = static_cast<Eigen::Index>(program.inequalities.size());

  StandardForm sf;
  RealVector farkas;
  ConicSolution out;
  if (!build_standard_form(program, sf, farkas)) {
    out.status = Status::PrimalInfeasible;
    out.message = "equality constraints are inconsistent";
    out.dual = farkas;
    out.psd = ComplexMatrix::Zero(program.psd_dim, program.psd_dim);
    out.nonneg = RealVector::Zero(program.nonneg_count);
    out.slacks = RealVector::Zero(n_in);
    return out;
  }

  InteriorPoint ipm(sf, settings);
  out = ipm.run();

  RealVector y_full = RealVector::Zero(n_eq + n_in);
  for (Eigen::Index r = 0; r < sf.m; ++r) y_full(sf.kept[r]) = ipm.y()(r);
  if (out.status == Status::PrimalInfeasible) y_full /= sf.rhs.dot(ipm.y());
  out.dual = y_full;
  out.psd = ipm.X();
  out.nonneg = ipm.x().head(program.nonneg_count);
  if (out.status == Status::DualInfeasible) {
    const double scale = -out.objective_value;
    out.psd /= scale;
    out.nonneg /= scale;
  }
  out.slacks = ipm.x().tail(n_in);
  return out;
}

KktResiduals kkt_residuals(const ConicProgram& p, const ConicSolution& sol) {
  KktResiduals r;
  const auto n_eq = p.equalities.size();
  const ComplexMatrix X = p.psd_dim > 0 ? sol.psd : ComplexMatrix();
  const RealVector& x = sol.nonneg;

  double b_max = 0.0;
  double primal = 0.0;
  for (const auto& e : p.equalities) {
    b_max = std::max(b_max, std::abs(e.rhs));
    primal = std::max(primal, std::abs(p.evaluate(e.f, X, x) - e.rhs));
  }
  for (const auto& in : p.inequalities) {
    b_max = std::max(b_max, std::abs(in.rhs));
    const double lhs = p.evaluate(in.f, X, x);
    const double viol = in.sense == Sense::GreaterEqual ? in.rhs - lhs : lhs - in.rhs;
    primal = std::max(primal, viol);
  }
  if (p.psd_dim > 0) primal = std::max(primal, -min_eigenvalue(X));
  if (x.size() > 0) primal = std::max(primal, -x.minCoeff());
  r.primal = std::max(0.0, primal) / (1.0 + b_max);

  // Dual slack Z = C - sum y_i A_i, z = c - sum y_i a_i.
  ComplexMatrix Z = p.psd_dim > 0 ? ComplexMatrix(ComplexMatrix::Zero(p.psd_dim, p.psd_dim)) : ComplexMatrix();
  RealVector z = RealVector::Zero(p.nonneg_count);
  if (p.psd_dim > 0 && p.objective.psd.size() > 0) Z += p.objective.psd;
  if (p.objective.nonneg.size() > 0) z += p.objective.nonneg;
  double dual = 0.0;
  double dobj = 0.0;
  auto subtract = [&](const LinearFunctional& f, double yi) {
    if (p.psd_dim > 0 && f.psd.size() > 0) Z -= yi * f.psd;
    if (f.nonneg.size() > 0) z -= yi * f.nonneg;
  };
  for (std::size_t i = 0; i < n_eq; ++i) {
    subtract(p.equalities[i].f, sol.dual(i));
    dobj += sol.dual(i) * p.equalities[i].rhs;
  }
  for (std::size_t k = 0; k < p.inequalities.size(); ++k) {
    const double yk = sol.dual(n_eq + k);
    subtract(p.inequalities[k].f, yk);
    dobj += yk * p.inequalities[k].rhs;
    dual = std::max(dual, p.inequalities[k].sense == Sense::GreaterEqual ? -yk : yk);
  }
  if (p.psd_dim > 0) dual = std::max(dual, -min_eigenvalue(Z));
  if (z.size() > 0) dual = std::max(dual, -z.minCoeff());
  double c_max = 0.0;
  if (p.objective.psd.size() > 0) c_max = p.objective.psd.cwiseAbs().maxCoeff();
  if (p.objective.nonneg.size() > 0) c_max = std::max(c_max, p.objective.nonneg.cwiseAbs().maxCoeff());
  r.dual = std::max(0.0, dual) / (1.0 + c_max);

  const double pobj = p.evaluate(p.objective, X, x);
  r.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
  return r;
}

}  // namespace vqt::sdp
