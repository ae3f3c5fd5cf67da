#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "vqt/error.hpp"
#include "vqt/states.hpp"
#include "vqt/witness.hpp"

using namespace vqt;

namespace {

// Over trace-one W = P + Q^Gamma, Tr(W rho) = Tr(P rho) + Tr(Q rho^Gamma) with
// Tr P + Tr Q = 1, so the optimum is the smaller of the two minimal eigenvalues.
double closed_form_value(const ComplexMatrix& rho, BipartiteDims dims) {
  const ComplexMatrix pt = partial_transpose(rho, dims);
  return std::min(gen::min_eig(rho), gen::min_eig((pt + pt.adjoint()) * 0.5));
}

DensityMatrix bell() {
  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  return DensityMatrix::pure(phi);
}

void check_structure(const WitnessResult& w, BipartiteDims dims) {
  CHECK(w.witness.trace() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(gen::min_eig(w.p) >= -1e-8);
  CHECK(gen::min_eig(w.q) >= -1e-8);
  const ComplexMatrix rebuilt = w.p + partial_transpose(w.q, dims);
  CHECK(gen::max_abs(rebuilt / rebuilt.trace().real() - w.witness.matrix()) <= 1e-8);
  CHECK(std::abs((w.p + w.q).trace().real() - 1.0) <= 1e-8);
}

}  // namespace

TEST_SUITE("witness") {

TEST_CASE("product states have no negative witness value") {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = 1.0;
  const auto w = decomposable_witness(DensityMatrix::pure(v), {2, 2});
  CHECK(w.value >= -1e-9);
  CHECK(w.entanglement == 0.0);
  check_structure(w, {2, 2});
}

TEST_CASE("Bell state witness") {
  const auto w = decomposable_witness(bell(), {2, 2});
  CHECK(w.value == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(w.gap <= 1e-7);
  check_structure(w, {2, 2});
  // The closed-form witness 1/2 I - |phi+><phi+| is feasible with value -1/2.
  const ComplexMatrix closed = 0.5 * ComplexMatrix::Identity(4, 4) - bell().matrix();
  CHECK(closed.trace().real() == doctest::Approx(1.0));
  const ComplexMatrix q = partial_transpose(closed, {2, 2});
  CHECK(gen::min_eig(q) >= -1e-12);  // W = 0 + Q^Gamma with Q PSD
  CHECK((closed * bell().matrix()).trace().real() == doctest::Approx(-0.5));
}

TEST_CASE("two-qutrit Werner witness values") {
  const double e = entanglement_value(werner_state(-0.8), {3, 3});
  CHECK(e == doctest::Approx(-0.21).epsilon(0.02 / 0.21));
  CHECK(std::abs(e - closed_form_value(werner_state(-0.8).matrix(), {3, 3})) <= 1e-7);
  CHECK(std::abs(entanglement_value(werner_state(-1.0 / 3.0), {3, 3})) <= 1e-6);
  CHECK(entanglement_value(werner_state(0.5), {3, 3}) == 0.0);
}

TEST_CASE("witness value is bounded by the maximally mixed witness") {
  gen::Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const BipartiteDims dims{rng.integer(2, 3), rng.integer(2, 3)};
    const auto n = dims.total();
    const auto w = decomposable_witness(DensityMatrix(rng.density(n)), dims);
    CHECK(w.value <= 1.0 / static_cast<double>(n) + 1e-9);
  }
}

TEST_CASE("witness agrees with the PPT criterion on random states") {
  gen::Rng rng(62);
  for (BipartiteDims dims : {BipartiteDims{2, 2}, BipartiteDims{2, 3}}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto n = dims.total();
      const ComplexMatrix rho = rng.density(n, rng.integer(1, static_cast<int>(n)));
      const ComplexMatrix pt = partial_transpose(rho, dims);
      const bool npt = gen::min_eig((pt + pt.adjoint()) * 0.5) < -1e-7;
      const auto w = decomposable_witness(DensityMatrix(rho), dims);
      CHECK((w.value < -1e-7) == npt);
      CHECK(std::abs(w.value - closed_form_value(rho, dims)) <= 1e-7);
      CHECK(w.gap <= 1e-7);
    }
  }
}

TEST_CASE("depolarizing never makes the witness value more negative") {
  gen::Rng rng(63);
  for (int trial = 0; trial < 10; ++trial) {
    const BipartiteDims dims{2, 3};
    const ComplexMatrix rho = rng.density(6, rng.integer(1, 3));
    double previous = -1.0;
    for (int k = 0; k <= 4; ++k) {
      const double t = 0.25 * k;
      const ComplexMatrix mixed = (1 - t) * rho + t * ComplexMatrix::Identity(6, 6) / 6.0;
      const double v = decomposable_witness(DensityMatrix::project(mixed), dims).value;
      CHECK(v >= previous - 1e-8);
      previous = v;
    }
  }
}

TEST_CASE("entanglement fraction") {
  const DensityMatrix truth = werner_state(-0.8);
  CHECK(entanglement_fraction(truth, truth, {3, 3}) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(entanglement_fraction(DensityMatrix::maximally_mixed(9), truth, {3, 3}) == 0.0);
  CHECK_THROWS_AS(entanglement_fraction(truth, werner_state(0.2), {3, 3}), UndefinedFraction);
}

TEST_CASE("witness rejects mismatched dimensions") {
  CHECK_THROWS_AS(decomposable_witness(werner_state(-0.8), {2, 3}), InvalidInput);
}

}  // TEST_SUITE
