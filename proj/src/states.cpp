#include "vqt/states.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "vqt/error.hpp"

namespace vqt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

ComplexMatrix gaussian_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

}  // namespace

void NoiseModel::validate() const {
  if (!(level >= 0.0 && level < 1.0)) {
    throw InvalidInput("noise level must lie in [0, 1), got " + std::to_string(level));
  }
}

ComplexMatrix swap_operator(int d) {
  if (d < 2) throw InvalidInput("swap_operator requires d >= 2");
  ComplexMatrix f = ComplexMatrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) f(j * d + i, i * d + j) = 1.0;
  }
  return f;
}

DensityMatrix werner_state(double beta, int d) {
  if (!(beta >= -1.0 && beta <= 1.0)) {
    throw InvalidInput("Werner parameter must lie in [-1, 1]");
  }
  const double norm = static_cast<double>(d) * d + d * beta;
  ComplexMatrix rho = (ComplexMatrix::Identity(d * d, d * d) + beta * swap_operator(d)) / norm;
  return DensityMatrix::project(rho);
}

DensityMatrix random_pure(int d, std::uint64_t seed) {
  if (d < 2) throw InvalidInput("random_pure requires d >= 2");
  return DensityMatrix::pure(gaussian_matrix(d, 1, seed).col(0));
}

DensityMatrix random_density(int d, int rank, std::uint64_t seed) {
  if (rank < 1 || rank > d) throw InvalidInput("rank must lie in [1, d]");
  const ComplexMatrix g = gaussian_matrix(d, rank, seed);
  const ComplexMatrix w = g * g.adjoint();
  return DensityMatrix::project(w / w.trace().real());
}

RealVector exact_probabilities(const DensityMatrix& rho, const ProjectorSet& ps) {
  if (rho.dim() != ps.dim()) throw InvalidInput("exact_probabilities: dimension mismatch");
  RealVector p(ps.size());
  for (int l = 0; l < ps.num_classes(); ++l) {
    const ComplexMatrix& u = ps.class_basis(l);
    // diag(U^dagger rho U)
    const ComplexMatrix rotated = u.adjoint() * rho.matrix() * u;
    for (int i = 0; i < ps.dim(); ++i) p(ps.flat_index(l, i)) = std::max(0.0, rotated(i, i).real());
  }
  return p;
}

double noise_draw(const NoiseModel& model, int lambda) {
  if (model.kind == NoiseKind::None || model.level == 0.0) return 0.0;
  const std::uint64_t bits =
      splitmix64(splitmix64(model.seed) ^ static_cast<std::uint64_t>(lambda));
  const double unit = static_cast<double>(bits >> 11) * 0x1.0p-53;
  return model.level * (2.0 * unit - 1.0);
}

std::vector<MeasurementRecord> noisy_frequencies(const RealVector& probabilities,
                                                 const std::vector<int>& lambdas,
                                                 const NoiseModel& model) {
  model.validate();
  const double level = model.kind == NoiseKind::None ? 0.0 : model.level;
  std::vector<MeasurementRecord> out;
  out.reserve(lambdas.size());
  for (int lambda : lambdas) {
    if (lambda < 0 || lambda >= probabilities.size()) {
      throw InvalidInput("record index out of range");
    }
    const double p = std::max(0.0, probabilities(lambda));
    out.push_back({lambda, p * (1.0 + noise_draw(model, lambda)), level * p});
  }
  return out;
}

std::vector<MeasurementRecord> noisy_frequencies(const RealVector& probabilities,
                                                 const NoiseModel& model) {
  std::vector<int> all(static_cast<std::size_t>(probabilities.size()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return noisy_frequencies(probabilities, all, model);
}

}  // namespace vqt
