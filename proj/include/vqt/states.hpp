#pragma once

#include <cstdint>
#include <vector>

#include "vqt/bases.hpp"
#include "vqt/linalg.hpp"

namespace vqt {

/// Algorithm names recorded in experiment metadata.
inline constexpr const char* kStateRngAlgorithm = "mt19937_64 with std::normal_distribution";
inline constexpr const char* kNoiseRngAlgorithm = "splitmix64(seed, lambda) -> uniform[0,1)";

enum class NoiseKind { None, UniformMultiplicative };

struct NoiseModel {
  NoiseKind kind = NoiseKind::None;
  double level = 0.0;  // maximum relative error, in [0, 1)
  std::uint64_t seed = 0;

  /// Throws InvalidInput when level is outside [0, 1).
  void validate() const;
};

/// One measured frequency for projector `lambda` with its declared noise bound.
struct MeasurementRecord {
  int lambda = 0;
  double frequency = 0.0;
  double epsilon = 0.0;

  bool operator==(const MeasurementRecord&) const = default;
};

/// F|ij> = |ji> on C^d (x) C^d.
ComplexMatrix swap_operator(int d);

/// (I + beta F) / (d^2 + d beta); throws InvalidInput for beta outside [-1, 1].
DensityMatrix werner_state(double beta, int d = 3);

/// |v><v| for v with i.i.d. standard complex Gaussian entries, normalized.
DensityMatrix random_pure(int d, std::uint64_t seed);

/// G G^dagger / Tr(G G^dagger) for a d x rank complex Gaussian G.
DensityMatrix random_density(int d, int rank, std::uint64_t seed);

/// p_lambda = Tr(rho P_lambda) for every projector of the set.
RealVector exact_probabilities(const DensityMatrix& rho, const ProjectorSet& ps);

/// frequency = p (1 + u) with u uniform on [-level, level], drawn from a
/// sub-seed derived from (seed, lambda); epsilon = level * p. Records are
/// indexed 0..size-1.
std::vector<MeasurementRecord> noisy_frequencies(const RealVector& probabilities,
                                                 const NoiseModel& model);

/// Same, but only for the listed projector indices.
std::vector<MeasurementRecord> noisy_frequencies(const RealVector& probabilities,
                                                 const std::vector<int>& lambdas,
                                                 const NoiseModel& model);

/// The uniform draw in [-level, level] used for projector lambda.
double noise_draw(const NoiseModel& model, int lambda);

}  // namespace vqt
