#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "specindex/types.hpp"

namespace specindex {

/// Seeded generator used for every randomized check. Draws are built from
/// raw mt19937_64 output so sequences are identical across standard
/// libraries (the std distributions are not).
class Rng {
 public:
  static constexpr std::string_view kName = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }

  /// Standard normal via Box-Muller.
  double normal();

  Complex complex_normal() { return {normal(), normal()}; }

  /// Uniform in the closed disk |z| <= radius.
  Complex in_disk(double radius);

  CMatrix gaussian_matrix(Index rows, Index cols);

  /// Gaussian matrix rescaled to spectral norm `norm`.
  CMatrix matrix_with_norm(Index rows, Index cols, double norm);

  CMatrix hermitian_matrix(Index n);

  /// n x m with orthonormal columns (m <= n).
  CMatrix orthonormal_columns(Index n, Index m);

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace specindex
