#pragma once

#include <cstdint>
#include <random>

namespace mulpart {

/// Reproducible random stream identified by (seed, stream index).
///
/// The engine is std::mt19937_64 seeded through std::seed_seq with the four
/// 32-bit halves of seed and stream. Variates are produced by the transforms
/// below rather than <random> distributions, whose algorithms vary between
/// standard libraries.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  std::uint64_t next() { return eng_(); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// P(j) = (1 - q) q^j, j >= 0.
  long long geometric(double q);
  long long poisson(double lambda);
  /// Gamma(shape, 1).
  double gamma(double shape);
  /// P(j) = C(shape + j - 1, j) q^j (1 - q)^shape.
  long long negative_binomial(double shape, double q);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 eng_;
};

}  // namespace mulpart
