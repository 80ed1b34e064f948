#include "mulpart/rng.hpp"

#include <cmath>

#include "mulpart/errors.hpp"

namespace mulpart {

namespace {

std::seed_seq make_seq(std::uint64_t seed, std::uint64_t stream) {
  return std::seed_seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream),
                       std::uint32_t(stream >> 32)};
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Transformed rejection with squeeze (Hormann 1993), for lambda >= 10.
long long poisson_ptrs(RngStream& rng, double lam) {
  const double slam = std::sqrt(lam);
  const double loglam = std::log(lam);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double U = rng.uniform() - 0.5;
    const double V = rng.uniform();
    const double us = 0.5 - std::abs(U);
    const double k = std::floor((2.0 * a / us + b) * U + lam + 0.43);
    if (us >= 0.07 && V <= vr) return (long long)k;
    if (k < 0.0 || (us < 0.013 && V > us)) continue;
    if (std::log(V) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -lam + k * loglam - std::lgamma(k + 1.0))
      return (long long)k;
  }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  auto seq = make_seq(seed, stream);
  eng_.seed(seq);
}

double RngStream::uniform() {
  // 53 random bits, shifted off zero.
  return (double(eng_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  const double u1 = uniform(), u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

long long RngStream::geometric(double q) {
  if (!(q >= 0.0) || !(q < 1.0)) throw DomainError("geometric parameter must lie in [0, 1)");
  const double u = uniform();
  if (u > q) return 0;
  // P(R >= j) = P(U <= q^j)
  return (long long)std::floor(std::log(u) / std::log(q));
}

long long RngStream::poisson(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("Poisson mean must be finite and >= 0");
  if (lambda == 0.0) return 0;
  if (lambda >= 30.0) return poisson_ptrs(*this, lambda);
  double u = uniform();
  double p = std::exp(-lambda);
  long long k = 0;
  while (u > p) {
    u -= p;
    ++k;
    p *= lambda / double(k);
    if (p == 0.0) break;
  }
  return k;
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw DomainError("gamma shape must be > 0");
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) U^{1/a}
    return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
  }
  // Marsaglia and Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

long long RngStream::negative_binomial(double shape, double q) {
  if (!(shape > 0.0)) throw DomainError("negative binomial shape must be > 0");
  if (!(q >= 0.0) || !(q < 1.0)) throw DomainError("negative binomial parameter must lie in [0, 1)");
  if (q == 0.0) return 0;
  if (shape == std::floor(shape) && shape <= 8.0) {
    long long s = 0;
    for (int i = 0; i < int(shape); ++i) s += geometric(q);
    return s;
  }
  return poisson(gamma(shape) * q / (1.0 - q));
}

}  // namespace mulpart
