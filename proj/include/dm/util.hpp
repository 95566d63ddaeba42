/**
 * util.hpp — seeded RNG streams, dB/linear conversion, 2D geometry.
 *
 * The RNG is a splitmix64 core with explicit uniform/Gaussian sampling so
 * that identical seeds produce bit-identical streams on any platform
 * (std:: distributions are implementation-defined). stream_seed() derives
 * independent per-purpose streams from one world seed, which keeps world
 * randomness identical across handover policies.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <algorithm>

namespace dm::util {

/// All dB <-> linear conversions in the project go through these two.
inline double lin_from_db(double db) { return std::pow(10.0, db / 10.0); }
inline double db_from_lin(double lin) { return 10.0 * std::log10(lin); }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

struct Rect {
  double x_min = 0.0, y_min = 0.0, x_max = 0.0, y_max = 0.0;
  bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  Vec2 clamp(Vec2 p) const {
    return {std::clamp(p.x, x_min, x_max), std::clamp(p.y, y_min, y_max)};
  }
};

/// Derive an independent stream seed from a base seed and stream indices
/// (golden-ratio mixing). Same (base, ids) always yields the same stream.
inline std::uint64_t stream_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t z = base;
  for (std::uint64_t v : {a, b, c}) {
    z += 0x9e3779b97f4a7c15ULL + v;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
  }
  return z;
}

/// Deterministic seeded random stream (splitmix64 core).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  /// Standard normal via Box–Muller. Always consumes exactly two uniforms
  /// (no cached second value) so draw counts per call are fixed.
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

  /// Unit-mean exponential (Rayleigh fading power gain).
  double exponential() {
    double u = uniform();
    if (u < 1e-300) u = 1e-300;
    return -std::log(u);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace dm::util
