#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace gcilab {

using Seed = std::uint64_t;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for an independent stream; stable across platforms.
inline Seed derive_seed(Seed seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// FNV-1a over values; -0.0 and +0.0 hash alike so geometrically equal inputs share streams.
class ContentHash {
 public:
  ContentHash& add(double v) {
    if (v == 0.0) v = 0.0;
    return add_bits(std::bit_cast<std::uint64_t>(v));
  }
  ContentHash& add(std::span<const double> vs) {
    add_bits(vs.size());
    for (double v : vs) add(v);
    return *this;
  }
  ContentHash& add(std::string_view s) {
    for (char c : s) mix(static_cast<unsigned char>(c));
    return add_bits(s.size());
  }
  ContentHash& add_bits(std::uint64_t bits) {
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(bits >> (8 * i)));
    return *this;
  }
  std::uint64_t value() const { return h_; }

 private:
  void mix(unsigned char c) {
    h_ ^= c;
    h_ *= 0x100000001b3ULL;
  }
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

/// 53-bit uniform in [0,1).
inline double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

/// Standard normal by the polar method; self-contained so streams do not depend on the
/// standard library's distribution implementation.
class NormalSampler {
 public:
  explicit NormalSampler(Seed seed) : gen_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01(gen_) - 1.0;
      v = 2.0 * uniform01(gen_) - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gcilab
