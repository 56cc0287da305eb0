#pragma once

#include <cstdint>
#include <cmath>

namespace kac {

// Philox4x32-10 counter-based generator. A stream is identified by
// (seed, stream); distinct stream ids give statistically independent
// sequences, which is how ensembles derive one stream per trajectory.
// All distributions are generated by explicit arithmetic on the raw
// 64-bit output so sequences are bit-reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)) {
    ctr_[0] = 0;
    ctr_[1] = 0;
    ctr_[2] = static_cast<std::uint32_t>(stream);
    ctr_[3] = static_cast<std::uint32_t>(stream >> 32);
    refill();
  }

  std::uint64_t next_u64() {
    if (idx_ > 2) refill();
    std::uint64_t lo = out_[idx_];
    std::uint64_t hi = out_[idx_ + 1];
    idx_ += 2;
    return lo | (hi << 32);
  }

  // Uniform on [0,1) with 53 random bits.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe as a log argument.
  double u01_open() { return 1.0 - u01(); }

  double exponential(double rate) { return -std::log(u01_open()) / rate; }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  // Standard normal via Box-Muller; the pair is cached.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u = u01_open();
    double v = u01();
    double r = std::sqrt(-2.0 * std::log(u));
    double a = 6.283185307179586476925286766559 * v;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [0, n), n > 0. Rejection-free modulo bias is
  // avoided by rejecting the top partial stripe.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

 private:
  static std::uint32_t mulhi(std::uint32_t a, std::uint32_t b, std::uint32_t* lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    *lo = static_cast<std::uint32_t>(p);
    return static_cast<std::uint32_t>(p >> 32);
  }

  void refill() {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    std::uint32_t x0 = ctr_[0], x1 = ctr_[1], x2 = ctr_[2], x3 = ctr_[3];
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint32_t lo0, lo1;
      std::uint32_t hi0 = mulhi(kM0, x0, &lo0);
      std::uint32_t hi1 = mulhi(kM1, x2, &lo1);
      std::uint32_t y0 = hi1 ^ x1 ^ k0;
      std::uint32_t y1 = lo1;
      std::uint32_t y2 = hi0 ^ x3 ^ k1;
      std::uint32_t y3 = lo0;
      x0 = y0;
      x1 = y1;
      x2 = y2;
      x3 = y3;
      k0 += kW0;
      k1 += kW1;
    }
    out_[0] = x0;
    out_[1] = x1;
    out_[2] = x2;
    out_[3] = x3;
    if (++ctr_[0] == 0 && ++ctr_[1] == 0) ++ctr_[2];
    idx_ = 0;
  }

  std::uint32_t key0_, key1_;
  std::uint32_t ctr_[4];
  std::uint32_t out_[4];
  int idx_ = 4;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace kac
