#pragma once

// Shared helpers for the unit and acceptance suites.

#include <random>
#include <string>
#include <vector>

#include "npc/decider.hpp"
#include "npc/lattice.hpp"

namespace npc::testing {

inline ProjectivePoint pp(long p, long q) { return ProjectivePoint::of(p, q); }

inline GluingData instance(std::pair<long, long> b0, std::vector<std::pair<long, long>> f,
                           std::pair<long, long> bl) {
  RawGluingData raw{{b0.first, b0.second}, {}, {bl.first, bl.second}};
  for (auto [p, q] : f) raw.f.push_back({p, q});
  return validate_instance(raw);
}

// n = 0: swap of the standard basis.
inline GluingData swap_instance() { return instance({1, 0}, {{0, 1}, {1, 0}}, {0, 1}); }

// n = 1 instance with the identity form as witness.
inline GluingData n1_feasible_instance() {
  return instance({1, 0}, {{0, 1}, {1, 1}, {0, 1}}, {1, 0});
}

inline long gcd_l(long a, long b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b) {
    long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Extended Euclid: returns (x, y) with a*x + b*y = gcd(a, b).
inline std::pair<long, long> ext_gcd(long a, long b) {
  long x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    long q = a / b;
    long t = a - q * b;
    a = b;
    b = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
    t = y0 - q * y1;
    y0 = y1;
    y1 = t;
  }
  if (a < 0) return {-x0, -y0};
  return {x0, y0};
}

class InstanceGenerator {
 public:
  InstanceGenerator(std::uint64_t seed, long bound, std::size_t max_n)
      : rng_(seed), bound_(bound), max_n_(max_n) {}

  std::pair<long, long> primitive() {
    std::uniform_int_distribution<long> c(-bound_, bound_);
    for (;;) {
      long p = c(rng_), q = c(rng_);
      if ((p != 0 || q != 0) && gcd_l(p, q) == 1) return {p, q};
    }
  }

  // A partner b with |det(b, f)| = 1 and entries within the bound, if any.
  std::optional<std::pair<long, long>> partner(std::pair<long, long> f) {
    // det(b, f) = b.p * f.q - b.q * f.p = 1
    auto [x, y] = ext_gcd(f.second, -f.first);
    std::vector<std::pair<long, long>> options;
    for (long k = -4 * bound_; k <= 4 * bound_; ++k) {
      long bp = x + k * f.first, bq = y + k * f.second;
      if (bp >= -bound_ && bp <= bound_ && bq >= -bound_ && bq <= bound_) {
        options.push_back({bp, bq});
      }
    }
    if (options.empty()) return std::nullopt;
    auto pick = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng_)];
    if (std::bernoulli_distribution(0.5)(rng_)) pick = {-pick.first, -pick.second};
    return pick;
  }

  GluingData next() {
    for (;;) {
      const std::size_t n = std::uniform_int_distribution<std::size_t>(0, max_n_)(rng_);
      std::vector<std::pair<long, long>> f;
      f.push_back(primitive());
      while (f.size() < n + 2) {
        auto c = primitive();
        if (pp(c.first, c.second) != pp(f.back().first, f.back().second)) f.push_back(c);
      }
      auto b0 = partner(f.front());
      auto bl = partner(f.back());
      if (!b0 || !bl) continue;
      return instance(*b0, f, *bl);
    }
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  long bound_;
  std::size_t max_n_;
};

// Random unimodular matrix as a product of elementary moves.
inline std::array<long, 4> random_unimodular(std::mt19937_64& rng) {
  std::array<long, 4> m{1, 0, 0, 1};
  std::uniform_int_distribution<int> move(0, 3);
  std::uniform_int_distribution<long> k(-2, 2);
  for (int s = 0; s < 4; ++s) {
    const long t = k(rng);
    switch (move(rng)) {
      case 0: m = {m[0] + t * m[2], m[1] + t * m[3], m[2], m[3]}; break;
      case 1: m = {m[0], m[1], m[2] + t * m[0], m[3] + t * m[1]}; break;
      case 2: m = {m[2], m[3], m[0], m[1]}; break;
      default: m = {-m[0], -m[1], m[2], m[3]}; break;
    }
  }
  return m;
}

inline GluingData apply(const GluingData& d, const std::array<long, 4>& m) {
  return transform(d, m[0], m[1], m[2], m[3]);
}

}  // namespace npc::testing
