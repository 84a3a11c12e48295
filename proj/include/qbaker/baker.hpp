#pragma once

// Discrete baker maps on the 2^n x 2^n integer lattice.
//
// A partition splits the x-range [0, 2^n) into consecutive blocks of widths
// 2^q1, ..., 2^qk. Block i (x in [N_{i-1}, N_i)) is stretched along x by
// 2^(n-qi) and flattened along y:
//
//   x' = 2^(n-qi) (x - N_{i-1}) + y mod 2^(n-qi)
//   y' = N_{i-1} + floor(y / 2^(n-qi))
//
// Only admissible partitions (2^qi divides N_{i-1} for every i) are applied.
// On those, block i acts as the bit shuffle
//   M_s(x, y) = (x_{s-1..0} y_{n-s-1..0}, x_{n-1..s} y_{n-1..n-s}),  s = qi.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qbaker/bigint.hpp"

namespace qbaker {

// P_16 already has about 12k decimal digits.
inline constexpr int kMaxBakerExponent = 16;

struct Point {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

class BakerPartition {
 public:
  BakerPartition() = default;

  // Throws std::invalid_argument unless sum(2^q) == 2^n.
  static BakerPartition from_exponents(int n, std::vector<int> exponents);
  // Each width must be a power of two; n is inferred from the total.
  static BakerPartition from_widths(const std::vector<std::uint64_t>& widths);
  // Comma-separated block widths, e.g. "16,8,8,32,64,128".
  static BakerPartition parse(std::string_view text);

  // The single-block partition (2^n); acts as the identity.
  static BakerPartition identity(int n) { return from_exponents(n, {n}); }

  int n() const { return n_; }
  const std::vector<int>& exponents() const { return exponents_; }
  std::size_t block_count() const { return exponents_.size(); }
  std::uint64_t width(std::size_t i) const { return std::uint64_t{1} << exponents_[i]; }
  std::vector<std::uint64_t> widths() const;

  // N_i for i in [0, block_count()]; N_0 = 0.
  std::uint64_t prefix(std::size_t i) const { return prefix_[i]; }

  bool admissible() const { return admissible_; }

  // Block index i (0-based) with N_i <= x < N_{i+1}.
  std::size_t block_of(std::uint64_t x) const;

  std::string to_string() const;

  friend bool operator==(const BakerPartition& a, const BakerPartition& b) {
    return a.n_ == b.n_ && a.exponents_ == b.exponents_;
  }

 private:
  int n_ = 0;
  std::vector<int> exponents_;
  std::vector<std::uint64_t> prefix_;
  bool admissible_ = false;
};

bool is_admissible(const BakerPartition& part);

// P_n = P_{n-1}^2 + 1, P_0 = 1.
BigInt count_partitions(int n);

// Bijection [0, P_n) -> admissible partitions of 2^n. Index 0 is the single
// block; index i >= 1 with i - 1 = a * P_{n-1} + b is the concatenation of
// unrank(n-1, a) and unrank(n-1, b). Throws std::out_of_range for i >= P_n.
BakerPartition unrank(int n, const BigInt& index);

// Inverse of unrank.
BigInt rank(const BakerPartition& part);

// Throws std::invalid_argument for inadmissible partitions or points off the lattice.
Point apply(const BakerPartition& part, Point p);
Point apply_inverse(const BakerPartition& part, Point p);
Point iterate(const BakerPartition& part, Point p, std::uint64_t rounds);

// M_s in bit form on the 2^n lattice.
Point bit_shuffle(int n, int s, Point p);

// table[x * 2^n + y] = linear index of the r-fold image of (x, y).
std::vector<std::uint32_t> permutation_table(const BakerPartition& part, std::uint64_t rounds = 1);

}  // namespace qbaker
