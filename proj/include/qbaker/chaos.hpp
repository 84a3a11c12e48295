#pragma once

// Chaotic keystream material: the sine-chaotified Henon map, Chebyshev
// polynomials, plaintext-dependent seeds and rank permutations.

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "qbaker/brqmi.hpp"

namespace qbaker {

struct HenonSineParams {
  static constexpr double kA = 1.4;
  static constexpr double kB = 0.3;

  double lambda1 = 2.0;
  double lambda2 = 2.0;

  // Both controls must exceed 1 for key use.
  void validate() const;
  friend bool operator==(const HenonSineParams&, const HenonSineParams&) = default;
};

struct ChaosState {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const ChaosState&, const ChaosState&) = default;
};

// x' = sin(pi l1 (1 - a x^2 + y)),  y' = sin(pi l2 b x)
ChaosState henon_sine_step(ChaosState s, const HenonSineParams& p);

// T_k(x) = cos(k arccos x). Throws std::domain_error for |x| > 1 or NaN.
double chebyshev(std::uint64_t k, double x);

struct SeedMaterial {
  std::uint64_t intensity_sum = 0;  // sum of all pixel values of the real images
  std::uint64_t bit_count = 0;      // number of set bits in the bit-plane stack
  int image_count = 1;              // M'
  int bit_depth = 8;                // L
  int n = 0;
  double x0 = 0.0;
  double y0 = 1.0;

  // x0 = intensity_sum / (M' (2^L - 1) 2^{2n}),  y0 = T_{bit_count}(x0)
  static SeedMaterial from_sums(std::uint64_t intensity_sum, std::uint64_t bit_count, int image_count,
                                int bit_depth, int n);
};

SeedMaterial derive_seed(const MultiImage& img, const BitPlaneStack& stack);

inline constexpr std::uint64_t kBurnIn = 100;
inline constexpr std::uint64_t kDistinctBudget = 10'000'000;

struct DistinctSequences {
  std::vector<double> xs;
  std::vector<double> ys;
  std::uint64_t iterations = 0;
};

// Discards kBurnIn iterates, then collects iterates skipping values bitwise
// equal to one already collected, until both lists hold `count` values.
// Throws std::runtime_error when `budget` iterations are not enough.
DistinctSequences distinct_sequence(ChaosState seed, const HenonSineParams& p, std::size_t count,
                                    std::uint64_t budget = kDistinctBudget);

// 1-based rank of every value within the sorted list. Throws on duplicates.
std::vector<std::uint32_t> rank_positions(std::span<const double> values);

struct RankPerms {
  std::vector<std::uint32_t> s;  // s[i] = rank of xs[i]
  std::vector<std::uint32_t> t;  // t[j] = rank of ys[j]
  std::vector<double> xs;
  std::vector<double> ys;
};

RankPerms rank_perms(std::vector<double> xs, std::vector<double> ys);

// floor(T_{s_i}(y_{N-i+1}) * T_{t_j}(x_{N-j+1}) * 10^q) for 1-based i, j <= N.
std::int64_t key_value(const RankPerms& perms, std::size_t i, std::size_t j, int q);

// Bit l of (v mod 2^{2^k}) with a nonnegative (Euclidean) residue.
inline std::uint8_t key_bit(std::int64_t v, unsigned l) {
  return static_cast<std::uint8_t>(l >= 63 ? (v < 0 ? 1 : 0) : (static_cast<std::uint64_t>(v) >> l) & 1u);
}

// The 2^k key bits for pixel (i, j), bit l at index l.
std::vector<std::uint8_t> key_bits(const RankPerms& perms, std::size_t i, std::size_t j, int q, int k);

struct LyapunovEstimate {
  double exponent = 0.0;
  std::uint64_t skipped = 0;  // iterates where the derivative was exactly zero
};

// Mean of ln|f'(x_i)| over `iterations` iterates after a kBurnIn transient.
// Requires iterations >= 10^4.
LyapunovEstimate lyapunov_estimate(const std::function<double(double)>& f,
                                   const std::function<double(double)>& df, double x0,
                                   std::uint64_t iterations);

// Largest exponent of the 2D Henon-sine map by tangent-vector renormalization.
LyapunovEstimate henon_sine_lyapunov(const HenonSineParams& p, ChaosState seed, std::uint64_t iterations);

// CSV "i,x,y" with `count` rows, the first being the seed.
void write_trajectory_csv(std::ostream& out, const HenonSineParams& p, ChaosState seed, std::size_t count);

// CSV "x,T0,...,T<k_max>" with one row per grid point.
void write_chebyshev_csv(std::ostream& out, std::uint64_t k_max, std::span<const double> grid);

}  // namespace qbaker
