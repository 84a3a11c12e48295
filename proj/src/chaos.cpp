#include "qbaker/chaos.hpp"

#include <algorithm>
#include <bit>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace qbaker {

void HenonSineParams::validate() const {
  if (!(lambda1 > 1.0) || !(lambda2 > 1.0) || !std::isfinite(lambda1) || !std::isfinite(lambda2)) {
    throw std::invalid_argument("Henon-sine controls must be finite and greater than 1");
  }
}

ChaosState henon_sine_step(ChaosState s, const HenonSineParams& p) {
  const double henon_x = 1.0 - HenonSineParams::kA * s.x * s.x + s.y;
  const double henon_y = HenonSineParams::kB * s.x;
  return {std::sin(std::numbers::pi * p.lambda1 * henon_x), std::sin(std::numbers::pi * p.lambda2 * henon_y)};
}

double chebyshev(std::uint64_t k, double x) {
  if (!(x >= -1.0 && x <= 1.0)) throw std::domain_error("Chebyshev argument outside [-1, 1]");
  if (k == 0) return 1.0;
  // acos is ill-conditioned near +-1 and k multiplies its error, so binary64
  // loses ~1e-7 at k = 10^6. Software quad keeps it exact to double and is
  // bit-reproducible across platforms.
  using Quad = boost::multiprecision::cpp_bin_float_quad;
  const Quad theta = boost::multiprecision::acos(Quad(x));
  return static_cast<double>(boost::multiprecision::cos(Quad(k) * theta));
}

SeedMaterial SeedMaterial::from_sums(std::uint64_t intensity_sum, std::uint64_t bit_count, int image_count,
                                     int bit_depth, int n) {
  SeedMaterial seed;
  seed.intensity_sum = intensity_sum;
  seed.bit_count = bit_count;
  seed.image_count = image_count;
  seed.bit_depth = bit_depth;
  seed.n = n;
  const double max_value = std::ldexp(1.0, bit_depth) - 1.0;
  const double denominator = static_cast<double>(image_count) * max_value * std::ldexp(1.0, 2 * n);
  seed.x0 = static_cast<double>(intensity_sum) / denominator;
  if (!(seed.x0 >= 0.0 && seed.x0 <= 1.0)) throw std::invalid_argument("intensity sum exceeds the image maximum");
  seed.y0 = chebyshev(bit_count, seed.x0);
  return seed;
}

SeedMaterial derive_seed(const MultiImage& img, const BitPlaneStack& stack) {
  if (stack.n() != img.n || stack.image_count() != img.image_count() || stack.bit_depth() != img.bit_depth) {
    throw std::invalid_argument("bit-plane stack does not match the multi-image");
  }
  std::uint64_t intensity = 0;
  for (const auto& pixels : img.images) {
    for (auto v : pixels) intensity += v;
  }
  return SeedMaterial::from_sums(intensity, stack.popcount(), img.image_count(), img.bit_depth, img.n);
}

DistinctSequences distinct_sequence(ChaosState seed, const HenonSineParams& p, std::size_t count,
                                    std::uint64_t budget) {
  if (count == 0) throw std::invalid_argument("sequence length must be positive");
  DistinctSequences out;
  out.xs.reserve(count);
  out.ys.reserve(count);
  std::unordered_set<std::uint64_t> seen_x, seen_y;
  ChaosState s = seed;
  for (std::uint64_t i = 0; i < kBurnIn; ++i) s = henon_sine_step(s, p);
  out.iterations = kBurnIn;
  while (out.xs.size() < count || out.ys.size() < count) {
    if (out.iterations >= budget) {
      throw std::runtime_error("chaotic generator produced fewer than " + std::to_string(count) +
                               " distinct values within the iteration budget");
    }
    s = henon_sine_step(s, p);
    ++out.iterations;
    if (out.xs.size() < count && seen_x.insert(std::bit_cast<std::uint64_t>(s.x)).second) out.xs.push_back(s.x);
    if (out.ys.size() < count && seen_y.insert(std::bit_cast<std::uint64_t>(s.y)).second) out.ys.push_back(s.y);
  }
  return out;
}

std::vector<std::uint32_t> rank_positions(std::span<const double> values) {
  std::vector<std::uint32_t> order(values.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });
  std::vector<std::uint32_t> ranks(values.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (r > 0 && !(values[order[r - 1]] < values[order[r]])) {
      throw std::invalid_argument("rank permutation needs pairwise distinct values");
    }
    ranks[order[r]] = static_cast<std::uint32_t>(r + 1);
  }
  return ranks;
}

RankPerms rank_perms(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("rank permutation sequences differ in length");
  RankPerms perms;
  perms.s = rank_positions(xs);
  perms.t = rank_positions(ys);
  perms.xs = std::move(xs);
  perms.ys = std::move(ys);
  return perms;
}

std::int64_t key_value(const RankPerms& perms, std::size_t i, std::size_t j, int q) {
  const std::size_t count = perms.xs.size();
  if (i < 1 || j < 1 || i > count || j > count) throw std::out_of_range("key coordinate out of range");
  if (q < 0 || q > 18) throw std::invalid_argument("key exponent q must lie in [0, 18]");
  const double a = chebyshev(perms.s[i - 1], perms.ys[count - i]);
  const double b = chebyshev(perms.t[j - 1], perms.xs[count - j]);
  return static_cast<std::int64_t>(std::floor(a * b * std::pow(10.0, q)));
}

std::vector<std::uint8_t> key_bits(const RankPerms& perms, std::size_t i, std::size_t j, int q, int k) {
  if (k < 0 || k > 6) throw std::invalid_argument("plane exponent out of range");
  const std::int64_t v = key_value(perms, i, j, q);
  std::vector<std::uint8_t> bits(std::size_t{1} << k);
  for (unsigned l = 0; l < bits.size(); ++l) bits[l] = key_bit(v, l);
  return bits;
}

LyapunovEstimate lyapunov_estimate(const std::function<double(double)>& f,
                                   const std::function<double(double)>& df, double x0,
                                   std::uint64_t iterations) {
  if (iterations < 10'000) throw std::invalid_argument("Lyapunov estimate needs at least 10^4 iterations");
  double x = x0;
  for (std::uint64_t i = 0; i < kBurnIn; ++i) x = f(x);
  LyapunovEstimate est;
  double sum = 0.0;
  for (std::uint64_t i = 0; i < iterations; ++i) {
    const double d = std::abs(df(x));
    if (d == 0.0) {
      ++est.skipped;
    } else {
      sum += std::log(d);
    }
    x = f(x);
  }
  const auto used = iterations - est.skipped;
  est.exponent = used ? sum / static_cast<double>(used) : 0.0;
  return est;
}

LyapunovEstimate henon_sine_lyapunov(const HenonSineParams& p, ChaosState seed, std::uint64_t iterations) {
  if (iterations < 10'000) throw std::invalid_argument("Lyapunov estimate needs at least 10^4 iterations");
  constexpr double pi = std::numbers::pi;
  ChaosState s = seed;
  for (std::uint64_t i = 0; i < kBurnIn; ++i) s = henon_sine_step(s, p);
  double vx = 1.0, vy = 0.0;
  double sum = 0.0;
  LyapunovEstimate est;
  for (std::uint64_t i = 0; i < iterations; ++i) {
    const double inner_x = pi * p.lambda1 * (1.0 - HenonSineParams::kA * s.x * s.x + s.y);
    const double inner_y = pi * p.lambda2 * HenonSineParams::kB * s.x;
    const double cx = std::cos(inner_x) * pi * p.lambda1;
    const double cy = std::cos(inner_y) * pi * p.lambda2 * HenonSineParams::kB;
    // Jacobian [[cx * -2a x, cx], [cy, 0]]
    const double nx = cx * (-2.0 * HenonSineParams::kA * s.x) * vx + cx * vy;
    const double ny = cy * vx;
    const double norm = std::hypot(nx, ny);
    if (norm == 0.0) {
      ++est.skipped;
      vx = 1.0;
      vy = 0.0;
    } else {
      sum += std::log(norm);
      vx = nx / norm;
      vy = ny / norm;
    }
    s = henon_sine_step(s, p);
  }
  const auto used = iterations - est.skipped;
  est.exponent = used ? sum / static_cast<double>(used) : 0.0;
  return est;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const HenonSineParams& p, ChaosState seed, std::size_t count) {
  out << "i,x,y\n";
  ChaosState s = seed;
  for (std::size_t i = 0; i < count; ++i) {
    out << i << ',';
    put(out, s.x);
    out << ',';
    put(out, s.y);
    out << '\n';
    s = henon_sine_step(s, p);
  }
}

void write_chebyshev_csv(std::ostream& out, std::uint64_t k_max, std::span<const double> grid) {
  out << 'x';
  for (std::uint64_t k = 0; k <= k_max; ++k) out << ",T" << k;
  out << '\n';
  for (double x : grid) {
    put(out, x);
    for (std::uint64_t k = 0; k <= k_max; ++k) {
      out << ',';
      put(out, chebyshev(k, x));
    }
    out << '\n';
  }
}

}  // namespace qbaker
