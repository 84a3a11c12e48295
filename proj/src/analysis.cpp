#include "qbaker/analysis.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

namespace qbaker {

double histogram_chi2(std::span<const std::uint32_t> pixels, int bit_depth) {
  if (bit_depth < 1 || bit_depth > 16) throw std::invalid_argument("histogram supports 1..16-bit pixels");
  if (pixels.empty()) throw std::invalid_argument("histogram of an empty image");
  const std::size_t bins = std::size_t{1} << bit_depth;
  std::vector<std::uint64_t> counts(bins, 0);
  for (auto v : pixels) {
    if (v >= bins) throw std::invalid_argument("pixel exceeds the bit depth");
    ++counts[v];
  }
  const double expected = static_cast<double>(pixels.size()) / static_cast<double>(bins);
  double chi2 = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  return chi2;
}

double chi2_critical(double dof, double alpha) {
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::kHorizontal: return "horizontal";
    case Direction::kVertical: return "vertical";
    case Direction::kDiagonal: return "diagonal";
  }
  return "?";
}

std::optional<double> adjacent_correlation(std::span<const std::uint32_t> pixels, std::size_t side, Direction dir,
                                           std::size_t samples, std::uint64_t seed) {
  if (pixels.size() != side * side) throw std::invalid_argument("pixel count does not match the side length");
  if (side < 2 || samples == 0) return std::nullopt;
  const std::size_t dx = dir == Direction::kHorizontal ? 0 : 1;
  const std::size_t dy = dir == Direction::kVertical ? 0 : 1;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> row(0, side - 1 - dx), col(0, side - 1 - dy);
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const std::size_t x = row(rng), y = col(rng);
    const double a = pixels[x * side + y];
    const double b = pixels[(x + dx) * side + (y + dy)];
    sa += a;
    sb += b;
    saa += a * a;
    sbb += b * b;
    sab += a * b;
  }
  const double n = static_cast<double>(samples);
  const double cov = sab / n - (sa / n) * (sb / n);
  const double va = saa / n - (sa / n) * (sa / n);
  const double vb = sbb / n - (sb / n) * (sb / n);
  if (va <= 0.0 || vb <= 0.0) return std::nullopt;
  return std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0);
}

namespace {

void check_same_shape(const MultiImage& a, const MultiImage& b) {
  if (a.n != b.n || a.bit_depth != b.bit_depth || a.images.size() != b.images.size()) {
    throw std::invalid_argument("image sets differ in shape");
  }
  for (std::size_t m = 0; m < a.images.size(); ++m) {
    if (a.images[m].size() != b.images[m].size()) throw std::invalid_argument("image sets differ in shape");
  }
}

}  // namespace

Differential npcr_uaci(const MultiImage& a, const MultiImage& b) {
  check_same_shape(a, b);
  const double top = static_cast<double>(a.max_value());
  std::uint64_t changed = 0, total = 0;
  double intensity = 0.0;
  for (std::size_t m = 0; m < a.images.size(); ++m) {
    for (std::size_t p = 0; p < a.images[m].size(); ++p) {
      const auto u = a.images[m][p], v = b.images[m][p];
      changed += u != v;
      intensity += std::abs(static_cast<double>(u) - static_cast<double>(v)) / top;
      ++total;
    }
  }
  if (total == 0) throw std::invalid_argument("empty image sets");
  return {100.0 * static_cast<double>(changed) / static_cast<double>(total),
          100.0 * intensity / static_cast<double>(total)};
}

double bit_difference_rate(const MultiImage& a, const MultiImage& b) {
  check_same_shape(a, b);
  std::uint64_t diff = 0, total = 0;
  for (std::size_t m = 0; m < a.images.size(); ++m) {
    for (std::size_t p = 0; p < a.images[m].size(); ++p) {
      diff += static_cast<std::uint64_t>(std::popcount(a.images[m][p] ^ b.images[m][p]));
      total += static_cast<std::uint64_t>(a.bit_depth);
    }
  }
  if (total == 0) throw std::invalid_argument("empty image sets");
  return 100.0 * static_cast<double>(diff) / static_cast<double>(total);
}

double psnr(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, int bit_depth) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("PSNR needs equal, nonempty images");
  double se = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    se += d * d;
  }
  if (se == 0.0) return std::numeric_limits<double>::infinity();
  const double top = std::ldexp(1.0, bit_depth) - 1.0;
  return 10.0 * std::log10(top * top / (se / static_cast<double>(a.size())));
}

double pooled_psnr(std::span<const double> per_image, int bit_depth) {
  if (per_image.empty()) throw std::invalid_argument("no PSNR values to pool");
  const double top = std::ldexp(1.0, bit_depth) - 1.0;
  double mse = 0.0;
  for (double p : per_image) {
    if (!std::isinf(p)) mse += top * top / std::pow(10.0, p / 10.0);
  }
  mse /= static_cast<double>(per_image.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(top * top / mse);
}

namespace {

std::vector<double> decrypt_and_score(const MultiImage& damaged, const SecretKey& key, const MultiImage& plain) {
  const DecryptResult result = decrypt(damaged, key);
  check_same_shape(result.plain, plain);
  std::vector<double> scores;
  for (std::size_t m = 0; m < plain.images.size(); ++m) {
    scores.push_back(psnr(result.plain.images[m], plain.images[m], plain.bit_depth));
  }
  return scores;
}

}  // namespace

std::vector<double> occlusion_test(const MultiImage& cipher, const SecretKey& key, const MultiImage& plain,
                                   const Block& block) {
  const std::size_t side = cipher.side();
  if (block.row + block.height > side || block.col + block.width > side) {
    throw std::invalid_argument("occlusion block exceeds the image");
  }
  MultiImage damaged = cipher;
  for (auto& img : damaged.images) {
    for (std::size_t x = block.row; x < block.row + block.height; ++x) {
      for (std::size_t y = block.col; y < block.col + block.width; ++y) img[x * side + y] = 0;
    }
  }
  return decrypt_and_score(damaged, key, plain);
}

std::vector<double> noise_test(const MultiImage& cipher, const SecretKey& key, const MultiImage& plain,
                               double density, std::uint64_t seed) {
  if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("noise density must lie in [0, 1]");
  MultiImage damaged = cipher;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> hit(0.0, 1.0);
  std::bernoulli_distribution salt(0.5);
  for (auto& img : damaged.images) {
    for (auto& v : img) {
      if (hit(rng) < density) v = salt(rng) ? damaged.max_value() : 0;
    }
  }
  return decrypt_and_score(damaged, key, plain);
}

MetricsReport analyze_images(const MultiImage& cipher, std::size_t correlation_samples, std::uint64_t seed) {
  cipher.validate();
  MetricsReport report;
  report.chi2_critical_1pct = chi2_critical(std::ldexp(1.0, cipher.bit_depth) - 1.0, 0.01);
  for (const auto& img : cipher.images) {
    ImageMetrics m;
    m.chi2 = histogram_chi2(img, cipher.bit_depth);
    m.horizontal = adjacent_correlation(img, cipher.side(), Direction::kHorizontal, correlation_samples, seed);
    m.vertical = adjacent_correlation(img, cipher.side(), Direction::kVertical, correlation_samples, seed);
    m.diagonal = adjacent_correlation(img, cipher.side(), Direction::kDiagonal, correlation_samples, seed);
    report.images.push_back(m);
  }
  return report;
}

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "undefined"; }

}  // namespace

void write_report(std::ostream& out, const MetricsReport& r) {
  out << "[summary]\n";
  out << "images = " << r.images.size() << '\n';
  out << "chi2_critical_1pct = " << fmt(r.chi2_critical_1pct) << '\n';
  for (std::size_t i = 0; i < r.images.size(); ++i) {
    const auto& m = r.images[i];
    out << "\n[image." << i << "]\n";
    out << "chi2 = " << fmt(m.chi2) << '\n';
    out << "chi2_pass = " << (m.chi2 < r.chi2_critical_1pct ? "yes" : "no") << '\n';
    out << "corr_horizontal = " << fmt(m.horizontal) << '\n';
    out << "corr_vertical = " << fmt(m.vertical) << '\n';
    out << "corr_diagonal = " << fmt(m.diagonal) << '\n';
  }
  if (r.differential) {
    out << "\n[differential]\n";
    out << "npcr = " << fmt(r.differential->npcr) << '\n';
    out << "uaci = " << fmt(r.differential->uaci) << '\n';
  }
  if (r.avalanche) out << "\n[avalanche]\nbit_difference = " << fmt(*r.avalanche) << '\n';
  const auto list = [&](const char* name, const std::optional<std::vector<double>>& v) {
    if (!v) return;
    out << "\n[" << name << "]\n";
    for (std::size_t i = 0; i < v->size(); ++i) out << "psnr." << i << " = " << fmt((*v)[i]) << '\n';
  };
  list("occlusion", r.occlusion_psnr);
  list("noise", r.noise_psnr);
}

void write_report_csv(std::ostream& out, const MetricsReport& r) {
  out << "image,chi2,r_horizontal,r_vertical,r_diagonal\n";
  for (std::size_t i = 0; i < r.images.size(); ++i) {
    const auto& m = r.images[i];
    out << i << ',' << fmt(m.chi2) << ',' << fmt(m.horizontal) << ',' << fmt(m.vertical) << ',' << fmt(m.diagonal)
        << '\n';
  }
}

}  // namespace qbaker
