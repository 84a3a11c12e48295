#pragma once

// Security metrics for ciphertext image sets. Robustness tests damage the
// ciphertext and score the decryption against the plaintext.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qbaker/brqmi.hpp"
#include "qbaker/cipher.hpp"

namespace qbaker {

// Chi-square statistic of the gray-level histogram against the uniform
// distribution over 2^L bins.
double histogram_chi2(std::span<const std::uint32_t> pixels, int bit_depth);

// Upper critical value of the chi-square distribution (e.g. alpha = 0.01).
double chi2_critical(double dof, double alpha);

enum class Direction { kHorizontal, kVertical, kDiagonal };

const char* direction_name(Direction d);

// Pearson coefficient of `samples` pixel/neighbor pairs drawn with a seeded
// generator. Empty for zero-variance data.
std::optional<double> adjacent_correlation(std::span<const std::uint32_t> pixels, std::size_t side, Direction dir,
                                           std::size_t samples, std::uint64_t seed = 1);

struct Differential {
  double npcr = 0.0;  // percent
  double uaci = 0.0;  // percent
};

// Pools every pixel of every image. Throws std::invalid_argument on shape mismatch.
Differential npcr_uaci(const MultiImage& a, const MultiImage& b);

// Percentage of differing bits over all pixels of all images.
double bit_difference_rate(const MultiImage& a, const MultiImage& b);

// +infinity for identical images.
double psnr(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, int bit_depth);

struct Block {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t height = 0;
  std::size_t width = 0;
};

// Zeroes `block` in every ciphertext image before decrypting. One PSNR per
// plaintext image.
std::vector<double> occlusion_test(const MultiImage& cipher, const SecretKey& key, const MultiImage& plain,
                                   const Block& block);

// Salt-and-pepper: each pixel becomes 0 or the maximum with probability
// `density`. One PSNR per plaintext image.
std::vector<double> noise_test(const MultiImage& cipher, const SecretKey& key, const MultiImage& plain,
                               double density, std::uint64_t seed = 1);

// Mean PSNR in the MSE domain (infinite only when every image is exact).
double pooled_psnr(std::span<const double> per_image, int bit_depth);

struct ImageMetrics {
  double chi2 = 0.0;
  std::optional<double> horizontal;
  std::optional<double> vertical;
  std::optional<double> diagonal;
};

struct MetricsReport {
  std::vector<ImageMetrics> images;
  double chi2_critical_1pct = 0.0;
  std::optional<Differential> differential;
  std::optional<double> avalanche;
  std::optional<std::vector<double>> occlusion_psnr;
  std::optional<std::vector<double>> noise_psnr;
};

MetricsReport analyze_images(const MultiImage& cipher, std::size_t correlation_samples = 5000,
                             std::uint64_t seed = 1);

// key = value blocks in a fixed field order.
void write_report(std::ostream& out, const MetricsReport& report);

// image,chi2,r_horizontal,r_vertical,r_diagonal
void write_report_csv(std::ostream& out, const MetricsReport& report);

}  // namespace qbaker
