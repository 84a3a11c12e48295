#pragma once

// Shared fixtures: random keys and synthetic image sets.

#include <cmath>
#include <cstdint>
#include <random>

#include "qbaker/brqmi.hpp"
#include "qbaker/cipher.hpp"

namespace qtest {

inline qbaker::SecretKey random_key(std::mt19937_64& rng, int images, int bit_depth,
                                    int q = qbaker::kDefaultKeyExponent) {
  std::uniform_real_distribution<double> lambda(2.0, 64.0);
  std::uniform_real_distribution<double> unit(-0.99, 0.99);
  qbaker::SecretKey key;
  key.bit_depth = bit_depth;
  for (int m = 0; m < images; ++m) key.images.push_back({{lambda(rng), lambda(rng)}, q});
  key.stage_a = {{lambda(rng), lambda(rng)}, {unit(rng), unit(rng)}};
  key.stage_b = {{lambda(rng), lambda(rng)}, {unit(rng), unit(rng)}};
  return key;
}

inline qbaker::MultiImage random_images(std::mt19937_64& rng, int n, int bit_depth, int images) {
  auto img = qbaker::MultiImage::blank(n, bit_depth, images);
  std::uniform_int_distribution<std::uint32_t> value(0, img.max_value());
  for (auto& pixels : img.images) {
    for (auto& v : pixels) v = value(rng);
  }
  return img;
}

inline qbaker::MultiImage constant_images(int n, int bit_depth, int images, std::uint32_t v) {
  auto img = qbaker::MultiImage::blank(n, bit_depth, images);
  for (auto& pixels : img.images) std::fill(pixels.begin(), pixels.end(), v);
  return img;
}

// Smooth shading plus texture and mild sensor noise: strongly correlated
// neighbors and a peaked histogram, like a photograph.
inline qbaker::MultiImage natural_images(int n, int bit_depth, int images, std::uint64_t seed) {
  auto img = qbaker::MultiImage::blank(n, bit_depth, images);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  const double side = static_cast<double>(img.side());
  const double top = static_cast<double>(img.max_value());
  for (int m = 0; m < images; ++m) {
    const double p1 = phase(rng), p2 = phase(rng), p3 = phase(rng);
    for (std::size_t x = 0; x < img.side(); ++x) {
      for (std::size_t y = 0; y < img.side(); ++y) {
        const double u = static_cast<double>(x) / side, v = static_cast<double>(y) / side;
        double s = 0.45 + 0.25 * std::sin(3.0 * u + p1) * std::cos(2.0 * v + p2) + 0.15 * u - 0.1 * v +
                   0.08 * std::sin(17.0 * (u + v) + p3) + noise(rng);
        s = std::clamp(s, 0.0, 1.0);
        img.at(m, x, y) = static_cast<std::uint32_t>(std::lround(s * top));
      }
    }
  }
  return img;
}

inline std::uint64_t differing_bits(const qbaker::MultiImage& a, const qbaker::MultiImage& b) {
  std::uint64_t d = 0;
  for (std::size_t m = 0; m < a.images.size(); ++m) {
    for (std::size_t p = 0; p < a.images[m].size(); ++p) {
      std::uint32_t x = a.images[m][p] ^ b.images[m][p];
      while (x) {
        d += x & 1u;
        x >>= 1;
      }
    }
  }
  return d;
}

}  // namespace qtest
