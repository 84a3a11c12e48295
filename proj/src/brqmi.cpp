#include "qbaker/brqmi.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

#include "qbaker/errors.hpp"

namespace qbaker {

std::uint32_t MultiImage::max_value() const {
  return bit_depth >= 32 ? 0xFFFFFFFFu : (std::uint32_t{1} << bit_depth) - 1;
}

void MultiImage::validate() const {
  if (n < 0 || n > kMaxSideExponent) {
    throw std::invalid_argument("side exponent out of range [0, " + std::to_string(kMaxSideExponent) + "]");
  }
  if (bit_depth < 1 || bit_depth > kMaxBitDepth) {
    throw std::invalid_argument("bit depth out of range [1, " + std::to_string(kMaxBitDepth) + "]");
  }
  if (images.empty() || images.size() > static_cast<std::size_t>(kMaxImages)) {
    throw std::invalid_argument("image count out of range [1, " + std::to_string(kMaxImages) + "]");
  }
  const std::uint32_t top = max_value();
  for (std::size_t m = 0; m < images.size(); ++m) {
    if (images[m].size() != pixel_count()) {
      throw std::invalid_argument("image " + std::to_string(m) + " has wrong pixel count");
    }
    for (std::uint32_t v : images[m]) {
      if (v > top) throw std::invalid_argument("pixel value exceeds 2^L - 1 in image " + std::to_string(m));
    }
  }
}

MultiImage MultiImage::blank(int n, int bit_depth, int image_count) {
  if (n < 0 || n > kMaxSideExponent) throw std::invalid_argument("side exponent out of range");
  MultiImage img;
  img.n = n;
  img.bit_depth = bit_depth;
  img.images.assign(static_cast<std::size_t>(image_count), std::vector<std::uint32_t>(img.pixel_count(), 0));
  return img;
}

int plane_exponent(int image_count, int bit_depth) {
  if (image_count < 1 || image_count > kMaxImages || bit_depth < 1 || bit_depth > kMaxBitDepth) {
    throw std::invalid_argument("image count or bit depth out of range");
  }
  const auto widest = static_cast<unsigned>(std::max(image_count, bit_depth));
  return widest <= 1 ? 0 : std::bit_width(widest - 1);
}

BitPlaneStack::BitPlaneStack(int n, int k, int image_count, int bit_depth)
    : n_(n), k_(k), image_count_(image_count), bit_depth_(bit_depth) {
  if (n < 0 || k < 0 || k > 5) throw std::invalid_argument("bit-plane stack exponents out of range");
  if (image_count < 1 || bit_depth < 1 || static_cast<std::size_t>(image_count) > stack_side() ||
      static_cast<std::size_t>(bit_depth) > stack_side()) {
    throw std::invalid_argument("bit-plane stack dimensions exceed 2^k");
  }
  bits_.assign(stack_side() * stack_side() * slice_size(), 0);
}

std::uint64_t BitPlaneStack::popcount() const {
  std::uint64_t total = 0;
  for (auto b : bits_) total += b;
  return total;
}

bool BitPlaneStack::padding_clean() const {
  const std::size_t s = stack_side();
  for (std::size_t m = 0; m < s; ++m) {
    for (std::size_t l = 0; l < s; ++l) {
      if (m < static_cast<std::size_t>(image_count_) && l < static_cast<std::size_t>(bit_depth_)) continue;
      for (auto b : slice(m, l)) {
        if (b != 0) return false;
      }
    }
  }
  return true;
}

BitPlaneStack decompose(const MultiImage& img) {
  img.validate();
  const int k = plane_exponent(img.image_count(), img.bit_depth);
  BitPlaneStack stack(img.n, k, img.image_count(), img.bit_depth);
  for (std::size_t m = 0; m < img.images.size(); ++m) {
    const auto& pixels = img.images[m];
    for (std::size_t l = 0; l < static_cast<std::size_t>(img.bit_depth); ++l) {
      auto plane = stack.slice(m, l);
      for (std::size_t p = 0; p < pixels.size(); ++p) plane[p] = static_cast<std::uint8_t>((pixels[p] >> l) & 1u);
    }
  }
  return stack;
}

namespace {

MultiImage gather(const BitPlaneStack& stack, std::size_t image_count, std::size_t bit_depth) {
  MultiImage img = MultiImage::blank(stack.n(), static_cast<int>(bit_depth), static_cast<int>(image_count));
  for (std::size_t m = 0; m < image_count; ++m) {
    auto& pixels = img.images[m];
    for (std::size_t l = 0; l < bit_depth; ++l) {
      auto plane = stack.slice(m, l);
      for (std::size_t p = 0; p < pixels.size(); ++p) pixels[p] |= std::uint32_t{plane[p]} << l;
    }
  }
  return img;
}

}  // namespace

MultiImage recompose(const BitPlaneStack& stack, PaddingPolicy policy) {
  if (policy == PaddingPolicy::kStrict && !stack.padding_clean()) {
    throw PaddingError("nonzero bits in padded images or planes");
  }
  return gather(stack, static_cast<std::size_t>(stack.image_count()), static_cast<std::size_t>(stack.bit_depth()));
}

MultiImage recompose_all(const BitPlaneStack& stack) {
  return gather(stack, stack.stack_side(), stack.stack_side());
}

BitPlaneStack decompose_all(const MultiImage& full, int image_count, int bit_depth) {
  full.validate();
  const int k = plane_exponent(image_count, bit_depth);
  const std::size_t s = std::size_t{1} << k;
  if (full.images.size() != s || static_cast<std::size_t>(full.bit_depth) != s) {
    throw std::invalid_argument("expected " + std::to_string(s) + " images of " + std::to_string(s) +
                                "-bit pixels, got " + std::to_string(full.images.size()) + " of " +
                                std::to_string(full.bit_depth));
  }
  BitPlaneStack stack(full.n, k, image_count, bit_depth);
  for (std::size_t m = 0; m < s; ++m) {
    for (std::size_t l = 0; l < s; ++l) {
      auto plane = stack.slice(m, l);
      const auto& pixels = full.images[m];
      for (std::size_t p = 0; p < pixels.size(); ++p) plane[p] = static_cast<std::uint8_t>((pixels[p] >> l) & 1u);
    }
  }
  return stack;
}

}  // namespace qbaker
