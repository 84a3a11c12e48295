#pragma once

// Bit-plane representation of a stack of gray images.
//
// A MultiImage holds M' square images of side 2^n with L-bit pixels. Its
// bit-plane form is a 4D bit tensor P[m][l][x][y] whose image and plane axes
// are both padded to a common power of two S = 2^k, k = ceil(log2 max(M', L)).
// Padded images (m >= M') and padded planes (l >= L) hold zeros. Plane 0 is
// the least significant bit.
//
// Pixel (x, y) of an image is stored at x * side + y, so x is the row.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace qbaker {

inline constexpr int kMaxSideExponent = 12;
inline constexpr int kMaxBitDepth = 32;
inline constexpr int kMaxImages = 32;

struct MultiImage {
  int n = 0;           // side exponent, images are 2^n x 2^n
  int bit_depth = 8;   // L
  std::vector<std::vector<std::uint32_t>> images;

  std::size_t side() const { return std::size_t{1} << n; }
  std::size_t pixel_count() const { return side() * side(); }
  int image_count() const { return static_cast<int>(images.size()); }
  std::uint32_t max_value() const;

  std::uint32_t& at(std::size_t m, std::size_t x, std::size_t y) { return images[m][x * side() + y]; }
  std::uint32_t at(std::size_t m, std::size_t x, std::size_t y) const { return images[m][x * side() + y]; }

  // Throws std::invalid_argument when sizes or pixel ranges are inconsistent.
  void validate() const;

  static MultiImage blank(int n, int bit_depth, int image_count);

  friend bool operator==(const MultiImage&, const MultiImage&) = default;
};

// k = ceil(log2 max(image_count, bit_depth)).
int plane_exponent(int image_count, int bit_depth);

class BitPlaneStack {
 public:
  BitPlaneStack() = default;
  BitPlaneStack(int n, int k, int image_count, int bit_depth);

  int n() const { return n_; }
  int k() const { return k_; }
  int image_count() const { return image_count_; }
  int bit_depth() const { return bit_depth_; }
  std::size_t side() const { return std::size_t{1} << n_; }
  std::size_t stack_side() const { return std::size_t{1} << k_; }
  std::size_t slice_size() const { return side() * side(); }
  std::size_t blank_images() const { return stack_side() - image_count_; }
  std::size_t blank_planes() const { return stack_side() - bit_depth_; }

  std::uint8_t bit(std::size_t m, std::size_t l, std::size_t x, std::size_t y) const {
    return bits_[offset(m, l) + x * side() + y];
  }
  void set_bit(std::size_t m, std::size_t l, std::size_t x, std::size_t y, std::uint8_t v) {
    bits_[offset(m, l) + x * side() + y] = v;
  }

  // Slice (m, l): the 2^n x 2^n bit plane, row-major.
  std::span<std::uint8_t> slice(std::size_t m, std::size_t l) { return {bits_.data() + offset(m, l), slice_size()}; }
  std::span<const std::uint8_t> slice(std::size_t m, std::size_t l) const {
    return {bits_.data() + offset(m, l), slice_size()};
  }

  std::vector<std::uint8_t>& bits() { return bits_; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  std::uint64_t popcount() const;

  // True when every padded image slice and padded plane is all zero.
  bool padding_clean() const;

  friend bool operator==(const BitPlaneStack&, const BitPlaneStack&) = default;

 private:
  std::size_t offset(std::size_t m, std::size_t l) const { return (m * stack_side() + l) * slice_size(); }

  int n_ = 0;
  int k_ = 0;
  int image_count_ = 0;
  int bit_depth_ = 0;
  std::vector<std::uint8_t> bits_;
};

BitPlaneStack decompose(const MultiImage& img);

enum class PaddingPolicy { kStrict, kLenient };

// Returns the first image_count images with bit_depth planes. Under kStrict a
// nonzero padding bit throws PaddingError; kLenient ignores padding.
MultiImage recompose(const BitPlaneStack& stack, PaddingPolicy policy = PaddingPolicy::kStrict);

// All 2^k image slots, each with 2^k-bit pixels.
MultiImage recompose_all(const BitPlaneStack& stack);

// Reinterprets a full 2^k x 2^k-slot image set (as produced by recompose_all)
// as a stack that carries the given original dimensions.
BitPlaneStack decompose_all(const MultiImage& full, int image_count, int bit_depth);

// Binary PGM (P5) files listed in a plain-text manifest.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::uint32_t max_value = 255;
  std::vector<std::uint32_t> pixels;
};

GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& manifest);

MultiImage load_multi(const std::filesystem::path& manifest);

// Writes <stem>_<index>.pgm next to the manifest and lists them in it.
void save_multi(const MultiImage& img, const std::filesystem::path& manifest);

}  // namespace qbaker
