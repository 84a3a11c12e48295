#pragma once

// Two-stage baker scrambling with chaotic XOR diffusion.
//
//   encrypt: decompose -> scramble (m,l) per pixel -> scramble (x,y) per
//            slice -> XOR keystream -> all 2^k slots as ciphertext
//   decrypt: the same steps inverted in reverse order
//
// Scatter convention: the bit at p moves to B(p). On the (m, l) lattice the
// image index m plays the x role.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qbaker/bigint.hpp"
#include "qbaker/brqmi.hpp"
#include "qbaker/chaos.hpp"

namespace qbaker {

// q = 4 leaves a visible bias in the keystream histogram near zero products.
inline constexpr int kDefaultKeyExponent = 8;

struct ImageKey {
  HenonSineParams params;
  int q = kDefaultKeyExponent;  // decimal scale exponent of the key product
  friend bool operator==(const ImageKey&, const ImageKey&) = default;
};

struct ScheduleKey {
  HenonSineParams params;
  ChaosState seed;
  friend bool operator==(const ScheduleKey&, const ScheduleKey&) = default;
};

struct SecretKey {
  static constexpr int kVersion = 1;

  int bit_depth = 8;  // L
  std::vector<ImageKey> images;  // one per real image (M')
  ScheduleKey stage_a;           // drives the per-pixel (m,l) scramble
  ScheduleKey stage_b;           // drives the per-slice (x,y) scramble

  // Filled (or checked) at encryption time.
  std::optional<int> n;
  std::optional<std::uint32_t> r_max1;
  std::optional<std::uint32_t> r_max2;
  std::optional<std::uint64_t> intensity_sum;
  std::optional<std::uint64_t> bit_count;

  int image_count() const { return static_cast<int>(images.size()); }
  int k() const { return plane_exponent(image_count(), bit_depth); }

  // Throws std::invalid_argument when any field is out of range.
  void validate() const;

  friend bool operator==(const SecretKey&, const SecretKey&) = default;
};

// Line-oriented "field = value"; reals as 16 hex digits of their binary64 bits.
std::string serialize_key(const SecretKey& key);
SecretKey parse_key(std::string_view text);
SecretKey load_key(const std::filesystem::path& path);
void save_key(const SecretKey& key, const std::filesystem::path& path);

struct KeySchedule {
  int n = 0;
  int k = 0;
  // Stage 1, one entry per pixel x * 2^n + y: partition index over P_k
  // (P_5 < 2^32), rounds.
  std::vector<std::uint32_t> pixel_partition;
  std::vector<std::uint32_t> pixel_rounds;
  // Stage 2, one entry per slice m * 2^k + l: partition index over P_n, rounds.
  std::vector<BigInt> slice_partition;
  std::vector<std::uint32_t> slice_rounds;
};

// Deterministic in (key, n, k). Needs key.r_max1 / r_max2 or uses the
// defaults max(1, 2k) and max(1, 2n).
KeySchedule derive_schedule(const SecretKey& key, int n, int k);

std::uint32_t default_r_max1(int k);
std::uint32_t default_r_max2(int n);

// Stage 1: per pixel, (m,l) -> B^r(m,l) with the pixel's partition and rounds.
BitPlaneStack scramble_images_planes(BitPlaneStack stack, const KeySchedule& sched);
BitPlaneStack unscramble_images_planes(BitPlaneStack stack, const KeySchedule& sched);

// Stage 2: per slice, (x,y) -> B^r(x,y) with the slice's partition and rounds.
BitPlaneStack scramble_positions(BitPlaneStack stack, const KeySchedule& sched);
BitPlaneStack unscramble_positions(BitPlaneStack stack, const KeySchedule& sched);

// masks[m][x * 2^n + y] holds the 2^k key bits of slot m at that pixel.
struct Keystream {
  int n = 0;
  int k = 0;
  std::vector<std::vector<std::uint32_t>> masks;
};

// Slot m >= M' reuses the parameters of image m mod M'.
Keystream derive_keystream(const SecretKey& key, const SeedMaterial& seed, int n, int k);

// XORs every bit site with its key bit; returns the number of sites touched.
std::uint64_t apply_keystream(BitPlaneStack& stack, const Keystream& keystream);

BitPlaneStack diffuse(BitPlaneStack stack, const SecretKey& key, const SeedMaterial& seed,
                      std::uint64_t* xor_sites = nullptr);

struct EncryptResult {
  MultiImage cipher;  // 2^k images of 2^k-bit pixels
  SecretKey key;      // input key with n, r_max and seed sums filled in
};

EncryptResult encrypt(const MultiImage& plain, const SecretKey& key);

struct DecryptResult {
  MultiImage plain;
  bool padding_clean = true;  // false signals a wrong key or damaged ciphertext
};

// Throws std::invalid_argument when the key lacks seed sums or dimensions mismatch.
DecryptResult decrypt(const MultiImage& cipher, const SecretKey& key);

}  // namespace qbaker
