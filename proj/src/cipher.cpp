#include "qbaker/cipher.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "qbaker/baker.hpp"
#include "qbaker/parallel.hpp"

namespace qbaker {

std::uint32_t default_r_max1(int k) { return static_cast<std::uint32_t>(std::max(1, 2 * k)); }
std::uint32_t default_r_max2(int n) { return static_cast<std::uint32_t>(std::max(1, 2 * n)); }

namespace {

// Raw Henon-sine iterates mapped to 32-bit words.
class WordSource {
 public:
  explicit WordSource(const ScheduleKey& key) : params_(key.params), state_(key.seed) {
    for (std::uint64_t i = 0; i < kBurnIn; ++i) state_ = henon_sine_step(state_, params_);
  }

  std::uint32_t next() {
    state_ = henon_sine_step(state_, params_);
    const double scaled = std::floor((state_.x + 1.0) / 2.0 * 4294967296.0);
    return static_cast<std::uint32_t>(std::clamp(scaled, 0.0, 4294967295.0));
  }

 private:
  HenonSineParams params_;
  ChaosState state_;
};

std::size_t words_needed(const BigInt& modulus) {
  const std::size_t bits = boost::multiprecision::msb(modulus) + 1 + 64;
  return (bits + 31) / 32;
}

// Concatenates words (most significant first) and reduces modulo `modulus`.
BigInt draw_index(WordSource& src, const BigInt& modulus, std::size_t words) {
  BigInt acc = 0;
  for (std::size_t w = 0; w < words; ++w) {
    acc <<= 32;
    acc |= src.next();
  }
  return acc % modulus;
}

// Same value as draw_index when the modulus fits in 64 bits.
std::uint64_t draw_small_index(WordSource& src, std::uint64_t modulus, std::size_t words) {
  unsigned __int128 acc = 0;
  for (std::size_t w = 0; w < words; ++w) acc = ((acc << 32) | src.next()) % modulus;
  return static_cast<std::uint64_t>(acc);
}

void check_schedule(const BitPlaneStack& stack, const KeySchedule& sched) {
  if (stack.n() != sched.n || stack.k() != sched.k || sched.pixel_partition.size() != stack.slice_size() ||
      sched.slice_partition.size() != stack.stack_side() * stack.stack_side()) {
    throw std::invalid_argument("key schedule does not match the bit-plane stack dimensions");
  }
}

BitPlaneStack permute_fibers(BitPlaneStack stack, const KeySchedule& sched, bool inverse) {
  check_schedule(stack, sched);
  const std::size_t s = stack.stack_side();
  const std::size_t slice = stack.slice_size();
  // Pixels sharing (partition, rounds) share one table.
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::size_t>> groups;
  for (std::size_t p = 0; p < slice; ++p) {
    if (sched.pixel_rounds[p] == 0) continue;
    groups[{sched.pixel_partition[p], sched.pixel_rounds[p]}].push_back(p);
  }
  std::vector<const std::pair<const std::pair<std::uint32_t, std::uint32_t>, std::vector<std::size_t>>*> work;
  for (const auto& g : groups) work.push_back(&g);

  auto& bits = stack.bits();
  parallel_for(work.size(), [&](std::size_t g) {
    const auto& [spec, pixels] = *work[g];
    const auto table = permutation_table(unrank(sched.k, spec.first), spec.second);
    std::vector<std::uint8_t> fiber(s * s);
    for (std::size_t p : pixels) {
      for (std::size_t c = 0; c < s * s; ++c) fiber[c] = bits[c * slice + p];
      for (std::size_t c = 0; c < s * s; ++c) {
        if (inverse) {
          bits[c * slice + p] = fiber[table[c]];
        } else {
          bits[std::size_t{table[c]} * slice + p] = fiber[c];
        }
      }
    }
  });
  return stack;
}

BitPlaneStack permute_slices(BitPlaneStack stack, const KeySchedule& sched, bool inverse) {
  check_schedule(stack, sched);
  const std::size_t s = stack.stack_side();
  parallel_for(s * s, [&](std::size_t c) {
    if (sched.slice_rounds[c] == 0) return;
    const auto table = permutation_table(unrank(sched.n, sched.slice_partition[c]), sched.slice_rounds[c]);
    auto plane = stack.slice(c / s, c % s);
    std::vector<std::uint8_t> old(plane.begin(), plane.end());
    for (std::size_t p = 0; p < old.size(); ++p) {
      if (inverse) {
        plane[p] = old[table[p]];
      } else {
        plane[table[p]] = old[p];
      }
    }
  });
  return stack;
}

}  // namespace

KeySchedule derive_schedule(const SecretKey& key, int n, int k) {
  key.validate();
  if (n < 0 || n > kMaxSideExponent || k < 0 || k > 5) throw std::invalid_argument("schedule dimensions out of range");
  const std::uint32_t r_max1 = key.r_max1.value_or(default_r_max1(k));
  const std::uint32_t r_max2 = key.r_max2.value_or(default_r_max2(n));

  KeySchedule sched;
  sched.n = n;
  sched.k = k;

  const std::size_t pixels = std::size_t{1} << (2 * n);
  WordSource a(key.stage_a);
  const BigInt pk = count_partitions(k);
  const std::size_t words_a = words_needed(pk);
  const auto pk_small = static_cast<std::uint64_t>(pk);
  sched.pixel_partition.resize(pixels);
  sched.pixel_rounds.resize(pixels);
  for (std::size_t p = 0; p < pixels; ++p) {
    sched.pixel_partition[p] = static_cast<std::uint32_t>(draw_small_index(a, pk_small, words_a));
    sched.pixel_rounds[p] = a.next() % r_max1 + 1;
  }

  const std::size_t slices = std::size_t{1} << (2 * k);
  WordSource b(key.stage_b);
  const BigInt pn = count_partitions(n);
  const std::size_t words_b = words_needed(pn);
  sched.slice_partition.resize(slices);
  sched.slice_rounds.resize(slices);
  for (std::size_t c = 0; c < slices; ++c) {
    sched.slice_partition[c] = draw_index(b, pn, words_b);
    sched.slice_rounds[c] = b.next() % r_max2 + 1;
  }
  return sched;
}

BitPlaneStack scramble_images_planes(BitPlaneStack stack, const KeySchedule& sched) {
  return permute_fibers(std::move(stack), sched, false);
}

BitPlaneStack unscramble_images_planes(BitPlaneStack stack, const KeySchedule& sched) {
  return permute_fibers(std::move(stack), sched, true);
}

BitPlaneStack scramble_positions(BitPlaneStack stack, const KeySchedule& sched) {
  return permute_slices(std::move(stack), sched, false);
}

BitPlaneStack unscramble_positions(BitPlaneStack stack, const KeySchedule& sched) {
  return permute_slices(std::move(stack), sched, true);
}

Keystream derive_keystream(const SecretKey& key, const SeedMaterial& seed, int n, int k) {
  key.validate();
  Keystream ks;
  ks.n = n;
  ks.k = k;
  const std::size_t side = std::size_t{1} << n;
  const std::size_t slots = std::size_t{1} << k;
  const std::uint64_t width_mask = (k == 5) ? 0xFFFFFFFFull : ((std::uint64_t{1} << (std::size_t{1} << k)) - 1);
  const std::size_t distinct = std::min<std::size_t>(slots, key.images.size());

  std::vector<std::vector<std::uint32_t>> per_image(distinct);
  parallel_for(distinct, [&](std::size_t m) {
    const ImageKey& ik = key.images[m];
    auto seq = distinct_sequence({seed.x0, seed.y0}, ik.params, side);
    const RankPerms perms = rank_perms(std::move(seq.xs), std::move(seq.ys));
    // key_value factored into its row and column Chebyshev terms.
    std::vector<double> row(side), col(side);
    for (std::size_t i = 1; i <= side; ++i) row[i - 1] = chebyshev(perms.s[i - 1], perms.ys[side - i]);
    for (std::size_t j = 1; j <= side; ++j) col[j - 1] = chebyshev(perms.t[j - 1], perms.xs[side - j]);
    const double scale = std::pow(10.0, ik.q);
    auto& mask = per_image[m];
    mask.resize(side * side);
    for (std::size_t x = 0; x < side; ++x) {
      for (std::size_t y = 0; y < side; ++y) {
        const auto v = static_cast<std::int64_t>(std::floor(row[x] * col[y] * scale));
        mask[x * side + y] = static_cast<std::uint32_t>(static_cast<std::uint64_t>(v) & width_mask);
      }
    }
  });
  ks.masks.resize(slots);
  for (std::size_t m = 0; m < slots; ++m) ks.masks[m] = per_image[m % key.images.size()];
  return ks;
}

std::uint64_t apply_keystream(BitPlaneStack& stack, const Keystream& ks) {
  if (ks.n != stack.n() || ks.k != stack.k() || ks.masks.size() != stack.stack_side()) {
    throw std::invalid_argument("keystream does not match the bit-plane stack dimensions");
  }
  const std::size_t s = stack.stack_side();
  parallel_for(s, [&](std::size_t m) {
    const auto& mask = ks.masks[m];
    for (std::size_t l = 0; l < s; ++l) {
      auto plane = stack.slice(m, l);
      for (std::size_t p = 0; p < plane.size(); ++p) plane[p] ^= static_cast<std::uint8_t>((mask[p] >> l) & 1u);
    }
  });
  return static_cast<std::uint64_t>(s) * s * stack.slice_size();
}

BitPlaneStack diffuse(BitPlaneStack stack, const SecretKey& key, const SeedMaterial& seed, std::uint64_t* xor_sites) {
  const Keystream ks = derive_keystream(key, seed, stack.n(), stack.k());
  const std::uint64_t sites = apply_keystream(stack, ks);
  if (xor_sites) *xor_sites = sites;
  return stack;
}

EncryptResult encrypt(const MultiImage& plain, const SecretKey& key) {
  plain.validate();
  key.validate();
  if (plain.image_count() != key.image_count()) {
    throw std::invalid_argument("key is for " + std::to_string(key.image_count()) + " images, got " +
                                std::to_string(plain.image_count()));
  }
  if (plain.bit_depth != key.bit_depth) throw std::invalid_argument("key bit depth differs from the images");
  if (key.n && *key.n != plain.n) throw std::invalid_argument("key side exponent differs from the images");

  BitPlaneStack stack = decompose(plain);
  const SeedMaterial seed = derive_seed(plain, stack);

  EncryptResult out;
  out.key = key;
  out.key.n = plain.n;
  out.key.r_max1 = key.r_max1.value_or(default_r_max1(stack.k()));
  out.key.r_max2 = key.r_max2.value_or(default_r_max2(plain.n));
  out.key.intensity_sum = seed.intensity_sum;
  out.key.bit_count = seed.bit_count;

  const KeySchedule sched = derive_schedule(out.key, plain.n, stack.k());
  stack = scramble_images_planes(std::move(stack), sched);
  stack = scramble_positions(std::move(stack), sched);
  stack = diffuse(std::move(stack), out.key, seed);
  out.cipher = recompose_all(stack);
  return out;
}

DecryptResult decrypt(const MultiImage& cipher, const SecretKey& key) {
  key.validate();
  if (!key.intensity_sum || !key.bit_count || !key.n) {
    throw std::invalid_argument("key lacks the seed sums recorded at encryption");
  }
  if (cipher.n != *key.n) throw std::invalid_argument("ciphertext size differs from the key's side exponent");
  BitPlaneStack stack = decompose_all(cipher, key.image_count(), key.bit_depth);
  const SeedMaterial seed =
      SeedMaterial::from_sums(*key.intensity_sum, *key.bit_count, key.image_count(), key.bit_depth, *key.n);
  const KeySchedule sched = derive_schedule(key, *key.n, stack.k());

  stack = diffuse(std::move(stack), key, seed);
  stack = unscramble_positions(std::move(stack), sched);
  stack = unscramble_images_planes(std::move(stack), sched);

  DecryptResult out;
  out.padding_clean = stack.padding_clean();
  out.plain = recompose(stack, PaddingPolicy::kLenient);
  return out;
}

}  // namespace qbaker
