#include "qbaker/baker.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <stdexcept>

namespace qbaker {

BakerPartition BakerPartition::from_exponents(int n, std::vector<int> exponents) {
  if (n < 0 || n > kMaxBakerExponent) {
    throw std::invalid_argument("lattice exponent out of range [0, " + std::to_string(kMaxBakerExponent) + "]");
  }
  if (exponents.empty()) throw std::invalid_argument("partition has no blocks");
  BakerPartition part;
  part.n_ = n;
  part.prefix_.reserve(exponents.size() + 1);
  part.prefix_.push_back(0);
  part.admissible_ = true;
  for (int q : exponents) {
    if (q < 0 || q > n) throw std::invalid_argument("block exponent out of range");
    const std::uint64_t width = std::uint64_t{1} << q;
    const std::uint64_t before = part.prefix_.back();
    if (before % width != 0) part.admissible_ = false;
    part.prefix_.push_back(before + width);
    if (part.prefix_.back() > (std::uint64_t{1} << n)) break;
  }
  if (part.prefix_.back() != (std::uint64_t{1} << n)) {
    throw std::invalid_argument("block widths do not sum to 2^" + std::to_string(n));
  }
  part.exponents_ = std::move(exponents);
  return part;
}

BakerPartition BakerPartition::from_widths(const std::vector<std::uint64_t>& widths) {
  std::vector<int> exponents;
  std::uint64_t total = 0;
  for (auto w : widths) {
    if (!std::has_single_bit(w)) throw std::invalid_argument("block width " + std::to_string(w) + " is not a power of two");
    exponents.push_back(std::countr_zero(w));
    total += w;
    if (total > (std::uint64_t{1} << kMaxBakerExponent)) throw std::invalid_argument("block widths sum too large");
  }
  if (!std::has_single_bit(total)) throw std::invalid_argument("block widths do not sum to a power of two");
  return from_exponents(std::countr_zero(total), std::move(exponents));
}

BakerPartition BakerPartition::parse(std::string_view text) {
  std::vector<std::uint64_t> widths;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view field = text.substr(pos, comma - pos);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    std::uint64_t w = 0;
    auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), w);
    if (field.empty() || ec != std::errc{} || end != field.data() + field.size()) {
      throw std::invalid_argument("bad block width '" + std::string(field) + "'");
    }
    widths.push_back(w);
    pos = comma + 1;
  }
  return from_widths(widths);
}

std::vector<std::uint64_t> BakerPartition::widths() const {
  std::vector<std::uint64_t> out;
  out.reserve(exponents_.size());
  for (std::size_t i = 0; i < exponents_.size(); ++i) out.push_back(width(i));
  return out;
}

std::size_t BakerPartition::block_of(std::uint64_t x) const {
  auto it = std::upper_bound(prefix_.begin(), prefix_.end(), x);
  return static_cast<std::size_t>(it - prefix_.begin()) - 1;
}

std::string BakerPartition::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(width(i));
  }
  return out;
}

bool is_admissible(const BakerPartition& part) { return part.admissible(); }

namespace {

const std::vector<BigInt>& partition_counts() {
  static const std::vector<BigInt> counts = [] {
    std::vector<BigInt> p{1};
    for (int n = 1; n <= kMaxBakerExponent; ++n) p.push_back(p.back() * p.back() + 1);
    return p;
  }();
  return counts;
}

void unrank_into(int n, BigInt index, std::vector<int>& out) {
  if (index == 0) {
    out.push_back(n);
    return;
  }
  const BigInt& half = partition_counts()[static_cast<std::size_t>(n - 1)];
  --index;
  BigInt left, right;
  boost::multiprecision::divide_qr(index, half, left, right);
  unrank_into(n - 1, std::move(left), out);
  unrank_into(n - 1, std::move(right), out);
}

BigInt rank_of(int n, const std::vector<int>& exps, std::size_t begin, std::size_t end) {
  if (end - begin == 1) return 0;
  // An admissible prefix never straddles the midpoint.
  const std::uint64_t half = std::uint64_t{1} << (n - 1);
  std::uint64_t sum = 0;
  std::size_t mid = begin;
  while (mid < end && sum < half) sum += std::uint64_t{1} << exps[mid++];
  if (sum != half) throw std::invalid_argument("partition does not split at its midpoint");
  return 1 + rank_of(n - 1, exps, begin, mid) * partition_counts()[static_cast<std::size_t>(n - 1)] +
         rank_of(n - 1, exps, mid, end);
}

void check_point(const BakerPartition& part, Point p) {
  if (!part.admissible()) throw std::invalid_argument("partition " + part.to_string() + " is not admissible");
  const std::uint64_t side = std::uint64_t{1} << part.n();
  if (p.x >= side || p.y >= side) throw std::invalid_argument("point lies outside the lattice");
}

}  // namespace

BigInt count_partitions(int n) {
  if (n < 0 || n > kMaxBakerExponent) {
    throw std::invalid_argument("lattice exponent out of range [0, " + std::to_string(kMaxBakerExponent) + "]");
  }
  return partition_counts()[static_cast<std::size_t>(n)];
}

BakerPartition unrank(int n, const BigInt& index) {
  const BigInt& total = count_partitions(n);
  if (index < 0 || index >= total) throw std::out_of_range("partition index out of range [0, P_" + std::to_string(n) + ")");
  std::vector<int> exps;
  unrank_into(n, index, exps);
  return BakerPartition::from_exponents(n, std::move(exps));
}

BigInt rank(const BakerPartition& part) {
  if (!part.admissible()) throw std::invalid_argument("partition " + part.to_string() + " is not admissible");
  return rank_of(part.n(), part.exponents(), 0, part.block_count());
}

Point apply(const BakerPartition& part, Point p) {
  check_point(part, p);
  const std::size_t i = part.block_of(p.x);
  const int stretch = part.n() - part.exponents()[i];
  const std::uint64_t start = part.prefix(i);
  const std::uint64_t low = p.y & ((std::uint64_t{1} << stretch) - 1);
  return {static_cast<std::uint32_t>(((p.x - start) << stretch) + low),
          static_cast<std::uint32_t>(start + (p.y >> stretch))};
}

Point apply_inverse(const BakerPartition& part, Point p) {
  check_point(part, p);
  // y' lies in [N_{i-1}, N_i) for the source block i.
  const std::size_t i = part.block_of(p.y);
  const int stretch = part.n() - part.exponents()[i];
  const std::uint64_t start = part.prefix(i);
  const std::uint64_t low = p.x & ((std::uint64_t{1} << stretch) - 1);
  return {static_cast<std::uint32_t>(start + (p.x >> stretch)),
          static_cast<std::uint32_t>(((p.y - start) << stretch) + low)};
}

Point iterate(const BakerPartition& part, Point p, std::uint64_t rounds) {
  check_point(part, p);
  for (std::uint64_t r = 0; r < rounds; ++r) p = apply(part, p);
  return p;
}

Point bit_shuffle(int n, int s, Point p) {
  if (s < 0 || s > n || n > kMaxBakerExponent) throw std::invalid_argument("bad shuffle exponents");
  const std::uint64_t side = std::uint64_t{1} << n;
  const std::uint64_t x = p.x, y = p.y;
  const std::uint64_t lo = std::uint64_t{1} << (n - s);
  return {static_cast<std::uint32_t>(((x << (n - s)) % side) + y % lo),
          static_cast<std::uint32_t>(y / lo + x - x % (std::uint64_t{1} << s))};
}

std::vector<std::uint32_t> permutation_table(const BakerPartition& part, std::uint64_t rounds) {
  if (!part.admissible()) throw std::invalid_argument("partition " + part.to_string() + " is not admissible");
  if (part.n() > 15) throw std::invalid_argument("permutation table limited to n <= 15");
  const int n = part.n();
  const std::uint32_t side = std::uint32_t{1} << n;
  std::vector<std::uint32_t> once(std::size_t{side} * side);
  for (std::uint32_t x = 0; x < side; ++x) {
    for (std::uint32_t y = 0; y < side; ++y) {
      const Point q = apply(part, {x, y});
      once[(std::size_t{x} << n) | y] = (q.x << n) | q.y;
    }
  }
  std::vector<std::uint32_t> table(once.size());
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = static_cast<std::uint32_t>(i);
  // Powers of one permutation commute, so square-and-multiply in any order.
  std::vector<std::uint32_t> scratch(once.size());
  while (rounds > 0) {
    if (rounds & 1u) {
      for (auto& v : table) v = once[v];
    }
    rounds >>= 1;
    if (rounds > 0) {
      for (std::size_t i = 0; i < once.size(); ++i) scratch[i] = once[once[i]];
      once.swap(scratch);
    }
  }
  return table;
}

}  // namespace qbaker
