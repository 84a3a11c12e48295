#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "qbaker/baker.hpp"

using namespace qbaker;

namespace {

using Widths = std::vector<std::uint64_t>;

// Every composition of 2^n into powers of two where each width divides the
// sum of the widths to its left.
std::set<Widths> brute_force_partitions(int n) {
  std::set<Widths> found;
  const std::uint64_t total = std::uint64_t{1} << n;
  Widths cur;
  std::function<void(std::uint64_t)> grow = [&](std::uint64_t sum) {
    if (sum == total) {
      found.insert(cur);
      return;
    }
    for (std::uint64_t w = 1; sum + w <= total; w *= 2) {
      if (sum % w != 0) continue;
      cur.push_back(w);
      grow(sum + w);
      cur.pop_back();
    }
  };
  grow(0);
  return found;
}

// Piecewise definition written out directly.
Point piecewise(const Widths& widths, int n, Point p) {
  std::uint64_t left = 0;
  for (std::uint64_t w : widths) {
    if (p.x < left + w) {
      const std::uint64_t stretch = (std::uint64_t{1} << n) / w;
      return {static_cast<std::uint32_t>(stretch * (p.x - left) + p.y % stretch),
              static_cast<std::uint32_t>(left + p.y / stretch)};
    }
    left += w;
  }
  throw std::logic_error("point outside partition");
}

// Bit-string evaluation: "x1x0y0" lists bits most significant first.
std::uint32_t eval_bits(const std::string& pattern, std::uint32_t x, std::uint32_t y) {
  std::uint32_t out = 0;
  for (std::size_t i = 0; i < pattern.size(); i += 2) {
    const std::uint32_t src = pattern[i] == 'x' ? x : y;
    out = (out << 1) | ((src >> (pattern[i + 1] - '0')) & 1u);
  }
  return out;
}

// Shuffle M_s as a bit string pair built by hand.
Point shuffle_form(int n, int s, Point p) {
  std::string a, b;
  for (int j = s - 1; j >= 0; --j) a += "x" + std::to_string(j);
  for (int j = n - s - 1; j >= 0; --j) a += "y" + std::to_string(j);
  for (int j = n - 1; j >= s; --j) b += "x" + std::to_string(j);
  for (int j = n - 1; j >= n - s; --j) b += "y" + std::to_string(j);
  return {eval_bits(a, p.x, p.y), eval_bits(b, p.x, p.y)};
}

std::uint32_t pow2(int e) { return std::uint32_t{1} << e; }

}  // namespace

TEST_CASE("admissibility by prefix divisibility") {
  CHECK(is_admissible(BakerPartition::parse("4,2,2")));
  CHECK_FALSE(is_admissible(BakerPartition::parse("2,4,2")));
  CHECK(is_admissible(BakerPartition::identity(3)));
  CHECK(is_admissible(BakerPartition::parse("16,8,8,32,64,128")));
  CHECK_FALSE(is_admissible(BakerPartition::parse("1,2,1")));
  CHECK(BakerPartition::parse("4,2,2").n() == 3);
}

TEST_CASE("partition text parsing") {
  const auto p = BakerPartition::parse(" 16, 8,8 ,32,64,128 ");
  CHECK(p.widths() == Widths{16, 8, 8, 32, 64, 128});
  CHECK(p.to_string() == "16,8,8,32,64,128");
  CHECK(p.exponents() == std::vector<int>{4, 3, 3, 5, 6, 7});
  CHECK(p.prefix(3) == 32);
  CHECK(p.block_of(31) == 2);
  CHECK(p.block_of(32) == 3);
  CHECK_THROWS_AS(BakerPartition::parse("3,5"), std::invalid_argument);
  CHECK_THROWS_AS(BakerPartition::parse("4,2"), std::invalid_argument);
  CHECK_THROWS_AS(BakerPartition::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(BakerPartition::parse("4,,2,2"), std::invalid_argument);
  CHECK_THROWS_AS(BakerPartition::parse("4,2,x"), std::invalid_argument);
}

TEST_CASE("partition counts") {
  CHECK(count_partitions(0) == 1);
  CHECK(count_partitions(1) == 2);
  CHECK(count_partitions(2) == 5);
  CHECK(count_partitions(3) == 26);
  CHECK(count_partitions(8) == BigInt("1947270476915296449559703445493848930452791205"));
  for (int n = 0; n <= 4; ++n) CHECK(count_partitions(n) == brute_force_partitions(n).size());
  CHECK_THROWS_AS(count_partitions(-1), std::invalid_argument);
  CHECK_THROWS_AS(count_partitions(kMaxBakerExponent + 1), std::invalid_argument);
}

TEST_CASE("unrank small cases") {
  CHECK(unrank(2, 0).widths() == Widths{4});
  CHECK(unrank(2, 1).widths() == Widths{2, 2});
  CHECK(unrank(2, 2).widths() == Widths{2, 1, 1});
  CHECK(unrank(2, 3).widths() == Widths{1, 1, 2});
  CHECK(unrank(2, 4).widths() == Widths{1, 1, 1, 1});
  CHECK(unrank(0, 0).widths() == Widths{1});
  CHECK_THROWS_AS(unrank(2, 5), std::out_of_range);
  CHECK_THROWS_AS(unrank(2, -1), std::out_of_range);
}

TEST_CASE("unrank enumerates exactly the brute-force partitions") {
  for (int n = 0; n <= 4; ++n) {
    const auto expected = brute_force_partitions(n);
    std::set<Widths> got;
    const auto total = count_partitions(n);
    for (BigInt i = 0; i < total; ++i) {
      const auto p = unrank(n, i);
      CHECK(p.admissible());
      CHECK(rank(p) == i);
      got.insert(p.widths());
    }
    CHECK(got == expected);
  }
}

TEST_CASE("rank inverts unrank at n = 8") {
  std::mt19937_64 rng(11);
  const BigInt total = count_partitions(8);
  for (int t = 0; t < 200; ++t) {
    BigInt idx = 0;
    for (int w = 0; w < 5; ++w) idx = (idx << 32) | rng() % 4294967296ull;
    idx %= total;
    const auto p = unrank(8, idx);
    CHECK(p.admissible());
    CHECK(rank(p) == idx);
  }
  CHECK(rank(BakerPartition::parse("16,8,8,32,64,128")) < total);
  CHECK_THROWS(rank(BakerPartition::parse("2,4,2")));
}

TEST_CASE("baker map examples") {
  const auto p = BakerPartition::parse("4,2,2");
  CHECK(apply(p, {0, 5}) == Point{1, 2});
  CHECK(apply(p, {6, 3}) == Point{3, 6});
  CHECK_THROWS(apply(p, {8, 0}));
  CHECK_THROWS(apply(BakerPartition::parse("2,4,2"), {0, 0}));
}

TEST_CASE("(4,2,2) matches its two-case bit table") {
  const auto p = BakerPartition::parse("4,2,2");
  for (std::uint32_t x = 0; x < 8; ++x) {
    for (std::uint32_t y = 0; y < 8; ++y) {
      const bool high = (x >> 2) & 1u;
      const Point want = high ? Point{eval_bits("x0y1y0", x, y), eval_bits("x2x1y2", x, y)}
                              : Point{eval_bits("x1x0y0", x, y), eval_bits("x2y2y1", x, y)};
      CHECK(apply(p, {x, y}) == want);
    }
  }
}

TEST_CASE("all admissible maps up to n = 4 are bijections matching both oracles") {
  for (int n = 0; n <= 4; ++n) {
    const auto total = count_partitions(n);
    for (BigInt i = 0; i < total; ++i) {
      const auto p = unrank(n, i);
      std::set<std::pair<std::uint32_t, std::uint32_t>> image;
      for (std::uint32_t x = 0; x < pow2(n); ++x) {
        const int q = p.exponents()[p.block_of(x)];
        for (std::uint32_t y = 0; y < pow2(n); ++y) {
          const Point b = apply(p, {x, y});
          CHECK(b == piecewise(p.widths(), n, {x, y}));
          CHECK(b == shuffle_form(n, q, {x, y}));
          CHECK(b == bit_shuffle(n, q, {x, y}));
          CHECK(apply_inverse(p, b) == Point{x, y});
          image.insert({b.x, b.y});
        }
      }
      CHECK(image.size() == std::size_t{1} << (2 * n));
    }
  }
}

TEST_CASE("identity and all-ones partitions") {
  for (int n = 0; n <= 4; ++n) {
    const auto id = BakerPartition::identity(n);
    const auto ones = BakerPartition::from_widths(Widths(pow2(n), 1));
    for (std::uint32_t x = 0; x < pow2(n); ++x) {
      for (std::uint32_t y = 0; y < pow2(n); ++y) {
        CHECK(apply(id, {x, y}) == Point{x, y});
        CHECK(apply_inverse(id, {x, y}) == Point{x, y});
        CHECK(apply(ones, {x, y}) == Point{y, x});
        CHECK(apply_inverse(ones, {x, y}) == Point{y, x});
      }
    }
  }
}

TEST_CASE("iteration and permutation tables") {
  const auto p = BakerPartition::parse("16,8,8,32,64,128");
  const std::uint32_t side = 256;
  CHECK(iterate(p, {17, 200}, 0) == Point{17, 200});
  Point q{17, 200};
  for (int r = 1; r <= 9; ++r) {
    q = apply(p, q);
    CHECK(iterate(p, {17, 200}, r) == q);
  }
  for (std::uint64_t rounds : {0, 1, 2, 7, 1000}) {
    const auto table = permutation_table(p, rounds);
    REQUIRE(table.size() == side * side);
    std::vector<bool> hit(table.size(), false);
    for (std::uint32_t x = 0; x < side; x += 5) {
      for (std::uint32_t y = 0; y < side; y += 3) {
        const Point b = iterate(p, {x, y}, rounds);
        CHECK(table[x * side + y] == b.x * side + b.y);
      }
    }
    for (auto t : table) hit[t] = true;
    CHECK(std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }));
  }
}

TEST_CASE("counting P_8 and enumerating n = 3 are fast") {
  const auto start = std::chrono::steady_clock::now();
  for (int rep = 0; rep < 10; ++rep) {
    CHECK(count_partitions(8) > 0);
    for (int i = 0; i < 26; ++i) CHECK(unrank(3, i).admissible());
  }
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
}
