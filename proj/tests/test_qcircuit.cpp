#include <doctest.h>

#include <random>
#include <set>
#include <string>

#include "qbaker/baker.hpp"
#include "qbaker/errors.hpp"
#include "qbaker/qcircuit.hpp"

using namespace qbaker;

namespace {

// "x1x0y0" lists source bits most significant first.
std::uint32_t eval_bits(const std::string& pattern, std::uint32_t x, std::uint32_t y) {
  std::uint32_t out = 0;
  for (std::size_t i = 0; i < pattern.size(); i += 2) {
    const std::uint32_t src = pattern[i] == 'x' ? x : y;
    out = (out << 1) | ((src >> (pattern[i + 1] - '0')) & 1u);
  }
  return out;
}

struct BitMap {
  std::string x, y;
  Point operator()(Point p) const { return {eval_bits(x, p.x, p.y), eval_bits(y, p.x, p.y)}; }
};

std::uint64_t basis(int n, Point p) { return (std::uint64_t{p.x} << n) | p.y; }

}  // namespace

TEST_CASE("wire naming") {
  CHECK(wire_name(3, 0) == "y0");
  CHECK(wire_name(3, 2) == "y2");
  CHECK(wire_name(3, 3) == "x0");
  CHECK(wire_name(3, 5) == "x2");
  CHECK(parse_wire(3, "x1") == 4);
  CHECK(parse_wire(8, "y7") == 7);
  CHECK_THROWS(parse_wire(3, "x3"));
  CHECK_THROWS(parse_wire(3, "z0"));
  CHECK_THROWS(parse_wire(3, "x"));
}

TEST_CASE("shuffle wire map agrees with the lattice shuffle") {
  for (int n = 1; n <= 5; ++n) {
    for (int s = 0; s <= n; ++s) {
      const auto map = shuffle_wire_map(n, s);
      REQUIRE(map.size() == static_cast<std::size_t>(2 * n));
      for (int w = 0; w < 2 * n; ++w) {
        const std::uint64_t in = std::uint64_t{1} << w;
        const Point p{static_cast<std::uint32_t>(in >> n), static_cast<std::uint32_t>(in & ((1u << n) - 1))};
        CHECK(basis(n, bit_shuffle(n, s, p)) == std::uint64_t{1} << map[w]);
      }
    }
  }
}

TEST_CASE("simulation semantics") {
  Circuit empty{2, "", {}};
  const auto id = simulate_permutation(empty);
  for (std::uint32_t i = 0; i < 16; ++i) CHECK(id[i] == i);

  Circuit one{1, "", {Gate{parse_wire(1, "x0"), parse_wire(1, "y0"), {}}}};
  CHECK(simulate_permutation(one) == std::vector<std::uint32_t>{0, 2, 1, 3});

  const Gate cs{0, 1, {Control{2, true}}};
  CHECK(apply_gate(cs, 0b001) == 0b001);  // control low: untouched
  CHECK(apply_gate(cs, 0b101) == 0b110);
  const Gate neg{0, 1, {Control{2, false}}};
  CHECK(apply_gate(neg, 0b001) == 0b010);
  CHECK(apply_gate(neg, 0b101) == 0b101);
}

TEST_CASE("trivial partitions give trivial circuits") {
  for (int n = 0; n <= 6; ++n) {
    CHECK(synthesize(BakerPartition::identity(n)).gates.empty());
    const auto ones = BakerPartition::from_widths(std::vector<std::uint64_t>(std::size_t{1} << n, 1));
    const auto c = synthesize(ones);
    CHECK(stats(c) == CircuitStats{static_cast<std::size_t>(n), 0, 0});
    std::set<std::pair<int, int>> pairs;
    for (const auto& g : c.gates) pairs.insert({std::min(g.a, g.b), std::max(g.a, g.b)});
    std::set<std::pair<int, int>> want;
    for (int j = 0; j < n; ++j) want.insert({j, n + j});
    CHECK(pairs == want);
    CHECK(verify(c, ones));
  }
}

TEST_CASE("(4,2,2) circuit: f everywhere, g gated by x2") {
  const auto p = BakerPartition::parse("4,2,2");
  const auto c = synthesize(p);
  CHECK(verify(c, p));

  const BitMap f{"x1x0y0", "x2y2y1"};
  const BitMap g{"x1y0x0", "y2x2y1"};
  // Uncontrolled prefix realizes f; the controlled tail realizes g.
  Circuit prefix{c.n, "", {}}, tail{c.n, "", {}};
  for (const auto& gate : c.gates) (gate.controlled() ? tail : prefix).gates.push_back(gate);
  CHECK_FALSE(tail.gates.empty());
  for (const auto& gate : tail.gates) {
    REQUIRE(gate.controls.size() == 1);
    // After f, x2 sits on the wire that f writes as the top y bit.
    CHECK(gate.controls[0] == Control{parse_wire(3, "y2"), true});
  }
  for (std::uint32_t x = 0; x < 8; ++x) {
    for (std::uint32_t y = 0; y < 8; ++y) {
      const Point fp = f({x, y});
      CHECK(apply_circuit(prefix, basis(3, {x, y})) == basis(3, fp));
      const Point want = ((x >> 2) & 1u) ? g(fp) : fp;
      CHECK(apply_circuit(c, basis(3, {x, y})) == basis(3, want));
      CHECK(want == apply(p, {x, y}));
    }
  }
}

TEST_CASE("(16,8,8,32,64,128) against its case table and subfunctions") {
  const auto p = BakerPartition::parse("16,8,8,32,64,128");
  const BitMap rows[5] = {
      {"x3x2x1x0y3y2y1y0", "x7x6x5x4y7y6y5y4"},
      {"x2x1x0y4y3y2y1y0", "x7x6x5x4x3y7y6y5"},
      {"x4x3x2x1x0y2y1y0", "x7x6x5y7y6y5y4y3"},
      {"x5x4x3x2x1x0y1y0", "x7x6y7y6y5y4y3y2"},
      {"x6x5x4x3x2x1x0y0", "x7y7y6y5y4y3y2y1"},
  };
  const BitMap f = rows[0];
  const BitMap g{"y6y5y4x7x6x5x4x0", "y7y3y2y1y0x3x2x1"};
  const BitMap h{"y5y4x7x6x5x4x1x0", "y7y6y3y2y1y0x3x2"};
  const BitMap k{"y4x7x6x5x4x2x1x0", "y7y6y5y3y2y1y0x3"};
  const BitMap l{"x6x5x4y0x3x2x1x0", "y7y6y5y4x7y3y2y1"};
  const auto c = synthesize(p);
  CHECK(verify(c, p));
  for (std::uint32_t x = 0; x < 256; ++x) {
    const int row = x >= 128 ? 4 : x >= 64 ? 3 : x >= 32 ? 2 : x >= 16 ? 1 : 0;
    const BitMap* sub = row == 4 ? &g : row == 3 ? &h : row == 2 ? &k : row == 1 ? &l : nullptr;
    for (std::uint32_t y = 0; y < 256; ++y) {
      const Point want = rows[row]({x, y});
      CHECK(apply(p, {x, y}) == want);
      const Point fp = f({x, y});
      CHECK((sub ? (*sub)(fp) : fp) == want);
      CHECK(apply_circuit(c, basis(8, {x, y})) == basis(8, want));
    }
  }
}

TEST_CASE("every n = 3 partition synthesizes to a verified circuit") {
  for (int i = 0; i < 26; ++i) {
    const auto p = unrank(3, i);
    const auto c = synthesize(p);
    CHECK_MESSAGE(verify(c, p), p.to_string());
    CHECK(c.partition == p.to_string());
  }
}

TEST_CASE("random n = 6 and n = 8 partitions synthesize to verified circuits") {
  std::mt19937_64 rng(5);
  for (int n : {4, 6, 8}) {
    const BigInt total = count_partitions(n);
    for (int t = 0; t < 8; ++t) {
      BigInt idx = 0;
      for (int w = 0; w < 6; ++w) idx = (idx << 32) | rng() % 4294967296ull;
      const auto p = unrank(n, idx % total);
      CHECK_MESSAGE(verify(synthesize(p), p), p.to_string());
    }
  }
}

TEST_CASE("mutated circuits fail verification") {
  const auto p = BakerPartition::parse("16,8,8,32,64,128");
  const auto c = synthesize(p);
  for (std::size_t drop = 0; drop < c.gates.size(); drop += 7) {
    Circuit broken = c;
    broken.gates.erase(broken.gates.begin() + static_cast<std::ptrdiff_t>(drop));
    CHECK_FALSE(verify(broken, p));
  }
  const auto small = BakerPartition::parse("4,2,2");
  const auto sc = synthesize(small);
  for (std::size_t drop = 0; drop < sc.gates.size(); ++drop) {
    Circuit broken = sc;
    broken.gates.erase(broken.gates.begin() + static_cast<std::ptrdiff_t>(drop));
    CHECK_FALSE(verify(broken, small));
  }
  CHECK_FALSE(verify(sc, BakerPartition::parse("2,2,4")));
  CHECK_FALSE(verify(sc, BakerPartition::parse("4,4")));
}

TEST_CASE("gate-list text round trip") {
  Circuit c{8, "", {}};
  c.gates.push_back(Gate{parse_wire(8, "x0"), parse_wire(8, "y2"), {}});
  c.gates.push_back(Gate{parse_wire(8, "y1"), parse_wire(8, "y4"),
                         {{parse_wire(8, "x7"), true}, {parse_wire(8, "x6"), false}, {parse_wire(8, "x5"), false}}});
  const std::string text = emit_text(c);
  CHECK(text.find("SWAP x0 y2\n") != std::string::npos);
  CHECK(text.find("CSWAP [+x7,-x6,-x5] y1 y4\n") != std::string::npos);
  CHECK(parse_text(text) == c);

  for (const char* widths : {"4,2,2", "16,8,8,32,64,128", "1,1,2,4,8"}) {
    const auto sc = synthesize(BakerPartition::parse(widths));
    const auto back = parse_text(emit_text(sc));
    CHECK(back == sc);
    CHECK(stats(back) == stats(sc));
  }
}

TEST_CASE("gate-list parse errors") {
  CHECK_THROWS_AS(parse_text("SWAP x0 y0\n"), FormatError);
  CHECK_THROWS_AS(parse_text("# n=2\nSWAP x0\n"), FormatError);
  CHECK_THROWS_AS(parse_text("# n=2\nTOFFOLI x0 y0 y1\n"), FormatError);
  CHECK_THROWS_AS(parse_text("# n=2\nCSWAP +x1 x0 y0\n"), FormatError);
  CHECK_THROWS_AS(parse_text("# n=2\nCSWAP [x1] x0 y0\n"), FormatError);
  CHECK_THROWS_AS(parse_text("# n=2\nSWAP x0 x0\n"), FormatError);
  CHECK_THROWS_AS(parse_text("# n=2\nCSWAP [+x0] x0 y0\n"), FormatError);
  CHECK_THROWS_AS(parse_text("# n=2\nSWAP x2 y0\n"), FormatError);
  CHECK(parse_text("# n=2\n\n# comment\nSWAP x0 y0  \n").gates.size() == 1);
}

TEST_CASE("circuit statistics") {
  CHECK(stats(Circuit{3, "", {}}) == CircuitStats{0, 0, 0});
  const auto c = synthesize(BakerPartition::parse("4,2,2"));
  std::size_t controlled = 0, widest = 0;
  for (const auto& g : c.gates) {
    controlled += g.controlled();
    widest = std::max(widest, g.controls.size());
  }
  CHECK(stats(c) == CircuitStats{c.gates.size(), controlled, widest});
}

TEST_CASE("simulation size limit") {
  CHECK_THROWS_AS(simulate_permutation(Circuit{16, "", {}}), std::invalid_argument);
}
