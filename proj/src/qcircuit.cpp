#include "qbaker/qcircuit.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

#include "qbaker/errors.hpp"

namespace qbaker {

std::string wire_name(int n, int wire) {
  if (wire < 0 || wire >= 2 * n) throw std::invalid_argument("wire index out of range");
  return wire < n ? "y" + std::to_string(wire) : "x" + std::to_string(wire - n);
}

int parse_wire(int n, std::string_view name) {
  if (name.size() < 2 || (name[0] != 'x' && name[0] != 'y')) {
    throw FormatError("unknown wire '" + std::string(name) + "'");
  }
  int j = -1;
  auto [end, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), j);
  if (ec != std::errc{} || end != name.data() + name.size() || j < 0 || j >= n) {
    throw FormatError("unknown wire '" + std::string(name) + "'");
  }
  return name[0] == 'y' ? j : n + j;
}

void Circuit::validate() const {
  for (const auto& g : gates) {
    if (g.a < 0 || g.b < 0 || g.a >= 2 * n || g.b >= 2 * n) throw std::invalid_argument("gate wire out of range");
    if (g.a == g.b) throw std::invalid_argument("gate swaps a wire with itself");
    for (std::size_t i = 0; i < g.controls.size(); ++i) {
      const int w = g.controls[i].wire;
      if (w < 0 || w >= 2 * n) throw std::invalid_argument("control wire out of range");
      if (w == g.a || w == g.b) throw std::invalid_argument("control wire overlaps a target");
      for (std::size_t j = 0; j < i; ++j) {
        if (g.controls[j].wire == w) throw std::invalid_argument("duplicate control wire");
      }
    }
  }
}

std::vector<int> shuffle_wire_map(int n, int s) {
  if (s < 0 || s > n) throw std::invalid_argument("shuffle exponent out of range");
  std::vector<int> map(static_cast<std::size_t>(2 * n));
  for (int j = 0; j < n; ++j) {
    // y_j: low n-s bits become x'_j, the rest become the low bits of y'.
    map[j] = j < n - s ? n + j : j - (n - s);
    // x_j: low s bits become the high bits of x', the rest stay in y'.
    map[n + j] = j < s ? n + (n - s) + j : j;
  }
  return map;
}

namespace {

// Appends swaps realizing the wire permutation `to` (bit on w moves to to[w]).
void append_wire_permutation(const std::vector<int>& to, const std::vector<Control>& controls,
                             std::vector<Gate>& out) {
  std::vector<bool> seen(to.size(), false);
  for (std::size_t start = 0; start < to.size(); ++start) {
    if (seen[start] || to[start] == static_cast<int>(start)) continue;
    // Cycle start -> to[start] -> ...; swapping (start, w) for each successor
    // carries the bit held at `start` one step along the cycle.
    seen[start] = true;
    for (int w = to[start]; w != static_cast<int>(start); w = to[static_cast<std::size_t>(w)]) {
      seen[static_cast<std::size_t>(w)] = true;
      out.push_back(Gate{static_cast<int>(start), w, controls});
    }
  }
}

class Synthesizer {
 public:
  explicit Synthesizer(const BakerPartition& part) : part_(part), n_(part.n()) {}

  Circuit run() {
    Circuit c;
    c.n = n_;
    c.partition = part_.to_string();
    const int base = part_.exponents().front();
    append_wire_permutation(shuffle_wire_map(n_, base), {}, c.gates);

    for (std::size_t i = 1; i < part_.block_count(); ++i) {
      const int q = part_.exponents()[i];
      if (q > base) correction(base, q, part_.prefix(i), c.gates);
    }
    const std::uint64_t block = std::uint64_t{1} << base;
    for (std::uint64_t start = block; start < (std::uint64_t{1} << n_); start += block) {
      if (part_.exponents()[part_.block_of(start)] < base) refine(start, base, c.gates);
    }
    return c;
  }

 private:
  // Moves every state of the aligned 2^from block at `start` from form M_from
  // to form M_to, controlled on x_{n-1..max(from,to)} of `start`.
  void correction(int from, int to, std::uint64_t start, std::vector<Gate>& out) const {
    const auto src = shuffle_wire_map(n_, from);
    const auto dst = shuffle_wire_map(n_, to);
    std::vector<int> move(src.size());
    for (std::size_t w = 0; w < src.size(); ++w) move[static_cast<std::size_t>(src[w])] = dst[w];

    std::vector<Control> controls;
    const int lowest = std::max(from, to);
    for (int j = n_ - 1; j >= lowest; --j) {
      // Under M_from with j >= from, x_j sits on wire j.
      const int wire = src[static_cast<std::size_t>(n_ + j)];
      if (move[static_cast<std::size_t>(wire)] != wire) {
        throw std::logic_error("correction moves its own control wire " + wire_name(n_, wire));
      }
      controls.push_back(Control{wire, ((start >> j) & 1u) != 0});
    }
    append_wire_permutation(move, controls, out);
  }

  void refine(std::uint64_t start, int t, std::vector<Gate>& out) const {
    const std::size_t i = part_.block_of(start);
    if (part_.prefix(i) == start && part_.exponents()[i] == t) return;
    correction(t, t - 1, start, out);
    refine(start, t - 1, out);
    refine(start + (std::uint64_t{1} << (t - 1)), t - 1, out);
  }

  const BakerPartition& part_;
  int n_;
};

}  // namespace

Circuit synthesize(const BakerPartition& part) {
  if (!part.admissible()) throw std::invalid_argument("partition " + part.to_string() + " is not admissible");
  return Synthesizer(part).run();
}

std::uint64_t apply_gate(const Gate& gate, std::uint64_t basis) {
  for (const auto& c : gate.controls) {
    if (((basis >> c.wire) & 1u) != (c.positive ? 1u : 0u)) return basis;
  }
  const std::uint64_t a = (basis >> gate.a) & 1u;
  const std::uint64_t b = (basis >> gate.b) & 1u;
  if (a != b) basis ^= (std::uint64_t{1} << gate.a) | (std::uint64_t{1} << gate.b);
  return basis;
}

std::uint64_t apply_circuit(const Circuit& circuit, std::uint64_t basis) {
  for (const auto& g : circuit.gates) basis = apply_gate(g, basis);
  return basis;
}

std::vector<std::uint32_t> simulate_permutation(const Circuit& circuit) {
  if (circuit.n < 0 || 2 * circuit.n > 32) throw std::invalid_argument("circuit too wide to simulate (2n > 32)");
  if (2 * circuit.n > 30) throw std::invalid_argument("permutation table for 2n > 30 does not fit in memory");
  circuit.validate();
  const std::size_t size = std::size_t{1} << (2 * circuit.n);
  std::vector<std::uint32_t> table(size);
  for (std::size_t i = 0; i < size; ++i) table[i] = static_cast<std::uint32_t>(apply_circuit(circuit, i));
  return table;
}

bool verify(const Circuit& circuit, const BakerPartition& part) {
  if (circuit.n != part.n() || !part.admissible()) return false;
  const auto table = simulate_permutation(circuit);
  const std::uint32_t side = std::uint32_t{1} << part.n();
  for (std::uint32_t x = 0; x < side; ++x) {
    for (std::uint32_t y = 0; y < side; ++y) {
      const Point q = apply(part, {x, y});
      if (table[(std::size_t{x} << part.n()) | y] != ((std::uint64_t{q.x} << part.n()) | q.y)) return false;
    }
  }
  return true;
}

std::string emit_text(const Circuit& circuit) {
  circuit.validate();
  std::ostringstream out;
  out << "# n=" << circuit.n;
  if (!circuit.partition.empty()) out << " partition=" << circuit.partition;
  out << '\n';
  for (const auto& g : circuit.gates) {
    if (g.controls.empty()) {
      out << "SWAP ";
    } else {
      out << "CSWAP [";
      for (std::size_t i = 0; i < g.controls.size(); ++i) {
        if (i) out << ',';
        out << (g.controls[i].positive ? '+' : '-') << wire_name(circuit.n, g.controls[i].wire);
      }
      out << "] ";
    }
    out << wire_name(circuit.n, g.a) << ' ' << wire_name(circuit.n, g.b) << '\n';
  }
  return out.str();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    std::size_t end = pos;
    while (end < s.size() && s[end] != ' ' && s[end] != '\t') ++end;
    if (end > pos) words.push_back(s.substr(pos, end - pos));
    pos = end;
  }
  return words;
}

// Header "# n=<n> [partition=<widths>]". Returns false for ordinary comments.
bool parse_header(std::string_view line, Circuit& c) {
  auto words = split_words(trim(line.substr(1)));
  if (words.empty() || words[0].substr(0, 2) != "n=") return false;
  auto digits = words[0].substr(2);
  auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), c.n);
  if (ec != std::errc{} || end != digits.data() + digits.size() || c.n < 0 || c.n > 16) {
    throw FormatError("bad circuit header '" + std::string(line) + "'");
  }
  for (std::size_t i = 1; i < words.size(); ++i) {
    if (words[i].substr(0, 10) == "partition=") c.partition = std::string(words[i].substr(10));
  }
  return true;
}

}  // namespace

Circuit parse_text(std::string_view text) {
  Circuit c;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (!have_header && parse_header(line, c)) have_header = true;
      continue;
    }
    if (!have_header) throw FormatError(where + "gate before '# n=' header");
    Gate g;
    std::vector<std::string_view> targets;
    if (line.substr(0, 5) == "SWAP ") {
      targets = split_words(line.substr(5));
    } else if (line.substr(0, 6) == "CSWAP ") {
      auto rest = trim(line.substr(6));
      if (rest.empty() || rest.front() != '[') throw FormatError(where + "expected '[' after CSWAP");
      const auto close = rest.find(']');
      if (close == std::string_view::npos) throw FormatError(where + "missing ']'");
      auto list = rest.substr(1, close - 1);
      std::size_t cpos = 0;
      while (cpos <= list.size()) {
        std::size_t comma = list.find(',', cpos);
        if (comma == std::string_view::npos) comma = list.size();
        auto item = trim(list.substr(cpos, comma - cpos));
        if (item.size() < 2 || (item.front() != '+' && item.front() != '-')) {
          throw FormatError(where + "control must be +wire or -wire");
        }
        g.controls.push_back(Control{parse_wire(c.n, item.substr(1)), item.front() == '+'});
        cpos = comma + 1;
      }
      targets = split_words(rest.substr(close + 1));
    } else {
      throw FormatError(where + "unknown gate '" + std::string(line) + "'");
    }
    if (targets.size() != 2) throw FormatError(where + "expected exactly two target wires");
    g.a = parse_wire(c.n, targets[0]);
    g.b = parse_wire(c.n, targets[1]);
    c.gates.push_back(std::move(g));
  }
  if (!have_header) throw FormatError("missing '# n=' header");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return c;
}

CircuitStats stats(const Circuit& circuit) {
  CircuitStats s;
  s.gates = circuit.gates.size();
  for (const auto& g : circuit.gates) {
    if (g.controlled()) ++s.controlled;
    s.max_controls = std::max(s.max_controls, g.controls.size());
  }
  return s;
}

}  // namespace qbaker
