#pragma once

// SWAP / multi-controlled-SWAP circuits over the 2n wires of a 2^n x 2^n
// lattice register.
//
// Basis convention: the state (x, y) is the integer x * 2^n + y. Wire j < n
// carries y_j, wire n + j carries x_j. Gates act on basis states by exchanging
// two bits of the index whenever every control bit has its required value.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qbaker/baker.hpp"

namespace qbaker {

std::string wire_name(int n, int wire);
// Accepts "x<j>" / "y<j>"; throws FormatError for unknown names.
int parse_wire(int n, std::string_view name);

struct Control {
  int wire = 0;
  bool positive = true;  // fires on 1; false fires on 0
  friend bool operator==(const Control&, const Control&) = default;
};

struct Gate {
  int a = 0;
  int b = 0;
  std::vector<Control> controls;
  bool controlled() const { return !controls.empty(); }
  friend bool operator==(const Gate&, const Gate&) = default;
};

struct Circuit {
  int n = 0;
  std::string partition;  // block widths for the text header; may be empty
  std::vector<Gate> gates;

  // Throws std::invalid_argument on out-of-range wires or control/target overlap.
  void validate() const;
  friend bool operator==(const Circuit&, const Circuit&) = default;
};

// Unconditional M_{q1} stage followed by controlled corrections. Regions with
// q_i > q_1 get one correction M_{q_i} o M_{q_1}^{-1} controlled on the
// region's selector bits x_{n-1..q_i}. The 2^{q_1}-aligned blocks made of
// smaller regions are refined one exponent at a time: M_{t-1} o M_t^{-1}
// controlled on the block's bits x_{n-1..t}, then each half recursively.
// Every correction leaves its control wires in place.
Circuit synthesize(const BakerPartition& part);

// Wire map of M_s: bit on wire w lands on wire result[w].
std::vector<int> shuffle_wire_map(int n, int s);

std::uint64_t apply_gate(const Gate& gate, std::uint64_t basis);
std::uint64_t apply_circuit(const Circuit& circuit, std::uint64_t basis);

// table[i] = image of basis state i. Requires 2n <= 32.
std::vector<std::uint32_t> simulate_permutation(const Circuit& circuit);

bool verify(const Circuit& circuit, const BakerPartition& part);

std::string emit_text(const Circuit& circuit);
Circuit parse_text(std::string_view text);

struct CircuitStats {
  std::size_t gates = 0;
  std::size_t controlled = 0;
  std::size_t max_controls = 0;
  friend bool operator==(const CircuitStats&, const CircuitStats&) = default;
};

CircuitStats stats(const Circuit& circuit);

}  // namespace qbaker
