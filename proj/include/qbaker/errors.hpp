#pragma once

#include <stdexcept>
#include <string>

namespace qbaker {

// Malformed files, manifests, key files, gate lists.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A circuit or decryption failed its exact check.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Nonzero bits in blank images or padded planes after recomposition.
class PaddingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qbaker
