#pragma once

#include <stdexcept>
#include <string>

namespace qcv {

// Dimension limits (eigensolver cap, exact-enumeration cap) were exceeded.
struct CapExceededError : std::runtime_error {
  explicit CapExceededError(const std::string& what) : std::runtime_error(what) {}
};

// Networked-mode failures: connection, framing, timeout, schema violations.
struct TransportError : std::runtime_error {
  explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qcv
