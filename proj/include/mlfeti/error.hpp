// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MLFETI_ERROR_HPP
#define MLFETI_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlfeti {

enum class ErrorKind {
  invalid_argument,
  not_spd,
  singular,
  too_large,
  incompatible_grid,
  construction_failed,
  singular_interior,
  breakdown,
  stagnation,
  no_convergence,
  config,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and tests)
/// can react to the category without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace mlfeti

#endif  // MLFETI_ERROR_HPP
