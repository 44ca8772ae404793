//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ggalg {

// Graph-level invariant violation (bad remap, edge outside node support).
class MalformedGraph : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class MalformedRule : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller broke an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The host universe ran out of free indices while firing a rule.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotApplicable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column, const std::string& source = "")
      : std::runtime_error((source.empty() ? "" : source + ":") + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + message),
        message_(message),
        line_(line),
        column_(column) {}

  // The diagnostic without its position prefix.
  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace ggalg
