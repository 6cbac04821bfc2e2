// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vidtok {

// Base of everything the library throws. The CLI maps InputError-derived
// failures to exit status 1 and ContractError-derived failures to 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

class DimensionMismatch : public InputError {
 public:
  using InputError::InputError;
};

class FormatError : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

// Raised by an encoder plug that does not preserve the (rows, cols) shape.
class EncoderShapeError : public ContractError {
 public:
  using ContractError::ContractError;
};

class BudgetError : public ContractError {
 public:
  BudgetError(const std::string& what, std::size_t vision, std::size_t total,
              std::size_t max_vision, std::size_t max_total)
      : ContractError(what + " (vision=" + std::to_string(vision) +
                      " total=" + std::to_string(total) +
                      " max_vision=" + std::to_string(max_vision) +
                      " max_total=" + std::to_string(max_total) + ")"),
        vision_tokens(vision),
        total_tokens(total),
        max_vision_tokens(max_vision),
        max_total_tokens(max_total) {}

  std::size_t vision_tokens;
  std::size_t total_tokens;
  std::size_t max_vision_tokens;
  std::size_t max_total_tokens;
};

}  // namespace vidtok
