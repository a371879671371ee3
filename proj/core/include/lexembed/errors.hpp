#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexembed {

// Malformed source text. `position` is a byte offset into the input.
struct parse_error : std::runtime_error {
  parse_error(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"),
        position(pos) {}
  std::size_t position;
};

// The elimination engine exceeded its configured atom budget.
struct qe_limit_error : std::runtime_error {
  explicit qe_limit_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A well-formed input was used outside an operation's contract
// (quantified formula fed to the evaluator, arity mismatch, ...).
struct semantic_error : std::runtime_error {
  explicit semantic_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An internal stage of the embedding pipeline detected a broken invariant
// or an input outside the supported fragment.
struct pipeline_error : std::runtime_error {
  explicit pipeline_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lexembed
