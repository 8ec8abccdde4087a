#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rankorder {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed Newick input. `position` is the 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// A caller broke an operation's precondition (unknown vertex, leaf where an
// interior vertex is required, non-binary tree, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

class ResolutionLimitError : public Error {
 public:
  ResolutionLimitError(const std::string& count, std::size_t limit)
      : Error("tree has " + count + " binary resolutions, more than the limit of " +
              std::to_string(limit)),
        count_(count) {}

  // Exact resolution count in decimal.
  const std::string& count() const { return count_; }

 private:
  std::string count_;
};

class EnumerationLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace rankorder
