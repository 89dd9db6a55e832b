#pragma once

#include <stdexcept>
#include <string>

namespace geoqc {

// Thrown when numerical work produces non-finite values or otherwise
// cannot continue (overflow mid-integration, singular input, ...).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a file or text payload cannot be decoded. line == 0 means
// "not line-addressable" (e.g. a header-level problem).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace geoqc
