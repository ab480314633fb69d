#pragma once

#include <stdexcept>
#include <string>

namespace gakco {

// Base for every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Malformed input files (carries the 1-based line number when known).
class ParseError : public Error
{
  public:
    ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what)
      , line_(line)
    {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

// Parameter validation failures.
class InvalidArgument : public Error
{
  public:
    using Error::Error;
};

// A 64-bit count accumulator would wrap.
class OverflowError : public Error
{
  public:
    using Error::Error;
};

// A profile invariant was broken (negative mismatch count, engine disagreement).
class ConsistencyError : public Error
{
  public:
    using Error::Error;
};

} // namespace gakco
