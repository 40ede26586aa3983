#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spudd {

// Base for every error raised by the library. Callers that only want to
// report failures can catch this; the subclasses carry the failure kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class DuplicateSeed : public Error {
 public:
  DuplicateSeed(std::size_t first, std::size_t second)
      : Error("duplicate seed position: seeds " + std::to_string(first) + " and " +
              std::to_string(second)),
        first_(first),
        second_(second) {}
  std::size_t first() const { return first_; }
  std::size_t second() const { return second_; }

 private:
  std::size_t first_, second_;
};

class EmptyContour : public Error {
 public:
  EmptyContour() : Error("superpower contour is empty: no grid edge intersects it") {}
  explicit EmptyContour(const std::string& what) : Error(what) {}
};

class ZeroArea : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Malformed OBJ input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace spudd
