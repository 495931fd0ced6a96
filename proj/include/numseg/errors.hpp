#ifndef NUMSEG_ERRORS_HPP
#define NUMSEG_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace numseg {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Input validation failures (bad files, bad config, bad arguments).
class ValidationError : public Error {
public:
  using Error::Error;
};

// Failures that occur while processing valid inputs.
class RuntimeFailure : public Error {
public:
  using Error::Error;
};

class DuplicateElement : public ValidationError {
public:
  explicit DuplicateElement(const std::string& element)
      : ValidationError("duplicate cipher element: " + element),
        element_(element) {}
  const std::string& element() const { return element_; }

private:
  std::string element_;
};

class AlphabetError : public ValidationError {
public:
  AlphabetError(const std::string& what, size_t line, size_t column)
      : ValidationError(what + " (line " + std::to_string(line) + ", col " +
                        std::to_string(column) + ")"),
        line_(line), column_(column) {}
  explicit AlphabetError(const std::string& what)
      : ValidationError(what), line_(0), column_(0) {}
  size_t line() const { return line_; }
  size_t column() const { return column_; }

private:
  size_t line_, column_;
};

class PoolExhausted : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class MissingMapping : public ValidationError {
public:
  explicit MissingMapping(char c)
      : ValidationError(std::string("no key element for plaintext character '") +
                        c + "'"),
        character_(c) {}
  char character() const { return character_; }

private:
  char character_;
};

class EmptyCorpus : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class EmptyReference : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class UnsegmentablePosition : public RuntimeFailure {
public:
  UnsegmentablePosition(size_t offset, const std::string& context)
      : RuntimeFailure("no key element matches ciphertext at offset " +
                       std::to_string(offset) + " (context: \"" + context +
                       "\")"),
        offset_(offset) {}
  size_t offset() const { return offset_; }

private:
  size_t offset_;
};

class NoPath : public RuntimeFailure {
public:
  using RuntimeFailure::RuntimeFailure;
};

}  // namespace numseg

#endif  // NUMSEG_ERRORS_HPP
