#ifndef BFTEX_ERRORS_HPP_
#define BFTEX_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bftex {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed file content. `offset()` is a byte offset for binary formats
/// and a 1-based line number for text formats (see `is_line()`).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset, bool is_line = false)
        : Error(what), offset_(offset), is_line_(is_line) {}

    std::size_t offset() const noexcept { return offset_; }
    bool is_line() const noexcept { return is_line_; }

private:
    std::size_t offset_;
    bool is_line_;
};

class UnsupportedFormat : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (sigma <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Caller broke a precondition (mismatched lengths, out-of-interior pixel, ...).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Invalid experiment / split / sweep configuration. `key()` names the
/// offending configuration key when there is one.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what, std::string key = {})
        : Error(what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

} // namespace bftex

#endif // BFTEX_ERRORS_HPP_
