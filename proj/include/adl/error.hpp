#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adl {

// Base for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand shapes do not agree (matrix rows vs vector length etc.).
class DimensionError : public Error {
public:
    using Error::Error;
};

// A documented precondition on a value was violated.
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed or truncated encoded stream. Offsets refer to the physical bit
// stream (two bits per framed symbol).
class DecodeError : public Error {
public:
    DecodeError(const std::string& what, std::size_t bit_offset)
        : Error(what + " at bit " + std::to_string(bit_offset) + " (byte " +
                std::to_string(bit_offset / 8) + ")"),
          bit_offset_(bit_offset) {}

    std::size_t bit_offset() const noexcept { return bit_offset_; }
    std::size_t byte_offset() const noexcept { return bit_offset_ / 8; }

private:
    std::size_t bit_offset_;
};

// A computation was refused because its size exceeds a fixed budget.
class RefusalError : public Error {
public:
    RefusalError(const std::string& what, double size)
        : Error(what), size_(size) {}
    double size() const noexcept { return size_; }

private:
    double size_;
};

}  // namespace adl
