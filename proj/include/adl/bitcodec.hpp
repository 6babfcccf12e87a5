#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace adl {

// An ordered sequence of bits. Length is always the exact bit count.
class BitString {
public:
    BitString() = default;
    // Parses a string of '0'/'1' characters.
    static BitString from_string(std::string_view s);
    // Inverse of to_hex(); nbits must not exceed 4 * hex.size().
    static BitString from_hex(std::string_view hex, std::size_t nbits);

    void push_back(bool b) { bits_.push_back(b ? 1 : 0); }
    void append(const BitString& other);

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    bool operator[](std::size_t i) const { return bits_[i] != 0; }

    std::string to_string() const;
    // Big-endian packing (first bit is the MSB of the first byte), final byte
    // zero-padded. The bit length travels separately.
    std::string to_hex() const;

    friend bool operator==(const BitString&, const BitString&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

// Sequential reader over a raw BitString.
class BitReader {
public:
    explicit BitReader(const BitString& bits) : bits_(bits) {}
    bool read_bit();
    std::uint64_t read_fixed(unsigned width);
    std::uint64_t read_gamma();
    std::size_t position() const { return pos_; }
    bool at_end() const { return pos_ == bits_.size(); }

private:
    const BitString& bits_;
    std::size_t pos_ = 0;
};

// Elias-gamma code of n + 1, so every n ≥ 0 is encodable. Length is
// 2⌊log₂(n+1)⌋ + 1.
BitString encode_gamma(std::uint64_t n);
std::uint64_t decode_gamma(const BitString& bits);
std::size_t gamma_length(std::uint64_t n);

// n written MSB-first in exactly `width` bits; requires n < 2^width.
BitString encode_fixed(std::uint64_t n, unsigned width);
std::uint64_t decode_fixed(const BitString& bits);

// Sign bit (1 = negative) followed by the gamma code of |n|.
BitString encode_signed_gamma(std::int64_t n);
std::size_t signed_gamma_length(std::int64_t n);

// Minimal binary: bits of z + 1 without the leading one. Not self-delimiting;
// only valid where an enclosing frame marks the end. Length ⌊log₂(z+1)⌋.
BitString encode_bijective(std::uint64_t z);
std::size_t bijective_length(std::uint64_t z);

// 0, -1, 1, -2, 2, ... ↦ 0, 1, 2, 3, 4, ...
inline std::uint64_t zigzag(std::int64_t n) {
    return n >= 0 ? 2 * static_cast<std::uint64_t>(n) : 2 * static_cast<std::uint64_t>(-(n + 1)) + 1;
}
inline std::int64_t unzigzag(std::uint64_t z) {
    return (z & 1) ? -static_cast<std::int64_t>(z >> 1) - 1 : static_cast<std::int64_t>(z >> 1);
}

// Framed alphabet. Every symbol occupies two physical bits.
enum class Symbol : std::uint8_t { Zero = 0b00, One = 0b01, Open = 0b10, Close = 0b11 };

// A symbol stream over {0, 1, open, close}.
class FramedMessage {
public:
    FramedMessage() = default;
    explicit FramedMessage(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}

    // Expands to physical bits; throws DecodeError on odd length.
    static FramedMessage from_bits(const BitString& bits);
    BitString to_bits() const;

    const std::vector<Symbol>& symbols() const { return symbols_; }
    std::size_t symbol_count() const { return symbols_.size(); }
    std::size_t physical_bits() const { return 2 * symbols_.size(); }
    // Number of 0/1 symbols (everything except brackets).
    std::size_t payload_symbols() const;
    // Brackets nest properly and close at depth zero.
    bool balanced() const;
    // Number of frames that open directly inside the outermost frame.
    std::size_t child_frame_count() const;

    friend bool operator==(const FramedMessage&, const FramedMessage&) = default;

private:
    std::vector<Symbol> symbols_;
};

// open + concatenated children + close. Length 2·Σ|c| + 4 physical bits.
FramedMessage frame(std::span<const BitString> children);
// open + children's symbols + close.
FramedMessage frame(std::span<const FramedMessage> children);
// Content of a single flat frame.
BitString unframe(const FramedMessage& msg);

// Builds framed messages. finish() verifies that every frame was closed.
class MessageWriter {
public:
    void open() { push(Symbol::Open); ++depth_; }
    void close();
    void bit(bool b) { push(b ? Symbol::One : Symbol::Zero); }
    void bits(const BitString& b);
    void fixed(std::uint64_t n, unsigned width);
    void gamma(std::uint64_t n);
    void signed_gamma(std::int64_t n);
    void bijective(std::uint64_t z);
    void message(const FramedMessage& m);
    FramedMessage finish();

private:
    void push(Symbol s) { symbols_.push_back(s); }
    std::vector<Symbol> symbols_;
    std::size_t depth_ = 0;
};

// Sequential decoder for framed messages; all failures raise DecodeError with
// the physical bit offset of the offending symbol.
class MessageReader {
public:
    // The reader views the message; it must outlive the reader.
    explicit MessageReader(FramedMessage&&) = delete;
    explicit MessageReader(const FramedMessage& msg) : syms_(msg.symbols()) {}

    void open();
    void close();
    bool bit();
    std::uint64_t fixed(unsigned width);
    std::uint64_t gamma();
    std::int64_t signed_gamma();
    // Reads payload bits up to (not including) the next close.
    std::uint64_t bijective();

    bool next_is_open() const { return pos_ < syms_.size() && syms_[pos_] == Symbol::Open; }
    bool next_is_close() const { return pos_ < syms_.size() && syms_[pos_] == Symbol::Close; }
    bool at_end() const { return pos_ == syms_.size(); }
    // Throws unless the whole message has been consumed.
    void expect_end() const;
    std::size_t bit_offset() const { return 2 * pos_; }

private:
    Symbol next(const char* what);
    const std::vector<Symbol>& syms_;
    std::size_t pos_ = 0;
};

}  // namespace adl
