#include "adl/bitcodec.hpp"

#include "adl/error.hpp"

#include <bit>

namespace adl {

namespace {

constexpr unsigned kMaxGammaZeros = 63;

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

BitString BitString::from_string(std::string_view s) {
    BitString out;
    out.bits_.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '0' && s[i] != '1') throw DecodeError("invalid bit character", i);
        out.bits_.push_back(s[i] == '1');
    }
    return out;
}

BitString BitString::from_hex(std::string_view hex, std::size_t nbits) {
    if (nbits > 4 * hex.size()) throw DecodeError("hex string shorter than bit length", 4 * hex.size());
    if ((nbits + 7) / 8 * 2 != hex.size()) throw DecodeError("hex length does not match bit length", 0);
    BitString out;
    out.bits_.reserve(nbits);
    for (std::size_t i = 0; i < nbits; ++i) {
        int v = hex_value(hex[i / 4]);
        if (v < 0) throw DecodeError("invalid hex digit", (i / 4) * 4);
        out.bits_.push_back((v >> (3 - i % 4)) & 1);
    }
    for (std::size_t i = nbits; i < 4 * hex.size(); ++i) {
        int v = hex_value(hex[i / 4]);
        if (v < 0) throw DecodeError("invalid hex digit", (i / 4) * 4);
        if ((v >> (3 - i % 4)) & 1) throw DecodeError("nonzero padding", i);
    }
    return out;
}

void BitString::append(const BitString& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

std::string BitString::to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s.push_back(b ? '1' : '0');
    return s;
}

std::string BitString::to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::size_t nbytes = (bits_.size() + 7) / 8;
    std::string s;
    s.reserve(2 * nbytes);
    for (std::size_t byte = 0; byte < nbytes; ++byte) {
        unsigned v = 0;
        for (std::size_t k = 0; k < 8; ++k) {
            std::size_t i = 8 * byte + k;
            v = (v << 1) | (i < bits_.size() ? bits_[i] : 0u);
        }
        s.push_back(digits[v >> 4]);
        s.push_back(digits[v & 15]);
    }
    return s;
}

bool BitReader::read_bit() {
    if (pos_ >= bits_.size()) throw DecodeError("truncated bit string", pos_);
    return bits_[pos_++];
}

std::uint64_t BitReader::read_fixed(unsigned width) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | (read_bit() ? 1u : 0u);
    return v;
}

std::uint64_t BitReader::read_gamma() {
    std::size_t start = pos_;
    unsigned zeros = 0;
    while (!read_bit()) {
        if (++zeros > kMaxGammaZeros) throw DecodeError("gamma prefix too long", start);
    }
    std::uint64_t v = 1;
    for (unsigned i = 0; i < zeros; ++i) v = (v << 1) | (read_bit() ? 1u : 0u);
    return v - 1;
}

BitString encode_gamma(std::uint64_t n) {
    if (n == UINT64_MAX) throw DomainError("encode_gamma: value too large");
    std::uint64_t v = n + 1;
    unsigned nbits = static_cast<unsigned>(std::bit_width(v));
    BitString out;
    for (unsigned i = 1; i < nbits; ++i) out.push_back(false);
    for (unsigned i = nbits; i-- > 0;) out.push_back((v >> i) & 1);
    return out;
}

std::uint64_t decode_gamma(const BitString& bits) {
    BitReader r(bits);
    std::uint64_t v = r.read_gamma();
    if (!r.at_end()) throw DecodeError("trailing bits after gamma code", r.position());
    return v;
}

std::size_t gamma_length(std::uint64_t n) {
    return 2 * (static_cast<std::size_t>(std::bit_width(n + 1)) - 1) + 1;
}

BitString encode_fixed(std::uint64_t n, unsigned width) {
    if (width > 64 || (width < 64 && (n >> width) != 0))
        throw DomainError("encode_fixed: " + std::to_string(n) + " does not fit in " +
                          std::to_string(width) + " bits");
    BitString out;
    for (unsigned i = width; i-- > 0;) out.push_back((n >> i) & 1);
    return out;
}

std::uint64_t decode_fixed(const BitString& bits) {
    if (bits.size() > 64) throw DecodeError("fixed-width field wider than 64 bits", 64);
    BitReader r(bits);
    return r.read_fixed(static_cast<unsigned>(bits.size()));
}

BitString encode_signed_gamma(std::int64_t n) {
    BitString out;
    out.push_back(n < 0);
    std::uint64_t mag = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
    out.append(encode_gamma(mag));
    return out;
}

std::size_t signed_gamma_length(std::int64_t n) {
    std::uint64_t mag = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
    return 1 + gamma_length(mag);
}

BitString encode_bijective(std::uint64_t z) {
    if (z == UINT64_MAX) throw DomainError("encode_bijective: value too large");
    std::uint64_t v = z + 1;
    unsigned len = static_cast<unsigned>(std::bit_width(v)) - 1;
    BitString out;
    for (unsigned i = len; i-- > 0;) out.push_back((v >> i) & 1);
    return out;
}

std::size_t bijective_length(std::uint64_t z) {
    return static_cast<std::size_t>(std::bit_width(z + 1)) - 1;
}

FramedMessage FramedMessage::from_bits(const BitString& bits) {
    if (bits.size() % 2 != 0) throw DecodeError("odd physical length", bits.size() - 1);
    std::vector<Symbol> syms;
    syms.reserve(bits.size() / 2);
    for (std::size_t i = 0; i < bits.size(); i += 2)
        syms.push_back(static_cast<Symbol>((bits[i] ? 2 : 0) | (bits[i + 1] ? 1 : 0)));
    return FramedMessage(std::move(syms));
}

BitString FramedMessage::to_bits() const {
    BitString out;
    for (Symbol s : symbols_) {
        auto v = static_cast<std::uint8_t>(s);
        out.push_back(v & 2);
        out.push_back(v & 1);
    }
    return out;
}

std::size_t FramedMessage::payload_symbols() const {
    std::size_t n = 0;
    for (Symbol s : symbols_) n += (s == Symbol::Zero || s == Symbol::One);
    return n;
}

bool FramedMessage::balanced() const {
    std::size_t depth = 0;
    for (Symbol s : symbols_) {
        if (s == Symbol::Open) {
            ++depth;
        } else if (s == Symbol::Close) {
            if (depth == 0) return false;
            --depth;
        }
    }
    return depth == 0;
}

std::size_t FramedMessage::child_frame_count() const {
    std::size_t depth = 0, count = 0;
    for (Symbol s : symbols_) {
        if (s == Symbol::Open) {
            if (depth == 1) ++count;
            ++depth;
        } else if (s == Symbol::Close) {
            if (depth > 0) --depth;
        }
    }
    return count;
}

FramedMessage frame(std::span<const BitString> children) {
    MessageWriter w;
    w.open();
    for (const auto& c : children) w.bits(c);
    w.close();
    return w.finish();
}

FramedMessage frame(std::span<const FramedMessage> children) {
    MessageWriter w;
    w.open();
    for (const auto& c : children) w.message(c);
    w.close();
    return w.finish();
}

BitString unframe(const FramedMessage& msg) {
    MessageReader r(msg);
    r.open();
    BitString out;
    while (!r.next_is_close()) out.push_back(r.bit());
    r.close();
    r.expect_end();
    return out;
}

void MessageWriter::close() {
    if (depth_ == 0) throw DomainError("MessageWriter: close without open");
    --depth_;
    push(Symbol::Close);
}

void MessageWriter::bits(const BitString& b) {
    for (std::size_t i = 0; i < b.size(); ++i) bit(b[i]);
}

void MessageWriter::fixed(std::uint64_t n, unsigned width) { bits(encode_fixed(n, width)); }
void MessageWriter::gamma(std::uint64_t n) { bits(encode_gamma(n)); }
void MessageWriter::signed_gamma(std::int64_t n) { bits(encode_signed_gamma(n)); }
void MessageWriter::bijective(std::uint64_t z) { bits(encode_bijective(z)); }

void MessageWriter::message(const FramedMessage& m) {
    symbols_.insert(symbols_.end(), m.symbols().begin(), m.symbols().end());
}

FramedMessage MessageWriter::finish() {
    if (depth_ != 0) throw DomainError("MessageWriter: unclosed frame");
    FramedMessage out(std::move(symbols_));
    symbols_.clear();
    return out;
}

Symbol MessageReader::next(const char* what) {
    if (pos_ >= syms_.size()) throw DecodeError(std::string("truncated message, expected ") + what, 2 * pos_);
    return syms_[pos_++];
}

void MessageReader::open() {
    if (next("open") != Symbol::Open) throw DecodeError("expected open", 2 * (pos_ - 1));
}

void MessageReader::close() {
    if (next("close") != Symbol::Close) throw DecodeError("expected close", 2 * (pos_ - 1));
}

bool MessageReader::bit() {
    Symbol s = next("bit");
    if (s == Symbol::Open || s == Symbol::Close) throw DecodeError("expected payload bit", 2 * (pos_ - 1));
    return s == Symbol::One;
}

std::uint64_t MessageReader::fixed(unsigned width) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | (bit() ? 1u : 0u);
    return v;
}

std::uint64_t MessageReader::gamma() {
    std::size_t start = bit_offset();
    unsigned zeros = 0;
    while (!bit()) {
        if (++zeros > kMaxGammaZeros) throw DecodeError("gamma prefix too long", start);
    }
    std::uint64_t v = 1;
    for (unsigned i = 0; i < zeros; ++i) v = (v << 1) | (bit() ? 1u : 0u);
    return v - 1;
}

std::int64_t MessageReader::signed_gamma() {
    bool negative = bit();
    std::size_t start = bit_offset();
    std::uint64_t mag = gamma();
    if (mag > static_cast<std::uint64_t>(INT64_MAX)) throw DecodeError("signed value out of range", start);
    if (negative && mag == 0) throw DecodeError("negative zero", start);
    return negative ? -static_cast<std::int64_t>(mag) : static_cast<std::int64_t>(mag);
}

std::uint64_t MessageReader::bijective() {
    std::size_t start = bit_offset();
    std::uint64_t v = 1;
    unsigned len = 0;
    while (!next_is_close()) {
        if (++len > 63) throw DecodeError("minimal-binary field too long", start);
        v = (v << 1) | (bit() ? 1u : 0u);
    }
    return v - 1;
}

void MessageReader::expect_end() const {
    if (!at_end()) throw DecodeError("trailing symbols", 2 * pos_);
}

}  // namespace adl
