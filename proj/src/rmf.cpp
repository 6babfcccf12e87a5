#include "adl/rmf.hpp"

#include "adl/error.hpp"
#include "adl/model.hpp"

#include <cmath>
#include <string>

namespace adl {

namespace {

constexpr double kMaxScaled = 0x1.0p61;

}  // namespace

double RMFRealization::value(std::size_t i) const {
    if (i >= m) throw DimensionError("RMF index " + std::to_string(i) + " out of range");
    if (entries.empty()) return 0.0;
    const auto& e = entries[i];
    return static_cast<double>(e.floor_value) / alpha + (e.bump ? 1.0 : 0.0);
}

RMFRealization rmf_zero(std::size_t m, double alpha) {
    RMFRealization r;
    r.alpha = alpha;
    r.m = m;
    return r;
}

RMFEntryLaw rmf_entry_law(double f, double alpha) {
    double scaled = std::floor(alpha * f);
    if (!(std::abs(scaled) < kMaxScaled)) throw DomainError("RMF: α·f out of integer range");
    double p = f - scaled / alpha;
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    return {static_cast<std::int64_t>(scaled), p};
}

RMFRealization rmf_make(std::span<const double> f, double C, double alpha, Rng& rng) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("RMF: α must be finite and > 0");
    if (!(C >= 0.0)) throw DomainError("RMF: C must be >= 0");
    if (f.empty()) throw DomainError("RMF: at least one point required");
    bool all_zero = true;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i]) || std::abs(f[i]) > C)
            throw DomainError("RMF: |f(" + std::to_string(i) + ")| = " + std::to_string(std::abs(f[i])) +
                              " exceeds C = " + std::to_string(C));
        all_zero = all_zero && f[i] == 0.0;
    }
    RMFRealization r;
    r.alpha = alpha;
    r.m = f.size();
    if (all_zero) return r;
    r.entries.reserve(f.size());
    for (double fi : f) {
        auto law = rmf_entry_law(fi, alpha);
        r.entries.push_back({law.floor_value, bernoulli(rng, law.bump_probability)});
    }
    return r;
}

std::size_t rmf_entry_symbol_bound(double alpha, double C) {
    return static_cast<std::size_t>(ceil_plus(std::log2(alpha * C))) + 2;
}

std::size_t rmf_payload_symbols(const RMFRealization& r) {
    std::size_t n = 0;
    for (const auto& e : r.entries) n += 1 + bijective_length(zigzag(e.floor_value));
    return n;
}

void write_rmf(MessageWriter& out, const RMFRealization& r) {
    out.open();
    if (r.is_zero()) {
        out.bit(false);
    } else {
        for (const auto& e : r.entries) {
            out.open();
            out.bit(e.bump);
            out.bijective(zigzag(e.floor_value));
            out.close();
        }
    }
    out.close();
}

RMFRealization read_rmf(MessageReader& in, double alpha, std::size_t m) {
    RMFRealization r;
    r.alpha = alpha;
    r.m = m;
    in.open();
    if (!in.next_is_open()) {
        std::size_t at = in.bit_offset();
        if (in.bit()) throw DecodeError("invalid RMF zero marker", at);
        in.close();
        return r;
    }
    r.entries.reserve(m);
    while (in.next_is_open()) {
        std::size_t at = in.bit_offset();
        if (r.entries.size() == m) throw DecodeError("too many RMF entries", at);
        in.open();
        RMFEntry e;
        e.bump = in.bit();
        e.floor_value = unzigzag(in.bijective());
        in.close();
        r.entries.push_back(e);
    }
    if (r.entries.size() != m) throw DecodeError("too few RMF entries", in.bit_offset());
    in.close();
    return r;
}

FramedMessage rmf_encode(const RMFRealization& r) {
    MessageWriter w;
    write_rmf(w, r);
    return w.finish();
}

RMFRealization rmf_decode(const FramedMessage& msg, double alpha, std::size_t m) {
    MessageReader rd(msg);
    auto r = read_rmf(rd, alpha, m);
    rd.expect_end();
    return r;
}

std::size_t rmf_encoded_bits(const RMFRealization& r) {
    if (r.is_zero()) return 6;
    return 2 * (2 + 2 * r.entries.size() + rmf_payload_symbols(r));
}

}  // namespace adl
