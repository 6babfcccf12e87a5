#pragma once

#include "adl/bitcodec.hpp"
#include "adl/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace adl {

struct RMFEntry {
    std::int64_t floor_value = 0;  // ⌊α f(i)⌋
    bool bump = false;
    friend bool operator==(const RMFEntry&, const RMFEntry&) = default;
};

// Random memorizing function of order α: f̃(i) = ⌊α f(i)⌋/α + b_i with
// P(b_i = 1) = f(i) − ⌊α f(i)⌋/α. A realization with no entries is the
// deterministic zero function on m points.
struct RMFRealization {
    double alpha = 1.0;
    std::size_t m = 0;
    std::vector<RMFEntry> entries;

    bool is_zero() const { return entries.empty(); }
    double value(std::size_t i) const;

    friend bool operator==(const RMFRealization&, const RMFRealization&) = default;
};

RMFRealization rmf_zero(std::size_t m, double alpha = 1.0);

// Requires |f(i)| ≤ C for every i and α > 0. All-zero f gives the zero marker.
RMFRealization rmf_make(std::span<const double> f, double C, double alpha, Rng& rng);

// Two-point law of one entry.
struct RMFEntryLaw {
    std::int64_t floor_value;
    double bump_probability;
};
RMFEntryLaw rmf_entry_law(double f, double alpha);

// Per-entry payload bound ⌈log₂(αC)⌉₊ + 2 in symbols.
std::size_t rmf_entry_symbol_bound(double alpha, double C);
// Payload symbols (bump bits plus value digits) over all entries, i.e. the
// length before framing.
std::size_t rmf_payload_symbols(const RMFRealization& r);

// Zero marker: open 0 close. Otherwise open, then per entry
// open [bump][minimal binary of zigzag(⌊αf⌋)] close, then close.
// α is a protocol parameter and is not written.
void write_rmf(MessageWriter& out, const RMFRealization& r);
RMFRealization read_rmf(MessageReader& in, double alpha, std::size_t m);
FramedMessage rmf_encode(const RMFRealization& r);
RMFRealization rmf_decode(const FramedMessage& msg, double alpha, std::size_t m);
std::size_t rmf_encoded_bits(const RMFRealization& r);

}  // namespace adl
