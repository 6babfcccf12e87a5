#pragma once

#include "adl/model.hpp"
#include "adl/sketch.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace adl {

// k = ⌈log₂(dm)⌉, at least 1.
unsigned squeezer_levels(std::size_t d, std::size_t m);

// Levels w̃^0..w̃^k (w̃^i averages 2^i sketches) and flags z̃_1..z̃_k. Level i
// is present when it is needed by a fired difference term; level 0 always is.
struct SqueezerRealization {
    unsigned k = 1;
    std::vector<std::uint8_t> fired;                  // index 1..k; fired[0] unused
    std::vector<std::optional<AveragedSketch>> levels;  // index 0..k

    bool needs_level(unsigned i) const;
    // σ(g_0) + Σ_i z̃_i (σ(g_i) − σ(g_{i−1})), ascending i, where
    // g_i = ⟨w̃^i, x⟩ and z̃_i = 2^i when fired.
    double eval(std::span<const double> x, double w0_dot_x, const Activation& sigma,
                const SketchConfig& cfg) const;
    double eval(std::span<const double> x, std::span<const double> w0, const Activation& sigma,
                const SketchConfig& cfg) const;

    friend bool operator==(const SqueezerRealization&, const SqueezerRealization&) = default;
};

// Draws the flags, then every needed level in ascending order.
SqueezerRealization squeezer_sample(const Sketcher& sketcher, unsigned k, Rng& rng);
SqueezerRealization squeezer_sample(std::span<const double> w, std::span<const double> w0, unsigned k,
                                    const SketchConfig& cfg, Rng& rng);

// Layout: open, level 0, then for i = 1..k: flag bit, and if set, level i−1
// (unless already written) followed by level i; close.
void write_squeezer(MessageWriter& out, const SqueezerRealization& s, const SketchConfig& cfg);
SqueezerRealization read_squeezer(MessageReader& in, unsigned k, const SketchConfig& cfg);
FramedMessage squeezer_encode(const SqueezerRealization& s, const SketchConfig& cfg);
SqueezerRealization squeezer_decode(const FramedMessage& msg, unsigned k, const SketchConfig& cfg);

// Physical length of the encoding, computed without building it.
std::size_t sketch_encoded_bits(const SketchSample& s, const SketchConfig& cfg);
std::size_t averaged_encoded_bits(const AveragedSketch& s, const SketchConfig& cfg);
std::size_t squeezer_encoded_bits(const SqueezerRealization& s, const SketchConfig& cfg);

// Brackets and flags that the squeezer adds on top of its sketches, at most:
// outer frame, level-0 frame, and per level a flag plus two level frames.
double squeezer_framing_bits(unsigned k);
// (5/2)·k·n_B + framing, with n_B the expected bits of one framed sketch.
double squeezer_length_bound(unsigned k, double n_B);

// Exact expected length of the encoding for the given sketcher.
double squeezer_expected_bits(const Sketcher& sketcher, unsigned k);

}  // namespace adl
