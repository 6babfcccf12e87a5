#pragma once

#include "adl/bitcodec.hpp"
#include "adl/model.hpp"
#include "adl/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace adl {

// Scale s̄ = norm_ref · 2^exponent · (1 + mantissa / 2^mantissa_bits).
struct ScaleCode {
    std::int64_t exponent = 0;
    std::uint64_t mantissa = 0;
    friend bool operator==(const ScaleCode&, const ScaleCode&) = default;
};

// Protocol parameters shared by encoder and decoder; never transmitted.
struct SketchConfig {
    std::size_t d = 1;
    double B = 1.0;
    // Draws averaged inside one sketch; 2⌈B²⌉ by default.
    std::size_t q_B = 2;
    // Relative precision of the transmitted scale.
    unsigned mantissa_bits = 4;
    // Scales lie on the lattice norm_ref · 2^E · (1 + j / 2^mantissa_bits).
    double norm_ref = 1.0;

    static SketchConfig make(std::size_t d, double B, unsigned mantissa_bits = 4,
                             double norm_ref = 1.0);
    void check() const;
    unsigned index_bits() const { return ceil_log2(d); }
    // Smallest lattice scale ≥ norm.
    ScaleCode quantize(double norm) const;
    double scale(const ScaleCode& code) const;
};

// Unit-anchored lattice: smallest 2^E(1 + j/2^mb) ≥ norm, within [norm, norm·(1 + 2^-mb)].
ScaleCode quantize_scale_up(double norm, unsigned mantissa_bits);
double scale_value(const ScaleCode& code, unsigned mantissa_bits);

struct SketchDraw {
    std::uint32_t index = 0;
    bool negative = false;
    std::uint64_t grid = 0;
    friend bool operator==(const SketchDraw&, const SketchDraw&) = default;
};

// One Random Sketch of a vector u. No draws means u = 0 (the empty marker).
struct SketchSample {
    ScaleCode scale;
    std::vector<SketchDraw> draws;

    bool is_zero() const { return draws.empty(); }
    // ⟨û, x⟩ = (1/q_B) Σ_t ±grid_t · s̄ · x[index_t], accumulated in draw order.
    double eval(std::span<const double> x, const SketchConfig& cfg) const;

    friend bool operator==(const SketchSample&, const SketchSample&) = default;
};

// Precomputed sampling plan for sketches of a fixed vector u: index i is drawn
// with probability u_i²/‖u‖², and ‖u‖²/|u_i| is randomly rounded onto the grid
// {k·s̄ : k ≥ 0}, up with probability equal to the fractional part.
class Sketcher {
public:
    struct Outcome {
        double probability;
        SketchDraw draw;
    };

    Sketcher(std::span<const double> u, const SketchConfig& cfg);

    SketchSample sample(Rng& rng) const;
    SketchDraw sample_draw(Rng& rng) const;

    bool zero() const { return support_.empty(); }
    double norm() const { return norm_; }
    double step() const { return step_; }
    const ScaleCode& scale() const { return scale_; }
    const SketchConfig& config() const { return cfg_; }

    // Every single-draw outcome with positive probability.
    std::vector<Outcome> draw_outcomes() const;
    // Exact expected physical length of one encoded sketch.
    double expected_bits() const;

private:
    SketchConfig cfg_;
    double norm_ = 0.0;
    double step_ = 0.0;
    ScaleCode scale_;
    std::vector<std::uint32_t> support_;
    std::vector<double> cumulative_;
    std::vector<double> ratio_;
    std::vector<std::uint8_t> negative_;
};

SketchSample sketch_once(std::span<const double> u, const SketchConfig& cfg, Rng& rng);

// Average of q independent sketches of w − w0, offset by the shared w0.
struct AveragedSketch {
    std::vector<SketchSample> samples;

    std::size_t q() const { return samples.size(); }
    // (1/q) Σ sketch values, without the ⟨w0, x⟩ offset.
    double eval_offset(std::span<const double> x, const SketchConfig& cfg) const;
    double eval(std::span<const double> x, std::span<const double> w0,
                const SketchConfig& cfg) const;

    friend bool operator==(const AveragedSketch&, const AveragedSketch&) = default;
};

AveragedSketch sketch_avg(const Sketcher& sketcher, std::size_t q, Rng& rng);
AveragedSketch sketch_avg(std::span<const double> w, std::span<const double> w0, std::size_t q,
                          const SketchConfig& cfg, Rng& rng);

// Layout: open [signed-gamma exponent][mantissa][q_B × (index, sign,
// gamma grid)] close; the empty marker is open close.
void write_sketch(MessageWriter& out, const SketchSample& s, const SketchConfig& cfg);
SketchSample read_sketch(MessageReader& in, const SketchConfig& cfg);
FramedMessage sketch_encode(const SketchSample& s, const SketchConfig& cfg);
SketchSample sketch_decode(const FramedMessage& msg, const SketchConfig& cfg);

// Averaged sketches: open [q sketches] close. q is implied by the frame.
void write_averaged(MessageWriter& out, const AveragedSketch& s, const SketchConfig& cfg);
AveragedSketch read_averaged(MessageReader& in, const SketchConfig& cfg);
FramedMessage averaged_encode(const AveragedSketch& s, const SketchConfig& cfg);
AveragedSketch averaged_decode(const FramedMessage& msg, const SketchConfig& cfg);

}  // namespace adl
