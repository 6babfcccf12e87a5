#include "adl/sketch.hpp"

#include "adl/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adl {

namespace {

constexpr double kMaxGridRatio = 0x1.0p62;

}  // namespace

SketchConfig SketchConfig::make(std::size_t d, double B, unsigned mantissa_bits, double norm_ref) {
    SketchConfig cfg;
    cfg.d = d;
    cfg.B = B;
    cfg.q_B = 2 * static_cast<std::size_t>(std::ceil(B * B));
    cfg.mantissa_bits = mantissa_bits;
    cfg.norm_ref = norm_ref;
    cfg.check();
    return cfg;
}

void SketchConfig::check() const {
    if (d < 1 || d > (std::size_t{1} << 31)) throw DomainError("SketchConfig: d out of range");
    if (!(B > 0.0) || !std::isfinite(B)) throw DomainError("SketchConfig: B must be > 0");
    if (q_B < 1) throw DomainError("SketchConfig: q_B must be >= 1");
    if (mantissa_bits < 1 || mantissa_bits > 52)
        throw DomainError("SketchConfig: mantissa_bits must be in [1, 52]");
    if (!(norm_ref > 0.0) || !std::isfinite(norm_ref))
        throw DomainError("SketchConfig: norm_ref must be finite and > 0");
}


ScaleCode quantize_scale_up(double norm, unsigned mantissa_bits) {
    if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("quantize_scale_up: norm must be finite and > 0");
    int e2 = 0;
    double f = std::frexp(norm, &e2);  // norm = f·2^e2, f ∈ [0.5, 1)
    double t = 2.0 * f;                 // ∈ [1, 2)
    std::uint64_t full = std::uint64_t{1} << mantissa_bits;
    auto mant = static_cast<std::uint64_t>(std::ceil(std::ldexp(t - 1.0, static_cast<int>(mantissa_bits))));
    ScaleCode code{e2 - 1, mant};
    if (mant == full) {
        code.exponent += 1;
        code.mantissa = 0;
    }
    return code;
}

double scale_value(const ScaleCode& code, unsigned mantissa_bits) {
    double m = 1.0 + std::ldexp(static_cast<double>(code.mantissa), -static_cast<int>(mantissa_bits));
    return std::ldexp(m, static_cast<int>(code.exponent));
}

ScaleCode SketchConfig::quantize(double norm) const {
    ScaleCode code = quantize_scale_up(norm / norm_ref, mantissa_bits);
    // Rounding in the division can land one step low.
    while (scale(code) < norm) {
        if (++code.mantissa == (std::uint64_t{1} << mantissa_bits)) {
            code.mantissa = 0;
            ++code.exponent;
        }
    }
    return code;
}

double SketchConfig::scale(const ScaleCode& code) const { return norm_ref * scale_value(code, mantissa_bits); }

double SketchSample::eval(std::span<const double> x, const SketchConfig& cfg) const {
    if (draws.empty()) return 0.0;
    if (x.size() != cfg.d) throw DimensionError("sketch eval: x has wrong dimension");
    double step = cfg.scale(scale);
    double s = 0.0;
    for (const auto& dr : draws) {
        double g = static_cast<double>(dr.grid) * step;
        s += (dr.negative ? -g : g) * x[dr.index];
    }
    return s / static_cast<double>(draws.size());
}

Sketcher::Sketcher(std::span<const double> u, const SketchConfig& cfg) : cfg_(cfg) {
    cfg_.check();
    if (u.size() != cfg_.d)
        throw DimensionError("Sketcher: u has length " + std::to_string(u.size()) + ", expected d = " +
                             std::to_string(cfg_.d));
    double sq = 0.0;
    for (double ui : u) {
        if (!std::isfinite(ui)) throw DomainError("Sketcher: u must be finite");
        sq += ui * ui;
    }
    if (sq == 0.0) return;
    norm_ = std::sqrt(sq);
    scale_ = cfg_.quantize(norm_);
    step_ = cfg_.scale(scale_);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] == 0.0) continue;
        double ratio = sq / (std::abs(u[i]) * step_);
        if (!(ratio < kMaxGridRatio))
            throw DomainError("Sketcher: coordinate " + std::to_string(i) +
                              " is too small relative to the norm for 62-bit grid indices");
        acc += u[i] * u[i];
        support_.push_back(static_cast<std::uint32_t>(i));
        cumulative_.push_back(acc);
        ratio_.push_back(ratio);
        negative_.push_back(u[i] < 0.0);
    }
}

SketchDraw Sketcher::sample_draw(Rng& rng) const {
    double target = uniform01(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), support_.size() - 1);
    double ratio = ratio_[k];
    double base = std::floor(ratio);
    auto grid = static_cast<std::uint64_t>(base);
    if (uniform01(rng) < ratio - base) ++grid;
    return {support_[k], negative_[k] != 0, grid};
}

SketchSample Sketcher::sample(Rng& rng) const {
    SketchSample s;
    if (zero()) return s;
    s.scale = scale_;
    s.draws.reserve(cfg_.q_B);
    for (std::size_t t = 0; t < cfg_.q_B; ++t) s.draws.push_back(sample_draw(rng));
    return s;
}

std::vector<Sketcher::Outcome> Sketcher::draw_outcomes() const {
    std::vector<Outcome> out;
    double total = zero() ? 0.0 : cumulative_.back();
    for (std::size_t k = 0; k < support_.size(); ++k) {
        double p = (cumulative_[k] - (k == 0 ? 0.0 : cumulative_[k - 1])) / total;
        double base = std::floor(ratio_[k]);
        double frac = ratio_[k] - base;
        auto g = static_cast<std::uint64_t>(base);
        bool neg = negative_[k] != 0;
        if (frac < 1.0 && p * (1.0 - frac) > 0.0) out.push_back({p * (1.0 - frac), {support_[k], neg, g}});
        if (frac > 0.0) out.push_back({p * frac, {support_[k], neg, g + 1}});
    }
    return out;
}

double Sketcher::expected_bits() const {
    if (zero()) return 4.0;
    double per_draw = 0.0;
    for (const auto& o : draw_outcomes())
        per_draw += o.probability * static_cast<double>(cfg_.index_bits() + 1 + gamma_length(o.draw.grid));
    double header = static_cast<double>(signed_gamma_length(scale_.exponent) +
                                        cfg_.mantissa_bits);
    return 2.0 * (2.0 + header + static_cast<double>(cfg_.q_B) * per_draw);
}

SketchSample sketch_once(std::span<const double> u, const SketchConfig& cfg, Rng& rng) {
    return Sketcher(u, cfg).sample(rng);
}

double AveragedSketch::eval_offset(std::span<const double> x, const SketchConfig& cfg) const {
    double s = 0.0;
    for (const auto& smp : samples) s += smp.eval(x, cfg);
    return s / static_cast<double>(samples.size());
}

double AveragedSketch::eval(std::span<const double> x, std::span<const double> w0,
                            const SketchConfig& cfg) const {
    return eval_offset(x, cfg) + dot(w0, x);
}

AveragedSketch sketch_avg(const Sketcher& sketcher, std::size_t q, Rng& rng) {
    if (q < 1) throw DomainError("sketch_avg: q must be >= 1");
    AveragedSketch out;
    out.samples.reserve(q);
    for (std::size_t i = 0; i < q; ++i) out.samples.push_back(sketcher.sample(rng));
    return out;
}

AveragedSketch sketch_avg(std::span<const double> w, std::span<const double> w0, std::size_t q,
                          const SketchConfig& cfg, Rng& rng) {
    if (w.size() != w0.size()) throw DimensionError("sketch_avg: w and w0 differ in length");
    std::vector<double> u(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) u[i] = w[i] - w0[i];
    return sketch_avg(Sketcher(u, cfg), q, rng);
}

void write_sketch(MessageWriter& out, const SketchSample& s, const SketchConfig& cfg) {
    out.open();
    if (!s.is_zero()) {
        if (s.draws.size() != cfg.q_B) throw DomainError("write_sketch: draw count differs from q_B");
        out.signed_gamma(s.scale.exponent);
        out.fixed(s.scale.mantissa, cfg.mantissa_bits);
        unsigned ib = cfg.index_bits();
        for (const auto& dr : s.draws) {
            out.fixed(dr.index, ib);
            out.bit(dr.negative);
            out.gamma(dr.grid);
        }
    }
    out.close();
}

SketchSample read_sketch(MessageReader& in, const SketchConfig& cfg) {
    SketchSample s;
    in.open();
    if (in.next_is_close()) {
        in.close();
        return s;
    }
    s.scale.exponent = in.signed_gamma();
    s.scale.mantissa = in.fixed(cfg.mantissa_bits);
    unsigned ib = cfg.index_bits();
    s.draws.reserve(cfg.q_B);
    for (std::size_t t = 0; t < cfg.q_B; ++t) {
        std::size_t at = in.bit_offset();
        SketchDraw dr;
        dr.index = static_cast<std::uint32_t>(in.fixed(ib));
        if (dr.index >= cfg.d) throw DecodeError("sketch index out of range", at);
        dr.negative = in.bit();
        dr.grid = in.gamma();
        s.draws.push_back(dr);
    }
    in.close();
    return s;
}

FramedMessage sketch_encode(const SketchSample& s, const SketchConfig& cfg) {
    MessageWriter w;
    write_sketch(w, s, cfg);
    return w.finish();
}

SketchSample sketch_decode(const FramedMessage& msg, const SketchConfig& cfg) {
    MessageReader r(msg);
    SketchSample s = read_sketch(r, cfg);
    r.expect_end();
    return s;
}

void write_averaged(MessageWriter& out, const AveragedSketch& s, const SketchConfig& cfg) {
    out.open();
    for (const auto& smp : s.samples) write_sketch(out, smp, cfg);
    out.close();
}

AveragedSketch read_averaged(MessageReader& in, const SketchConfig& cfg) {
    AveragedSketch s;
    in.open();
    while (!in.next_is_close()) {
        if (!in.next_is_open()) throw DecodeError("expected sketch frame", in.bit_offset());
        s.samples.push_back(read_sketch(in, cfg));
    }
    in.close();
    if (s.samples.empty()) throw DecodeError("averaged sketch without samples", in.bit_offset());
    return s;
}

FramedMessage averaged_encode(const AveragedSketch& s, const SketchConfig& cfg) {
    MessageWriter w;
    write_averaged(w, s, cfg);
    return w.finish();
}

AveragedSketch averaged_decode(const FramedMessage& msg, const SketchConfig& cfg) {
    MessageReader r(msg);
    AveragedSketch s = read_averaged(r, cfg);
    r.expect_end();
    return s;
}

}  // namespace adl
