#include "adl/squeezer.hpp"

#include "adl/error.hpp"

#include <cmath>

namespace adl {

unsigned squeezer_levels(std::size_t d, std::size_t m) {
    if (d < 1 || m < 1) throw DomainError("squeezer_levels: d and m must be >= 1");
    unsigned k = ceil_log2(static_cast<std::uint64_t>(d) * m);
    return k < 1 ? 1 : k;
}

bool SqueezerRealization::needs_level(unsigned i) const {
    if (i == 0) return true;
    return fired[i] || (i < k && fired[i + 1]);
}

double SqueezerRealization::eval(std::span<const double> x, double w0_dot_x, const Activation& sigma,
                                 const SketchConfig& cfg) const {
    double g_prev = levels[0]->eval_offset(x, cfg) + w0_dot_x;
    double s_prev = sigma(g_prev);
    double out = s_prev;
    for (unsigned i = 1; i <= k; ++i) {
        if (!fired[i]) continue;
        double s_lo = s_prev;
        if (i > 1 && !fired[i - 1]) s_lo = sigma(levels[i - 1]->eval_offset(x, cfg) + w0_dot_x);
        double s_hi = sigma(levels[i]->eval_offset(x, cfg) + w0_dot_x);
        out += std::ldexp(s_hi - s_lo, static_cast<int>(i));
        s_prev = s_hi;
    }
    return out;
}

double SqueezerRealization::eval(std::span<const double> x, std::span<const double> w0,
                                 const Activation& sigma, const SketchConfig& cfg) const {
    return eval(x, dot(w0, x), sigma, cfg);
}

SqueezerRealization squeezer_sample(const Sketcher& sketcher, unsigned k, Rng& rng) {
    if (k < 1) throw DomainError("squeezer: k must be >= 1");
    SqueezerRealization s;
    s.k = k;
    s.fired.assign(k + 1, 0);
    s.levels.resize(k + 1);
    for (unsigned i = 1; i <= k; ++i) s.fired[i] = bernoulli(rng, std::ldexp(1.0, -static_cast<int>(i)));
    for (unsigned i = 0; i <= k; ++i)
        if (s.needs_level(i)) s.levels[i] = sketch_avg(sketcher, std::size_t{1} << i, rng);
    return s;
}

SqueezerRealization squeezer_sample(std::span<const double> w, std::span<const double> w0, unsigned k,
                                    const SketchConfig& cfg, Rng& rng) {
    if (w.size() != w0.size()) throw DimensionError("squeezer: w and w0 differ in length");
    std::vector<double> u(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) u[i] = w[i] - w0[i];
    return squeezer_sample(Sketcher(u, cfg), k, rng);
}

void write_squeezer(MessageWriter& out, const SqueezerRealization& s, const SketchConfig& cfg) {
    out.open();
    write_averaged(out, *s.levels[0], cfg);
    for (unsigned i = 1; i <= s.k; ++i) {
        out.bit(s.fired[i]);
        if (!s.fired[i]) continue;
        if (i > 1 && !s.fired[i - 1]) write_averaged(out, *s.levels[i - 1], cfg);
        write_averaged(out, *s.levels[i], cfg);
    }
    out.close();
}

namespace {

AveragedSketch read_level(MessageReader& in, unsigned i, const SketchConfig& cfg) {
    std::size_t at = in.bit_offset();
    AveragedSketch a = read_averaged(in, cfg);
    if (a.q() != (std::size_t{1} << i)) throw DecodeError("level has wrong sketch count", at);
    return a;
}

}  // namespace

SqueezerRealization read_squeezer(MessageReader& in, unsigned k, const SketchConfig& cfg) {
    SqueezerRealization s;
    s.k = k;
    s.fired.assign(k + 1, 0);
    s.levels.resize(k + 1);
    in.open();
    s.levels[0] = read_level(in, 0, cfg);
    for (unsigned i = 1; i <= k; ++i) {
        s.fired[i] = in.bit();
        if (!s.fired[i]) continue;
        if (i > 1 && !s.fired[i - 1]) s.levels[i - 1] = read_level(in, i - 1, cfg);
        s.levels[i] = read_level(in, i, cfg);
    }
    in.close();
    return s;
}

FramedMessage squeezer_encode(const SqueezerRealization& s, const SketchConfig& cfg) {
    MessageWriter w;
    write_squeezer(w, s, cfg);
    return w.finish();
}

SqueezerRealization squeezer_decode(const FramedMessage& msg, unsigned k, const SketchConfig& cfg) {
    MessageReader r(msg);
    auto s = read_squeezer(r, k, cfg);
    r.expect_end();
    return s;
}

std::size_t sketch_encoded_bits(const SketchSample& s, const SketchConfig& cfg) {
    if (s.is_zero()) return 4;
    std::size_t n = 2 + signed_gamma_length(s.scale.exponent) + cfg.mantissa_bits;
    for (const auto& dr : s.draws) n += cfg.index_bits() + 1 + gamma_length(dr.grid);
    return 2 * n;
}

std::size_t averaged_encoded_bits(const AveragedSketch& s, const SketchConfig& cfg) {
    std::size_t n = 4;
    for (const auto& smp : s.samples) n += sketch_encoded_bits(smp, cfg);
    return n;
}

std::size_t squeezer_encoded_bits(const SqueezerRealization& s, const SketchConfig& cfg) {
    std::size_t n = 4 + averaged_encoded_bits(*s.levels[0], cfg) + 2 * s.k;
    for (unsigned i = 1; i <= s.k; ++i) {
        if (!s.fired[i]) continue;
        if (i > 1 && !s.fired[i - 1]) n += averaged_encoded_bits(*s.levels[i - 1], cfg);
        n += averaged_encoded_bits(*s.levels[i], cfg);
    }
    return n;
}

double squeezer_framing_bits(unsigned k) { return 4.0 + 4.0 + k * (2.0 + 2.0 * 4.0); }

double squeezer_length_bound(unsigned k, double n_B) { return 2.5 * k * n_B + squeezer_framing_bits(k); }

double squeezer_expected_bits(const Sketcher& sketcher, unsigned k) {
    double n_B = sketcher.expected_bits();
    auto level_bits = [&](unsigned i) { return 4.0 + std::ldexp(n_B, static_cast<int>(i)); };
    double total = 4.0 + 2.0 * k + level_bits(0);
    for (unsigned i = 1; i <= k; ++i) {
        double p_i = std::ldexp(1.0, -static_cast<int>(i));
        double p_next = i < k ? std::ldexp(1.0, -static_cast<int>(i + 1)) : 0.0;
        double p_needed = 1.0 - (1.0 - p_i) * (1.0 - p_next);
        total += p_needed * level_bits(i);
    }
    return total;
}

}  // namespace adl
