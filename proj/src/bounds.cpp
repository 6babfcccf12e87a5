#include "adl/bounds.hpp"

#include "adl/error.hpp"
#include "adl/network.hpp"
#include "adl/squeezer.hpp"

#include <algorithm>
#include <cmath>

namespace adl {

namespace {

// Signed-gamma length bound for integer offsets of magnitude at most ⌈x⌉ + 1, smoothed
// by dropping the floor so the bound grows continuously.
double offset_symbols(double x) { return 2.0 + 2.0 * std::log2(std::max(x, 0.0) + 3.0); }

double coefficient_bits_bound(double v_norm, double T) {
    return 2.0 * (2.0 + 2.0 * std::log2(v_norm * std::sqrt(T) + 2.0));
}

}  // namespace

AdlBound adl_bound(const HypoParams& p, std::size_t m, double sigma0, unsigned mantissa_bits) {
    if (m < 1) throw DomainError("adl_bound: m must be >= 1");
    const double L = p.L(), B = p.B(), R = p.R(), r = p.r();
    const std::size_t d = p.d(), T = p.T();
    const double dm = static_cast<double>(d * m);
    AdlBound out;
    out.k = squeezer_levels(d, m);
    out.q_B = 2 * static_cast<std::size_t>(std::ceil(B * B));
    out.n_avg = neuron_average_count(B, d, m);

    double per_draw = static_cast<double>(ceil_log2(d)) + 1.0 + 2.0 * std::log2(std::sqrt(static_cast<double>(d)) + 2.0) + 1.0;
    // A row at the full budget R sits ½log₂T above the per-row reference R/√T;
    // its α sits log₂T below the reference order.
    const double lgT = std::log2(static_cast<double>(T));
    const double scale_offset = offset_symbols(0.5 * lgT);
    const double alpha_offset = offset_symbols(lgT);
    out.sketch_bits = 2.0 * (2.0 + scale_offset + mantissa_bits + static_cast<double>(out.q_B) * per_draw);
    out.squeezer_bits = squeezer_length_bound(out.k, out.sketch_bits);

    if (R > 0.0) {
        double w = ceil_plus(std::log2(2.0 * std::sqrt(dm) / (L * R)));
        out.rmf_bits = 2.0 * (2.0 + static_cast<double>(m) * (w + 4.0)) + 2.0 * alpha_offset;
    } else {
        out.rmf_bits = 6.0;
    }
    out.neuron_bits = 6.0 + std::ldexp(out.rmf_bits, -static_cast<int>(out.k)) + out.squeezer_bits;

    const double W0 = p.W0().norm();
    const double v0 = p.v0().norm();
    out.n_a = unit_family_count(L, B, R, W0, r);
    out.n_b = unit_family_count(L, B, R, W0, v0);
    auto part = [&](double v_norm) {
        return 2.0 * ceil_log2(T) + coefficient_bits_bound(v_norm, static_cast<double>(T)) + 4.0 +
               static_cast<double>(out.n_avg) * out.neuron_bits;
    };
    out.part_bits_a = part(r);
    out.part_bits_b = part(v0);

    if (sigma0 == 0.0) {
        out.gv_bits = 6.0;
    } else {
        double Cg = std::abs(sigma0) * std::sqrt(static_cast<double>(T)) * (r + v0);
        out.gv_bits = 2.0 * (ceil_plus(std::log2(4.0 * Cg)) + 6.0);
    }

    out.bits = 4.0 + out.gv_bits + 8.0 + static_cast<double>(out.n_a) * (4.0 + out.part_bits_a) +
               static_cast<double>(out.n_b) * (4.0 + out.part_bits_b);

    double lg = std::log2(dm);
    out.big_o = L * L * B * B * R * R * r * r *
                (lg * lg * std::log2(static_cast<double>(d)) + std::log2(r) + std::log2(static_cast<double>(T)));
    return out;
}

double gen_bound(double n, double m, double L_loss, double B_loss, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("gen_bound: δ must lie in (0, 1)");
    if (!(m >= 1.0)) throw DomainError("gen_bound: m must be >= 1");
    if (!(n >= 0.0)) throw DomainError("gen_bound: n must be >= 0");
    return (L_loss + B_loss) * std::sqrt(n) / std::sqrt(m) * std::log2(m) +
           B_loss * std::sqrt(2.0 * std::log(2.0 / delta) / m);
}

BoundReport bound_report(const HypoParams& p, std::size_t m, double delta, double L_loss, double B_loss,
                         double sigma0) {
    BoundReport rep;
    rep.L = p.L();
    rep.B = p.B();
    rep.R = p.R();
    rep.r = p.r();
    rep.d = p.d();
    rep.m = m;
    rep.T = p.T();
    rep.delta = delta;
    rep.L_loss = L_loss;
    rep.B_loss = B_loss;
    rep.sigma0 = sigma0;
    rep.adl = adl_bound(p, m, sigma0);
    rep.gen_gap = gen_bound(rep.adl.bits, static_cast<double>(m), L_loss, B_loss, delta);
    return rep;
}

}  // namespace adl
