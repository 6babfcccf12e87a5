#pragma once

#include "adl/model.hpp"

#include <cstddef>

namespace adl {

// Upper-bound accounting of the expected physical bits of one unit-estimator
// realization, evaluated at the extremal hypothesis of the class: every
// sketched row at the distance budget R and every output vector at its
// budget. Activation is assumed non-affine (the H1 part is always counted).
struct AdlBound {
    double bits = 0.0;
    // L²B²R²r²(log₂²(dm)·log₂d + log₂r + log₂T) with constant 1; shape only.
    double big_o = 0.0;

    unsigned k = 1;
    std::size_t q_B = 2;
    std::size_t n_avg = 1;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    double sketch_bits = 0.0;
    double squeezer_bits = 0.0;
    double rmf_bits = 0.0;
    double neuron_bits = 0.0;
    double part_bits_a = 0.0;
    double part_bits_b = 0.0;
    double gv_bits = 0.0;
};

AdlBound adl_bound(const HypoParams& p, std::size_t m, double sigma0 = 0.0, unsigned mantissa_bits = 4);

// (L_ℓ + B_ℓ)·√n/√m·log₂m + B_ℓ·√(2 ln(2/δ)/m), universal constant taken as 1.
double gen_bound(double n, double m, double L_loss, double B_loss, double delta);

struct BoundReport {
    double L = 0, B = 0, R = 0, r = 0;
    std::size_t d = 0, m = 0, T = 0;
    double delta = 0, L_loss = 0, B_loss = 0, sigma0 = 0;
    AdlBound adl;
    double gen_gap = 0.0;
};

BoundReport bound_report(const HypoParams& p, std::size_t m, double delta, double L_loss, double B_loss,
                         double sigma0 = 0.0);

}  // namespace adl
