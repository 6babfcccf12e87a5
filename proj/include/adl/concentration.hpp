#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace adl {

// One empirical tail probability compared to its analytic upper bound.
struct TailCheck {
    std::string tag;
    std::string event;
    double epsilon = 0.0;
    std::size_t trials = 0;
    std::size_t hits = 0;
    double frequency = 0.0;
    double bound = 0.0;
    double threshold = 0.0;  // bound + 3√(bound(1 − bound)/N); vacuous bounds pass
    bool pass = false;
};

struct ConcentrationReport {
    std::size_t d = 0, h = 0, trials = 0;
    std::uint64_t seed = 0;
    std::vector<TailCheck> checks;
    bool pass = false;
};

// Per trial: v ~ N(0, I_d); W, N with N(0, 1/h) entries (h × d); fixed unit
// vectors x, y ∈ {±1/√d}^d; u, w uniform in {±1}^d. Events:
//   random_vector       ‖v‖² ≥ (1+ε)d              bound e^{−ε²d/6}, ε = 1
//   random_matrix       ‖Wx‖² ≥ 1+ε                bound e^{−ε²h/6}, ε = 1
//   random_matrix       ‖Wx‖² ≤ 1−ε                bound e^{−ε²h/6}, ε = 15/16
//   dist_two_matrices   ‖Wx − Ny‖² ≤ 2(1−ε)        bound e^{−ε²h/6}, ε = 31/32
//   dist_two_vecs       ⟨u, w⟩ ≥ εd                bound e^{−ε²d/2}, ε ∈ {1, 1/2}
// N must be at least 10^4.
ConcentrationReport concentration_suite(std::size_t d, std::size_t h, std::size_t trials, std::uint64_t seed);

}  // namespace adl
