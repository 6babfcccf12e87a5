#include "adl/concentration.hpp"

#include "adl/error.hpp"
#include "adl/harness.hpp"
#include "adl/parallel.hpp"
#include "adl/rng.hpp"

#include <array>
#include <cmath>
#include <random>

namespace adl {

namespace {

struct EventSpec {
    const char* tag;
    const char* event;
    double epsilon;
    double bound;
};

constexpr std::size_t kEvents = 6;

}  // namespace

ConcentrationReport concentration_suite(std::size_t d, std::size_t h, std::size_t trials, std::uint64_t seed) {
    if (d < 1 || h < 1) throw DomainError("concentration_suite: d and h must be >= 1");
    if (trials < 10000) throw DomainError("concentration_suite: at least 10^4 trials required");
    const double dd = static_cast<double>(d), hh = static_cast<double>(h);
    const std::array<EventSpec, kEvents> specs = {{
        {"random_vector", "|v|^2 >= (1+eps)d", 1.0, std::exp(-dd / 6.0)},
        {"random_matrix", "|Wx|^2 >= 1+eps", 1.0, std::exp(-hh / 6.0)},
        {"random_matrix", "|Wx|^2 <= 1-eps", 15.0 / 16.0, std::exp(-(225.0 / 256.0) * hh / 6.0)},
        {"dist_two_matrices", "|Wx-Ny|^2 <= 2(1-eps)", 31.0 / 32.0, std::exp(-(961.0 / 1024.0) * hh / 6.0)},
        {"dist_two_vecs", "<u,w> >= eps*d", 1.0, std::exp(-dd / 2.0)},
        {"dist_two_vecs", "<u,w> >= eps*d", 0.5, std::exp(-dd / 8.0)},
    }};

    // Fixed unit test vectors.
    Rng fixed = make_stream(seed, ~std::uint64_t{0});
    const double xs = 1.0 / std::sqrt(dd);
    std::vector<double> x(d), y(d);
    for (auto& z : x) z = (fixed() >> 63) ? xs : -xs;
    for (auto& z : y) z = (fixed() >> 63) ? xs : -xs;

    const std::size_t n_chunks = (trials + kTrialChunk - 1) / kTrialChunk;
    std::vector<std::array<std::size_t, kEvents>> hits(n_chunks);
    const double as = 1.0 / std::sqrt(hh);
    parallel_chunks(n_chunks, [&](std::size_t c) {
        Rng rng = make_stream(seed, c);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::array<std::size_t, kEvents> local{};
        std::vector<double> wx(h), ny(h);
        const std::size_t begin = c * kTrialChunk;
        const std::size_t end = std::min(trials, begin + kTrialChunk);
        for (std::size_t t = begin; t < end; ++t) {
            double vv = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                double g = normal(rng);
                vv += g * g;
            }
            // Full matrices, row by row.
            for (std::size_t r = 0; r < h; ++r) {
                double a = 0.0, b = 0.0;
                for (std::size_t i = 0; i < d; ++i) a += normal(rng) * as * x[i];
                for (std::size_t i = 0; i < d; ++i) b += normal(rng) * as * y[i];
                wx[r] = a;
                ny[r] = b;
            }
            double wx2 = 0.0, diff2 = 0.0;
            for (std::size_t r = 0; r < h; ++r) {
                wx2 += wx[r] * wx[r];
                double t2 = wx[r] - ny[r];
                diff2 += t2 * t2;
            }
            long long inner = 0;
            for (std::size_t i = 0; i < d; ++i) {
                std::uint64_t u = rng() >> 63;
                std::uint64_t w = rng() >> 63;
                inner += u == w ? 1 : -1;
            }
            const double ip = static_cast<double>(inner);

            if (vv >= (1.0 + specs[0].epsilon) * dd) ++local[0];
            if (wx2 >= 1.0 + specs[1].epsilon) ++local[1];
            if (wx2 <= 1.0 - specs[2].epsilon) ++local[2];
            if (diff2 <= 2.0 * (1.0 - specs[3].epsilon)) ++local[3];
            if (ip >= specs[4].epsilon * dd) ++local[4];
            if (ip >= specs[5].epsilon * dd) ++local[5];
        }
        hits[c] = local;
    });

    ConcentrationReport rep;
    rep.d = d;
    rep.h = h;
    rep.trials = trials;
    rep.seed = seed;
    rep.pass = true;
    const double n = static_cast<double>(trials);
    for (std::size_t e = 0; e < kEvents; ++e) {
        TailCheck tc;
        tc.tag = specs[e].tag;
        tc.event = specs[e].event;
        tc.epsilon = specs[e].epsilon;
        tc.trials = trials;
        for (const auto& hc : hits) tc.hits += hc[e];
        tc.frequency = static_cast<double>(tc.hits) / n;
        tc.bound = std::min(1.0, specs[e].bound);
        tc.threshold = tc.bound + 3.0 * std::sqrt(tc.bound * (1.0 - tc.bound) / n);
        tc.pass = specs[e].bound >= 1.0 || tc.frequency <= tc.threshold;
        rep.pass = rep.pass && tc.pass;
        rep.checks.push_back(std::move(tc));
    }
    return rep;
}

}  // namespace adl
