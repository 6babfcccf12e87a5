#include "adl/error.hpp"
#include "adl/harness.hpp"
#include "adl/rng.hpp"
#include "adl/sketch.hpp"
#include "adl/squeezer.hpp"
#include "adl/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

using namespace adl;

namespace {

// Independent single-draw law: index i w.p. u_i²/‖u‖², grid value
// ⌊r_i⌋ or ⌊r_i⌋ + 1 with r_i = ‖u‖²/(|u_i|·s̄), rounded up w.p. frac(r_i).
struct DrawOracle {
    std::uint32_t index;
    bool negative;
    std::uint64_t grid;
    double probability;
};

std::vector<DrawOracle> draw_oracle(const std::vector<double>& u, double s_bar) {
    double n2 = 0.0;
    for (double x : u) n2 += x * x;
    std::vector<DrawOracle> out;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] == 0.0) continue;
        double p = u[i] * u[i] / n2;
        double r = n2 / (std::abs(u[i]) * s_bar);
        double f = std::floor(r);
        double up = r - f;
        auto g = static_cast<std::uint64_t>(f);
        if (1.0 - up > 0.0) out.push_back({static_cast<std::uint32_t>(i), u[i] < 0, g, p * (1.0 - up)});
        if (up > 0.0) out.push_back({static_cast<std::uint32_t>(i), u[i] < 0, g + 1, p * up});
    }
    return out;
}

// Smallest 2^e(1 + j/16) ≥ v.
double ceil_scale(double v) {
    int e = static_cast<int>(std::floor(std::log2(v)));
    for (int ee = e - 1; ee <= e + 1; ++ee)
        for (int j = 0; j < 16; ++j) {
            double s = std::ldexp(1.0 + j / 16.0, ee);
            if (s >= v) return s;
        }
    return std::ldexp(1.0, e + 2);
}

std::vector<double> random_unit(std::size_t d, Rng& rng) {
    std::vector<double> u(d);
    double n = 0.0;
    for (auto& x : u) {
        x = gaussian(rng);
        n += x * x;
    }
    for (auto& x : u) x /= std::sqrt(n);
    return u;
}

}  // namespace

TEST(Scale, CeilingQuantizationWithinOneStep) {
    Rng rng = make_stream(20, 0);
    for (int t = 0; t < 2000; ++t) {
        double v = std::exp(8.0 * gaussian(rng));
        ScaleCode c = quantize_scale_up(v, 4);
        double s = scale_value(c, 4);
        EXPECT_GE(s, v);
        EXPECT_LE(s, v * (1.0 + 1.0 / 16.0));
        EXPECT_EQ(s, ceil_scale(v));
        EXPECT_LT(c.mantissa, 16u);
    }
}

TEST(Sketch, ConfigDefaults) {
    SketchConfig c = SketchConfig::make(100, 1.5);
    EXPECT_EQ(c.q_B, 6u);  // 2⌈2.25⌉
    EXPECT_EQ(c.index_bits(), 7u);
    EXPECT_EQ(SketchConfig::make(2, 1.0).q_B, 2u);
}

TEST(Sketch, OrthogonalSupportGivesZero) {
    SketchConfig cfg = SketchConfig::make(2, 1.0);
    std::vector<double> u{0.0, 1.0}, x{1.0, 0.0};
    Rng rng = make_stream(21, 0);
    for (int t = 0; t < 200; ++t) EXPECT_EQ(sketch_once(u, cfg, rng).eval(x, cfg), 0.0);
}

TEST(Sketch, ZeroVectorIsEmptyMarker) {
    SketchConfig cfg = SketchConfig::make(3, 1.0);
    std::vector<double> u{0.0, 0.0, 0.0}, x{0.3, 0.1, 0.2};
    Rng rng = make_stream(22, 0);
    SketchSample s = sketch_once(u, cfg, rng);
    EXPECT_TRUE(s.is_zero());
    EXPECT_EQ(s.eval(x, cfg), 0.0);
    FramedMessage m = sketch_encode(s, cfg);
    EXPECT_EQ(m.symbols(), (std::vector<Symbol>{Symbol::Open, Symbol::Close}));
    EXPECT_EQ(sketch_decode(m, cfg), s);
    EXPECT_EQ(Sketcher(u, cfg).expected_bits(), 4.0);
}

TEST(Sketch, DrawLawMatchesOracle) {
    Rng rng = make_stream(23, 0);
    for (int t = 0; t < 20; ++t) {
        std::size_t d = 2 + rng() % 6;
        std::vector<double> u(d);
        for (auto& x : u) x = (rng() % 4 == 0) ? 0.0 : gaussian(rng) * 3.0;
        u[0] = 0.7;
        SketchConfig cfg = SketchConfig::make(d, 1.0);
        Sketcher sk(u, cfg);
        double n = 0.0;
        for (double x : u) n += x * x;
        n = std::sqrt(n);
        EXPECT_EQ(scale_value(sk.scale(), cfg.mantissa_bits), ceil_scale(n));
        auto oracle = draw_oracle(u, ceil_scale(n));
        auto lib = sk.draw_outcomes();
        ASSERT_EQ(lib.size(), oracle.size());
        for (std::size_t i = 0; i < lib.size(); ++i) {
            EXPECT_EQ(lib[i].draw.index, oracle[i].index);
            EXPECT_EQ(lib[i].draw.negative, oracle[i].negative);
            EXPECT_EQ(lib[i].draw.grid, oracle[i].grid);
            EXPECT_NEAR(lib[i].probability, oracle[i].probability, 1e-14);
        }
    }
}

TEST(Sketch, SampledFrequenciesMatchOracle) {
    std::vector<double> u{0.6, -0.8, 0.3};
    SketchConfig cfg = SketchConfig::make(3, 1.0);
    Sketcher sk(u, cfg);
    double n = std::sqrt(0.36 + 0.64 + 0.09);
    auto oracle = draw_oracle(u, ceil_scale(n));
    std::map<std::pair<std::uint32_t, std::uint64_t>, std::size_t> counts;
    Rng rng = make_stream(24, 0);
    const std::size_t N = 200000;
    for (std::size_t t = 0; t < N; ++t) {
        SketchDraw d = sk.sample_draw(rng);
        ++counts[{d.index, d.grid}];
    }
    for (const auto& o : oracle) {
        double f = static_cast<double>(counts[{o.index, o.grid}]) / N;
        double se = std::sqrt(o.probability * (1 - o.probability) / N);
        EXPECT_NEAR(f, o.probability, 5 * se + 1e-12);
    }
}

TEST(Sketch, FullEnumerationD2IsUnbiasedWithVarianceBound) {
    const std::vector<double> u{0.6, 0.8};
    SketchConfig cfg = SketchConfig::make(2, 1.0);
    const double s_bar = ceil_scale(1.0);
    auto oracle = draw_oracle(u, s_bar);
    Sketcher sk(u, cfg);
    Rng rng = make_stream(25, 0);
    for (int t = 0; t < 10; ++t) {
        std::vector<double> x = random_unit(2, rng);
        std::vector<double> probs;
        for (const auto& o : oracle) probs.push_back(o.probability);
        std::vector<std::vector<double>> factors(cfg.q_B, probs);
        ExactReport r = enumerate_exact(factors, [&](std::span<const std::size_t> c) {
            SketchSample s;
            s.scale = sk.scale();
            for (auto i : c) s.draws.push_back({oracle[i].index, oracle[i].negative, oracle[i].grid});
            return ExactOutcome{s.eval(x, cfg), static_cast<double>(sketch_encoded_bits(s, cfg))};
        });
        EXPECT_NEAR(r.mean, u[0] * x[0] + u[1] * x[1], 1e-12);
        EXPECT_LE(r.variance, 1.0);
        EXPECT_NEAR(r.expected_bits, sk.expected_bits(), 1e-9);
    }
}

TEST(Sketch, AveragedVarianceShrinksWithQ) {
    const std::vector<double> u{0.6, 0.8};
    SketchConfig cfg = SketchConfig::make(2, 1.0);
    auto oracle = draw_oracle(u, ceil_scale(1.0));
    const std::vector<double> x{std::sqrt(0.5), -std::sqrt(0.5)};
    // Single-draw moments from the oracle; an average of q sketches of q_B
    // draws has variance Var₁/(q·q_B).
    double m1 = 0.0, m2 = 0.0;
    for (const auto& o : oracle) {
        double val = (o.negative ? -1.0 : 1.0) * static_cast<double>(o.grid) * ceil_scale(1.0) * x[o.index];
        m1 += o.probability * val;
        m2 += o.probability * val * val;
    }
    double var_avg4 = (m2 - m1 * m1) / (4.0 * static_cast<double>(cfg.q_B));
    EXPECT_LE(var_avg4, 0.25);

    std::vector<double> w0{0.1, -0.2}, w{0.7, 0.6};
    Sampler s = [&](Rng& rng) {
        AveragedSketch a = sketch_avg(w, w0, 4, cfg, rng);
        return MCSample{a.eval(x, w0, cfg), 0.0};
    };
    MCReport rep = mc_contract(s, w[0] * x[0] + w[1] * x[1], var_avg4, std::nullopt, 200000, 26);
    EXPECT_TRUE(rep.pass) << rep.mean << " " << rep.variance << " " << var_avg4;
}

TEST(Sketch, EqualToBaseIsDeterministic) {
    SketchConfig cfg = SketchConfig::make(3, 1.0);
    std::vector<double> w{0.1, 0.2, 0.3}, x{0.5, 0.5, 0.5};
    Rng rng = make_stream(27, 0);
    for (std::size_t q : {1u, 2u, 8u}) {
        AveragedSketch a = sketch_avg(w, w, q, cfg, rng);
        EXPECT_EQ(a.q(), q);
        EXPECT_NEAR(a.eval(x, w, cfg), 0.3, 1e-15);
    }
}

TEST(Sketch, UnbiasedAtD100ByMonteCarlo) {
    Rng setup = make_stream(28, 0);
    std::vector<double> u = random_unit(100, setup), x = random_unit(100, setup);
    SketchConfig cfg = SketchConfig::make(100, 1.0);
    Sketcher sk(u, cfg);
    double truth = 0.0;
    for (std::size_t i = 0; i < 100; ++i) truth += u[i] * x[i];
    Sampler s = [&](Rng& rng) {
        SketchSample smp = sk.sample(rng);
        return MCSample{smp.eval(x, cfg), static_cast<double>(sketch_encoded_bits(smp, cfg))};
    };
    MCOptions opts;
    opts.len_overhead = 0.02;
    MCReport rep = mc_contract(s, truth, 1.0, sk.expected_bits(), 100000, 29, opts);
    EXPECT_TRUE(rep.pass) << rep.z << " " << rep.variance;
}

TEST(Sketch, RoundTripD100) {
    Rng rng = make_stream(30, 0);
    std::vector<double> u = random_unit(100, rng);
    for (auto& v : u) v *= 3.7;
    SketchConfig cfg = SketchConfig::make(100, 1.0);
    for (int t = 0; t < 20; ++t) {
        SketchSample s = sketch_once(u, cfg, rng);
        FramedMessage m = sketch_encode(s, cfg);
        EXPECT_EQ(m.physical_bits(), sketch_encoded_bits(s, cfg));
        SketchSample back = sketch_decode(FramedMessage::from_bits(m.to_bits()), cfg);
        EXPECT_EQ(back, s);
        for (int k = 0; k < 10; ++k) {
            std::vector<double> x = random_unit(100, rng);
            EXPECT_EQ(back.eval(x, cfg), s.eval(x, cfg));
        }
    }
}

TEST(Sketch, LengthIsSumOfComponentCodes) {
    Rng rng = make_stream(31, 0);
    SketchConfig cfg = SketchConfig::make(50, 2.0, 4, 0.5);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> u = random_unit(50, rng);
        double scale = std::exp(2.0 * gaussian(rng));
        for (auto& v : u) v *= scale;
        SketchSample s = sketch_once(u, cfg, rng);
        std::size_t symbols = 2 + signed_gamma_length(s.scale.exponent) + cfg.mantissa_bits;
        for (const auto& d : s.draws) symbols += cfg.index_bits() + 1 + gamma_length(d.grid);
        EXPECT_EQ(sketch_encoded_bits(s, cfg), 2 * symbols);
        EXPECT_EQ(s.draws.size(), cfg.q_B);
    }
}

TEST(Sketch, TruncatedMessageThrows) {
    Rng rng = make_stream(32, 0);
    std::vector<double> u = random_unit(10, rng);
    SketchConfig cfg = SketchConfig::make(10, 1.0);
    FramedMessage m = sketch_encode(sketch_once(u, cfg, rng), cfg);
    std::vector<Symbol> cut(m.symbols().begin(), m.symbols().end() - 2);
    EXPECT_THROW(sketch_decode(FramedMessage(cut), cfg), DecodeError);
}

TEST(Sketch, ExpectedBitsMatchesMonteCarlo) {
    Rng rng = make_stream(33, 0);
    std::vector<double> u = random_unit(64, rng);
    SketchConfig cfg = SketchConfig::make(64, 1.0);
    Sketcher sk(u, cfg);
    RunningMoments m;
    for (int t = 0; t < 50000; ++t) m.add(static_cast<double>(sketch_encoded_bits(sk.sample(rng), cfg)));
    EXPECT_NEAR(m.mean(), sk.expected_bits(), 4 * m.standard_error() + 1e-9);
}

TEST(Sketch, DeterministicGivenSeed) {
    std::vector<double> u{0.3, -0.2, 0.9, 0.1};
    SketchConfig cfg = SketchConfig::make(4, 1.0);
    Rng a = make_stream(34, 5), b = make_stream(34, 5);
    for (int t = 0; t < 100; ++t) EXPECT_EQ(sketch_once(u, cfg, a), sketch_once(u, cfg, b));
}
