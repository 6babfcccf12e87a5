#include "adl/error.hpp"
#include "adl/harness.hpp"
#include "adl/neuron.hpp"
#include "adl/rmf.hpp"
#include "adl/rng.hpp"
#include "adl/squeezer.hpp"
#include "adl/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <vector>

using namespace adl;

namespace {

Matrix points_2x2() {
    Matrix P(2, 2);
    P << 0.6, 0.8, -0.5, 0.3;
    return P;
}

}  // namespace

TEST(RMF, GridValueIsDeterministic) {
    Rng rng = make_stream(40, 0);
    std::vector<double> f{0.75};
    for (int t = 0; t < 100; ++t) {
        RMFRealization r = rmf_make(f, 1.0, 4.0, rng);
        EXPECT_EQ(r.value(0), 0.75);
    }
    RMFEntryLaw law = rmf_entry_law(0.75, 4.0);
    EXPECT_EQ(law.floor_value, 3);
    EXPECT_EQ(law.bump_probability, 0.0);
}

TEST(RMF, TwoPointLaw) {
    RMFEntryLaw law = rmf_entry_law(0.6, 4.0);
    EXPECT_EQ(law.floor_value, 2);
    EXPECT_NEAR(law.bump_probability, 0.1, 1e-15);
    // Oracle: 0.5 w.p. 0.9, 1.5 w.p. 0.1.
    std::vector<double> p{0.9, 0.1}, v{0.5, 1.5};
    ExactReport ex = exact_from_outcomes(p, v);
    EXPECT_NEAR(ex.mean, 0.6, 1e-15);
    EXPECT_NEAR(ex.variance, 0.09, 1e-15);

    std::vector<double> f{0.6};
    Sampler s = [&](Rng& rng) { return MCSample{rmf_make(f, 1.0, 4.0, rng).value(0), 0.0}; };
    MCReport rep = mc_contract(s, 0.6, 0.09, std::nullopt, 200000, 41);
    EXPECT_TRUE(rep.pass) << rep.z;
    EXPECT_NEAR(rep.variance, 0.09, 0.005);
}

TEST(RMF, NegativeValuesUseFloor) {
    RMFEntryLaw law = rmf_entry_law(-0.6, 4.0);
    EXPECT_EQ(law.floor_value, -3);
    EXPECT_NEAR(law.bump_probability, 0.15, 1e-15);
}

TEST(RMF, ZeroFunctionIsMarker) {
    Rng rng = make_stream(42, 0);
    std::vector<double> f(5, 0.0);
    RMFRealization r = rmf_make(f, 1.0, 8.0, rng);
    EXPECT_TRUE(r.is_zero());
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(r.value(i), 0.0);
    FramedMessage m = rmf_encode(r);
    EXPECT_EQ(m.physical_bits(), 6u);
    EXPECT_EQ(rmf_encoded_bits(r), 6u);
    EXPECT_EQ(rmf_decode(m, 8.0, 5), r);
}

TEST(RMF, RejectsValuesAboveBound) {
    Rng rng = make_stream(43, 0);
    std::vector<double> f{0.1, 0.2, 1.5};
    try {
        rmf_make(f, 1.0, 4.0, rng);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
    }
    EXPECT_THROW(rmf_make(f, 2.0, 0.0, rng), DomainError);
}

TEST(RMF, UnbiasedAndVarianceBelowInverseOrder) {
    Rng rng = make_stream(44, 0);
    for (int t = 0; t < 200; ++t) {
        double alpha = std::ldexp(1.0, static_cast<int>(rng() % 8));
        double f = (uniform01(rng) * 2 - 1) * 3.0;
        RMFEntryLaw law = rmf_entry_law(f, alpha);
        double lo = static_cast<double>(law.floor_value) / alpha;
        double p = law.bump_probability;
        EXPECT_GE(p, 0.0);
        EXPECT_LT(p, 1.0 / alpha + 1e-15);
        EXPECT_NEAR(lo + p, f, 1e-12);
        EXPECT_LE(p * (1 - p), 1.0 / alpha);
    }
}

TEST(RMF, RoundTripAndLengthBound) {
    Rng rng = make_stream(45, 0);
    for (int t = 0; t < 200; ++t) {
        std::size_t m = 1 + rng() % 12;
        double alpha = std::ldexp(1.0, static_cast<int>(rng() % 10));
        double C = 0.1 + 5 * uniform01(rng);
        std::vector<double> f(m);
        for (auto& x : f) x = (2 * uniform01(rng) - 1) * C;
        RMFRealization r = rmf_make(f, C, alpha, rng);
        FramedMessage msg = rmf_encode(r);
        EXPECT_EQ(msg.physical_bits(), rmf_encoded_bits(r));
        RMFRealization back = rmf_decode(FramedMessage::from_bits(msg.to_bits()), alpha, m);
        EXPECT_EQ(back, r);
        EXPECT_LE(rmf_payload_symbols(r), m * rmf_entry_symbol_bound(alpha, C));
        // Framing: two outer brackets plus two per entry.
        EXPECT_EQ(msg.symbol_count(), 2 + 2 * m + rmf_payload_symbols(r));
    }
}

TEST(Gate, ScaledIndicatorHasUnitMean) {
    for (unsigned k = 1; k < 20; ++k) {
        double p = std::ldexp(1.0, -static_cast<int>(k));
        std::vector<double> probs{1 - p, p}, vals{0.0, std::ldexp(1.0, static_cast<int>(k))};
        ExactReport ex = exact_from_outcomes(probs, vals);
        EXPECT_EQ(ex.mean, 1.0);
        EXPECT_NEAR(ex.variance, std::ldexp(1.0, static_cast<int>(k)) - 1, 1e-9);
    }
}

TEST(H1Reference, AffineActivationGivesInnerProduct) {
    std::vector<double> w{0.7, 1.0}, w0{0.1, 0.2}, x{0.6, 0.8};
    SketchConfig cfg = SketchConfig::make(2, 1.0);
    Rng rng = make_stream(46, 0);
    H1Reference r = h1_reference(w, w0, x, 2, cfg, Activation::identity(), {}, rng);
    EXPECT_TRUE(r.exact);
    EXPECT_NEAR(r.expectation[0], 0.7 * 0.6 + 0.8, 1e-12);
}

TEST(H1Reference, BaseEqualsTargetIsConstant) {
    std::vector<double> w{0.3, -0.4}, x{0.6, 0.8};
    SketchConfig cfg = SketchConfig::make(2, 1.0);
    Rng rng = make_stream(47, 0);
    H1Reference r = h1_reference(w, w, x, 3, cfg, Activation::relu(), {}, rng);
    EXPECT_EQ(r.expectation[0], 0.0);
    H1Reference t = h1_reference(w, w, x, 3, cfg, Activation::tanh(), {}, rng);
    EXPECT_NEAR(t.expectation[0], std::tanh(0.3 * 0.6 - 0.4 * 0.8), 1e-15);
}

TEST(H1Reference, ExactAgreesWithMonteCarlo) {
    std::vector<double> w0{0.1, -0.2}, w{0.7, 0.6}, x{0.6, -0.8};
    SketchConfig cfg = SketchConfig::make(2, 1.0);
    Rng rng = make_stream(48, 0);
    H1Options ex_opts;
    ex_opts.mode = H1Mode::Exact;
    H1Reference ex = h1_reference(w, w0, x, 2, cfg, Activation::relu(), ex_opts, rng);
    ASSERT_TRUE(ex.exact);
    H1Options mc_opts;
    mc_opts.mode = H1Mode::MonteCarlo;
    mc_opts.mc_trials = 1000000;
    mc_opts.mc_max_trials = 1000000;
    H1Reference mc = h1_reference(w, w0, x, 2, cfg, Activation::relu(), mc_opts, rng);
    ASSERT_FALSE(mc.exact);
    EXPECT_GT(mc.standard_error[0], 0.0);
    EXPECT_NEAR(mc.expectation[0], ex.expectation[0], 4 * mc.standard_error[0]);
}

TEST(H1Reference, ExactRefusesLargeSpaces) {
    Rng rng = make_stream(49, 0);
    std::vector<double> w(50), w0(50, 0.0), x(50, 0.1);
    for (auto& v : w) v = gaussian(rng) * 0.1;
    SketchConfig cfg = SketchConfig::make(50, 1.0);
    H1Options opts;
    opts.mode = H1Mode::Exact;
    EXPECT_THROW(h1_reference(w, w0, x, 3, cfg, Activation::relu(), opts, rng), RefusalError);
}

TEST(H1Compress, ValuesWithinHalf) {
    Matrix P = points_2x2();
    std::vector<double> w0{0.1, 0.2}, w{0.7, 1.0};
    SketchConfig cfg = SketchConfig::make(2, 1.0);
    Sketcher sk(std::vector<double>{0.6, 0.8}, cfg);
    Rng rng = make_stream(50, 0);
    H1Compression h = h1_compress(sk, w, w0, P, Activation::relu(), squeezer_levels(2, 2), {}, rng);
    EXPECT_FALSE(h.zero);
    EXPECT_EQ(h.clamped, 0u);
    EXPECT_NEAR(h.C, 0.5, 1e-15);
    EXPECT_EQ(h.alpha, 4.0);
    for (double v : h.values) EXPECT_LE(std::abs(v), 0.5);
}

TEST(H1Compress, AffineIsZero) {
    Matrix P = points_2x2();
    std::vector<double> w0{0.1, 0.2}, w{0.7, 1.0};
    SketchConfig cfg = SketchConfig::make(2, 1.0);
    Sketcher sk(std::vector<double>{0.6, 0.8}, cfg);
    Rng rng = make_stream(51, 0);
    H1Compression h = h1_compress(sk, w, w0, P, Activation::identity(), 2, {}, rng);
    EXPECT_TRUE(h.zero);
}

TEST(Squeezer, Levels) {
    EXPECT_EQ(squeezer_levels(1, 1), 1u);
    EXPECT_EQ(squeezer_levels(2, 1), 1u);
    EXPECT_EQ(squeezer_levels(2, 2), 2u);
    EXPECT_EQ(squeezer_levels(100, 1000), 17u);
}

TEST(Squeezer, BaseEqualsTargetIsDeterministic) {
    std::vector<double> w{0.3, -0.4, 0.5}, x{0.2, 0.1, -0.3};
    SketchConfig cfg = SketchConfig::make(3, 1.0);
    Rng rng = make_stream(52, 0);
    double expect = Activation::relu()(0.06 - 0.04 - 0.15);
    for (int t = 0; t < 200; ++t) {
        SqueezerRealization s = squeezer_sample(w, w, 2, cfg, rng);
        EXPECT_EQ(s.eval(x, w, Activation::relu(), cfg), expect);
    }
}

TEST(Squeezer, TelescopingMeanByJointEnumeration) {
    const std::vector<double> w0{0.1, -0.2}, w{0.7, 0.6}, x{0.6, -0.8};
    SketchConfig cfg = SketchConfig::make(2, 1.0);
    const unsigned k = 1;
    std::vector<double> u{w[0] - w0[0], w[1] - w0[1]};
    Sketcher sk(u, cfg);
    auto outs = sk.draw_outcomes();
    std::vector<double> dp;
    for (const auto& o : outs) dp.push_back(o.probability);
    const std::size_t q = cfg.q_B;
    // Factor 0: flag; then q draws for level 0 and 2q draws for level 1.
    std::vector<std::vector<double>> factors{{0.5, 0.5}};
    for (std::size_t t = 0; t < 3 * q; ++t) factors.push_back(dp);
    Activation relu = Activation::relu();
    auto make_sketch = [&](std::span<const std::size_t> c) {
        SketchSample s;
        s.scale = sk.scale();
        for (auto i : c) s.draws.push_back(outs[i].draw);
        return s;
    };
    ExactReport ex = enumerate_exact(factors, [&](std::span<const std::size_t> c) {
        SqueezerRealization r;
        r.k = k;
        r.fired = {0, static_cast<std::uint8_t>(c[0])};
        AveragedSketch l0{{make_sketch(c.subspan(1, q))}};
        r.levels = {l0, std::nullopt};
        if (c[0]) r.levels[1] = AveragedSketch{{make_sketch(c.subspan(1 + q, q)), make_sketch(c.subspan(1 + 2 * q, q))}};
        return ExactOutcome{r.eval(x, w0, relu, cfg), static_cast<double>(squeezer_encoded_bits(r, cfg))};
    });
    EXPECT_NEAR(ex.total_probability, 1.0, 1e-12);
    Rng rng = make_stream(53, 0);
    H1Options opts;
    opts.mode = H1Mode::Exact;
    H1Reference ref = h1_reference(w, w0, x, k, cfg, relu, opts, rng);
    EXPECT_NEAR(ex.mean, ref.expectation[0], 1e-12);
    EXPECT_NEAR(ex.expected_bits, squeezer_expected_bits(sk, k), 1e-9);
    EXPECT_LE(ex.variance, 3.0 * 1.0 * k);
}

TEST(Squeezer, MonteCarloContractAtD100) {
    Rng setup = make_stream(54, 0);
    const std::size_t d = 100;
    std::vector<double> w0(d), u(d), x(d);
    double nu = 0, nx = 0;
    for (std::size_t i = 0; i < d; ++i) {
        w0[i] = gaussian(setup) * 0.05;
        u[i] = gaussian(setup);
        x[i] = gaussian(setup);
        nu += u[i] * u[i];
        nx += x[i] * x[i];
    }
    std::vector<double> w(d);
    for (std::size_t i = 0; i < d; ++i) {
        w[i] = w0[i] + u[i] / std::sqrt(nu);
        x[i] /= std::sqrt(nx);
    }
    SketchConfig cfg = SketchConfig::make(d, 1.0);
    unsigned k = squeezer_levels(d, 10);
    Activation id = Activation::identity();
    Sampler s = [&](Rng& rng) {
        SqueezerRealization r = squeezer_sample(w, w0, k, cfg, rng);
        return MCSample{r.eval(x, w0, id, cfg), static_cast<double>(squeezer_encoded_bits(r, cfg))};
    };
    Sketcher skd([&] {
        std::vector<double> diff(d);
        for (std::size_t i = 0; i < d; ++i) diff[i] = w[i] - w0[i];
        return diff;
    }(), cfg);
    double truth = 0.0;
    for (std::size_t i = 0; i < d; ++i) truth += w[i] * x[i];
    MCReport rep = mc_contract(s, truth, 3.0 * k, squeezer_length_bound(k, skd.expected_bits()), 20000, 55);
    EXPECT_TRUE(rep.pass) << rep.criteria;
}

TEST(Squeezer, RoundTrip) {
    Rng rng = make_stream(56, 0);
    SketchConfig cfg = SketchConfig::make(20, 1.0);
    std::vector<double> w(20), w0(20);
    for (auto& v : w) v = gaussian(rng) * 0.3;
    for (auto& v : w0) v = gaussian(rng) * 0.3;
    for (int t = 0; t < 100; ++t) {
        SqueezerRealization r = squeezer_sample(w, w0, 4, cfg, rng);
        FramedMessage m = squeezer_encode(r, cfg);
        EXPECT_EQ(m.physical_bits(), squeezer_encoded_bits(r, cfg));
        SqueezerRealization back = squeezer_decode(FramedMessage::from_bits(m.to_bits()), 4, cfg);
        EXPECT_EQ(back, r);
        EXPECT_TRUE(back.levels[0].has_value());
        for (unsigned i = 1; i <= 4; ++i)
            if (r.fired[i]) EXPECT_TRUE(r.levels[i].has_value() && r.levels[i - 1].has_value());
    }
}

class NeuronFixture : public ::testing::Test {
protected:
    Matrix P = points_2x2();
    SampleSet A{P, 1.0};
    std::vector<double> w0{0.1, 0.2};
    std::vector<double> w{0.7, 1.0};
    SketchConfig cfg = SketchConfig::make(2, 1.0);
};

TEST_F(NeuronFixture, BaseEqualsTargetIsDeterministic) {
    Rng rng = make_stream(60, 0);
    NeuronCompressor nc(w0, w0, A, Activation::relu(), cfg, rng);
    EXPECT_EQ(nc.variance_bound(), 0.0);
    for (int t = 0; t < 200; ++t) {
        NeuronRealization n = nc.sample(rng);
        for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(nc.eval(n, i), nc.target(i));
    }
}

TEST_F(NeuronFixture, UnbiasedOnSampleSet) {
    Rng rng = make_stream(61, 0);
    NeuronCompressor nc(w, w0, A, Activation::relu(), cfg, rng);
    ASSERT_TRUE(nc.h1().reference.exact);
    EXPECT_NEAR(nc.variance_bound(), 5.0 * 1.0 * nc.k(), 1e-12);
    VectorSampler s = [&](Rng& r) {
        NeuronRealization n = nc.sample(r);
        return MCVectorSample{{nc.eval(n, 0), nc.eval(n, 1)},
                              static_cast<double>(neuron_encoded_bits(n, nc.protocol()))};
    };
    std::vector<double> truth{nc.target(0), nc.target(1)};
    MCOptions opts;
    opts.len_overhead = 0.05;
    MCVectorReport rep = mc_contract_vector(s, truth, nc.variance_bound(), nc.expected_bits(), 200000, 62, opts);
    EXPECT_TRUE(rep.pass);
    for (const auto& o : rep.outputs) EXPECT_TRUE(o.pass) << o.criteria;
}

TEST_F(NeuronFixture, OffSampleEvaluationRequiresClosedGate) {
    Rng rng = make_stream(63, 0);
    NeuronCompressor nc(w, w0, A, Activation::relu(), cfg, rng);
    std::vector<double> x{0.1, 0.1};
    bool saw_open = false, saw_fired = false;
    for (int t = 0; t < 2000 && !(saw_open && saw_fired); ++t) {
        NeuronRealization n = nc.sample(rng);
        if (n.gate) {
            saw_fired = true;
            EXPECT_THROW(nc.decoder().eval_at(n, x), DomainError);
        } else {
            saw_open = true;
            EXPECT_NO_THROW(nc.decoder().eval_at(n, x));
        }
    }
    EXPECT_TRUE(saw_open && saw_fired);
}

TEST_F(NeuronFixture, RoundTrip) {
    Rng rng = make_stream(64, 0);
    NeuronCompressor nc(w, w0, A, Activation::tanh(), cfg, rng);
    for (int t = 0; t < 300; ++t) {
        NeuronRealization n = nc.sample(rng);
        FramedMessage m = neuron_encode(n, nc.protocol());
        EXPECT_EQ(m.physical_bits(), neuron_encoded_bits(n, nc.protocol()));
        NeuronRealization back = nc.decoder().decode(FramedMessage::from_bits(m.to_bits()));
        EXPECT_EQ(back, n);
        for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(nc.decoder().eval(back, i), nc.eval(n, i));
    }
}

TEST(Activation, SquareBoundByTriangle) {
    // σ(a)² ≤ 2σ(0)² + 2L²a² for any L-Lipschitz σ.
    Rng rng = make_stream(65, 0);
    std::vector<Activation> acts{Activation::relu(), Activation::tanh(), Activation::scaled_identity(3.0),
                                 Activation("shifted", [](double a) { return std::abs(a) + 0.7; }, 1.0)};
    for (const auto& s : acts)
        for (int t = 0; t < 5000; ++t) {
            double a = 10 * gaussian(rng);
            double L = s.lipschitz();
            EXPECT_LE(s(a) * s(a), 2 * s.at_zero() * s.at_zero() + 2 * L * L * a * a + 1e-12);
        }
}

TEST(Composition, SumOfIndependentEstimators) {
    Sampler a = [](Rng& rng) { return MCSample{1.0 + gaussian(rng), 10.0}; };
    Sampler b = [](Rng& rng) { return MCSample{2.0 + gaussian(rng), 5.0}; };
    MCReport rep = mc_contract(sampler_sum(a, b), 3.0, 2.0, 15.0, 100000, 66);
    EXPECT_TRUE(rep.pass) << rep.criteria;
    EXPECT_LE(rep.variance, 2.1);
    EXPECT_EQ(rep.mean_bits, 15.0);
}
