#include "adl/neuron.hpp"

#include "adl/error.hpp"
#include "adl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adl {

namespace {

int floor_log2(double x) {
    int e = 0;
    std::frexp(x, &e);
    return e - 1;
}

int ceil_log2_real(double x) {
    int e = 0;
    double f = std::frexp(x, &e);
    return f == 0.5 ? e - 1 : e;
}

std::vector<double> row_dots(const Matrix& points, std::span<const double> w) {
    std::vector<double> out(static_cast<std::size_t>(points.rows()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = dot(row_span(points, i), w);
    return out;
}

struct LevelEnumerator {
    const std::vector<Sketcher::Outcome>& outcomes;
    const std::vector<double>& values;  // outcome-major, one entry per point
    const std::vector<double>& base;
    const Activation& sigma;
    std::size_t m;
    std::size_t draws;
    std::vector<double> partial;
    std::vector<CompensatedSum> acc;
    CompensatedSum total_p;

    void run(std::size_t t, double p) {
        if (t == draws) {
            const double* s = &partial[t * m];
            for (std::size_t i = 0; i < m; ++i)
                acc[i].add(p * sigma(base[i] + s[i] / static_cast<double>(draws)));
            total_p.add(p);
            return;
        }
        for (std::size_t o = 0; o < outcomes.size(); ++o) {
            for (std::size_t i = 0; i < m; ++i)
                partial[(t + 1) * m + i] = partial[t * m + i] + values[o * m + i];
            run(t + 1, p * outcomes[o].probability);
        }
    }
};

}  // namespace

double level_outcome_count(const Sketcher& sketcher, unsigned k) {
    if (sketcher.zero()) return 1.0;
    double K = static_cast<double>(sketcher.draw_outcomes().size());
    double D = std::ldexp(static_cast<double>(sketcher.config().q_B), static_cast<int>(k));
    return std::pow(K, D);
}

H1Reference h1_reference(const Sketcher& sketcher, std::span<const double> w0, const Matrix& points,
                         unsigned k, const Activation& sigma, const H1Options& opts, Rng& rng,
                         double target_se) {
    const std::size_t m = static_cast<std::size_t>(points.rows());
    const SketchConfig& cfg = sketcher.config();
    if (static_cast<std::size_t>(points.cols()) != cfg.d || w0.size() != cfg.d)
        throw DimensionError("h1_reference: dimension mismatch");
    std::vector<double> base = row_dots(points, w0);
    H1Reference ref;
    ref.standard_error.assign(m, 0.0);

    if (sketcher.zero()) {
        ref.outcome_count = 1.0;
        for (double b : base) ref.expectation.push_back(sigma(b));
        return ref;
    }

    double size = level_outcome_count(sketcher, k);
    bool exact = opts.mode == H1Mode::Exact || (opts.mode == H1Mode::Auto && size <= opts.exact_limit);
    if (exact) {
        if (size > opts.exact_limit)
            throw RefusalError("h1_reference: exact enumeration over " + std::to_string(size) +
                                   " outcomes exceeds the limit of " + std::to_string(opts.exact_limit),
                               size);
        auto outcomes = sketcher.draw_outcomes();
        std::vector<double> values(outcomes.size() * m);
        double step = sketcher.step();
        for (std::size_t o = 0; o < outcomes.size(); ++o) {
            const auto& dr = outcomes[o].draw;
            double g = static_cast<double>(dr.grid) * step * (dr.negative ? -1.0 : 1.0);
            for (std::size_t i = 0; i < m; ++i) values[o * m + i] = g * points(static_cast<Eigen::Index>(i), dr.index);
        }
        std::size_t draws = cfg.q_B << k;
        LevelEnumerator en{outcomes, values, base, sigma, m, draws,
                           std::vector<double>((draws + 1) * m, 0.0), std::vector<CompensatedSum>(m), {}};
        en.run(0, 1.0);
        if (std::abs(en.total_p.value() - 1.0) > 1e-12)
            throw Error("h1_reference: enumerated probabilities sum to " + std::to_string(en.total_p.value()));
        ref.exact = true;
        ref.outcome_count = size;
        for (auto& a : en.acc) ref.expectation.push_back(a.value());
        return ref;
    }

    std::size_t n = opts.mc_trials;
    if (n == 0) {
        n = opts.mc_max_trials;
        if (target_se > 0.0) {
            double L = sigma.lipschitz();
            double var = L * L * sketcher.norm() * sketcher.norm() / std::ldexp(1.0, static_cast<int>(k));
            double want = std::ceil(var / (target_se * target_se));
            n = static_cast<std::size_t>(std::clamp(want, 1000.0, static_cast<double>(opts.mc_max_trials)));
        }
    }
    std::vector<RunningMoments> mom(m);
    std::size_t q = std::size_t{1} << k;
    for (std::size_t t = 0; t < n; ++t) {
        AveragedSketch a = sketch_avg(sketcher, q, rng);
        for (std::size_t i = 0; i < m; ++i) mom[i].add(sigma(a.eval_offset(row_span(points, i), cfg) + base[i]));
    }
    ref.exact = false;
    ref.trials = n;
    for (std::size_t i = 0; i < m; ++i) {
        ref.expectation.push_back(mom[i].mean());
        ref.standard_error[i] = mom[i].standard_error();
    }
    return ref;
}

H1Reference h1_reference(std::span<const double> w, std::span<const double> w0,
                         std::span<const double> x, unsigned k, const SketchConfig& cfg,
                         const Activation& sigma, const H1Options& opts, Rng& rng) {
    if (w.size() != w0.size() || x.size() != w.size()) throw DimensionError("h1_reference: dimension mismatch");
    std::vector<double> u(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) u[i] = w[i] - w0[i];
    Matrix pts(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) pts(0, static_cast<Eigen::Index>(i)) = x[i];
    return h1_reference(Sketcher(u, cfg), w0, pts, k, sigma, opts, rng);
}

NeuronProtocol NeuronProtocol::make(const SketchConfig& cfg, std::size_t m, double L) {
    if (!(L > 0.0)) throw DomainError("NeuronProtocol: L must be > 0");
    NeuronProtocol p;
    p.cfg = cfg;
    p.m = m;
    p.k = squeezer_levels(cfg.d, m);
    p.L = L;
    p.alpha_reference_exponent =
        floor_log2(static_cast<double>(cfg.d * m) / (L * L * cfg.norm_ref * cfg.norm_ref));
    return p;
}

void write_neuron(MessageWriter& out, const NeuronRealization& n, const NeuronProtocol& proto) {
    out.open();
    out.bit(n.gate);
    if (n.gate) {
        write_rmf(out, n.h1);
        if (!n.h1.is_zero()) out.signed_gamma(n.alpha_exponent - proto.alpha_reference_exponent);
    }
    write_squeezer(out, n.squeezer, proto.cfg);
    out.close();
}

NeuronRealization read_neuron(MessageReader& in, const NeuronProtocol& proto) {
    NeuronRealization n;
    in.open();
    n.gate = in.bit();
    if (n.gate) {
        n.h1 = read_rmf(in, 1.0, proto.m);
        if (!n.h1.is_zero()) {
            n.alpha_exponent = static_cast<int>(in.signed_gamma() + proto.alpha_reference_exponent);
            n.h1.alpha = std::ldexp(1.0, n.alpha_exponent);
        }
    }
    n.squeezer = read_squeezer(in, proto.k, proto.cfg);
    in.close();
    return n;
}

std::size_t neuron_encoded_bits(const NeuronRealization& n, const NeuronProtocol& proto) {
    std::size_t bits = 4 + 2;
    if (n.gate) {
        bits += rmf_encoded_bits(n.h1);
        if (!n.h1.is_zero())
            bits += 2 * signed_gamma_length(n.alpha_exponent - proto.alpha_reference_exponent);
    }
    return bits + squeezer_encoded_bits(n.squeezer, proto.cfg);
}

FramedMessage neuron_encode(const NeuronRealization& n, const NeuronProtocol& proto) {
    MessageWriter w;
    write_neuron(w, n, proto);
    return w.finish();
}

NeuronDecoder::NeuronDecoder(NeuronProtocol proto, Vector w0, Activation sigma, const SampleSet& A)
    : NeuronDecoder(std::move(proto), std::move(w0), std::move(sigma),
                    std::make_shared<const Matrix>(A.points())) {}

NeuronDecoder::NeuronDecoder(NeuronProtocol proto, Vector w0, Activation sigma,
                             std::shared_ptr<const Matrix> points)
    : proto_(std::move(proto)), w0_(std::move(w0)), sigma_(std::move(sigma)), points_(std::move(points)) {
    if (static_cast<std::size_t>(w0_.size()) != proto_.cfg.d ||
        static_cast<std::size_t>(points_->cols()) != proto_.cfg.d)
        throw DimensionError("NeuronDecoder: dimension mismatch");
    if (static_cast<std::size_t>(points_->rows()) != proto_.m)
        throw DimensionError("NeuronDecoder: sample count differs from protocol");
    w0_dot_x_ = row_dots(*points_, as_span(w0_));
}

NeuronRealization NeuronDecoder::decode(const FramedMessage& msg) const {
    MessageReader r(msg);
    auto n = read_neuron(r, proto_);
    r.expect_end();
    return n;
}

double NeuronDecoder::eval(const NeuronRealization& n, std::size_t index) const {
    if (index >= proto_.m) throw DimensionError("neuron eval: index " + std::to_string(index) + " out of range");
    double h2 = n.squeezer.eval(row_span(*points_, index), w0_dot_x_[index], sigma_, proto_.cfg);
    if (!n.gate) return h2;
    return std::ldexp(n.h1.value(index), static_cast<int>(proto_.k)) + h2;
}

double NeuronDecoder::eval_at(const NeuronRealization& n, std::span<const double> x) const {
    if (n.gate)
        throw DomainError("neuron eval: the H1 gate fired, so the estimator is defined only on the sample set");
    if (x.size() != proto_.cfg.d) throw DimensionError("neuron eval: x has wrong dimension");
    return n.squeezer.eval(x, dot(as_span(w0_), x), sigma_, proto_.cfg);
}

H1Compression h1_compress(const Sketcher& sketcher, std::span<const double> w,
                          std::span<const double> w0, const Matrix& points, const Activation& sigma,
                          unsigned k, const H1Options& opts, Rng& rng) {
    H1Compression out;
    std::size_t m = static_cast<std::size_t>(points.rows());
    out.values.assign(m, 0.0);
    if (sigma.affine() || sketcher.zero()) return out;

    double L = sigma.lipschitz();
    double norm = sketcher.norm();
    double dm = static_cast<double>(static_cast<std::size_t>(points.cols()) * m);
    double alpha_exact = dm / (L * L * norm * norm);
    out.alpha_exponent = ceil_log2_real(alpha_exact);
    out.alpha = std::ldexp(1.0, out.alpha_exponent);
    out.C = L * norm / std::sqrt(dm);
    out.reference = h1_reference(sketcher, w0, points, k, sigma, opts, rng, 0.1 / out.alpha);
    for (std::size_t i = 0; i < m; ++i) {
        double h = sigma(dot(row_span(points, i), w)) - out.reference.expectation[i];
        if (std::abs(h) > out.C) {
            h = std::copysign(out.C, h);
            ++out.clamped;
        }
        out.values[i] = h;
        if (h != 0.0) out.zero = false;
    }
    return out;
}

NeuronCompressor::NeuronCompressor(std::span<const double> w, std::span<const double> w0, const SampleSet& A,
                                   const Activation& sigma, const SketchConfig& cfg, Rng& rng,
                                   const H1Options& opts)
    : NeuronCompressor(w, w0, std::make_shared<const Matrix>(A.points()), A.B(), sigma, cfg, rng, opts) {}

NeuronCompressor::NeuronCompressor(std::span<const double> w, std::span<const double> w0,
                                   std::shared_ptr<const Matrix> points, double B, const Activation& sigma,
                                   const SketchConfig& cfg, Rng& rng, const H1Options& opts)
    : decoder_(NeuronProtocol::make(cfg, static_cast<std::size_t>(points->rows()), sigma.lipschitz()),
               Eigen::Map<const Vector>(w0.data(), static_cast<Eigen::Index>(w0.size())), sigma, points),
      sketcher_([&] {
          if (w.size() != w0.size()) throw DimensionError("NeuronCompressor: w and w0 differ in length");
          std::vector<double> u(w.size());
          for (std::size_t i = 0; i < w.size(); ++i) u[i] = w[i] - w0[i];
          return Sketcher(u, cfg);
      }()) {
    if (B > cfg.B) throw DomainError("NeuronCompressor: sample bound exceeds the sketch bound B");
    const Matrix& pts = *points;
    h1_ = h1_compress(sketcher_, w, w0, pts, sigma, k(), opts, rng);
    target_.reserve(static_cast<std::size_t>(pts.rows()));
    for (std::size_t i = 0; i < static_cast<std::size_t>(pts.rows()); ++i)
        target_.push_back(sigma(dot(row_span(pts, i), w)));
}

NeuronRealization NeuronCompressor::sample(Rng& rng) const {
    NeuronRealization n;
    n.gate = bernoulli(rng, std::ldexp(1.0, -static_cast<int>(k())));
    if (n.gate) {
        if (h1_.zero) {
            n.h1 = rmf_zero(protocol().m);
        } else {
            n.h1 = rmf_make(h1_.values, h1_.C, h1_.alpha, rng);
            n.alpha_exponent = h1_.alpha_exponent;
        }
    }
    n.squeezer = squeezer_sample(sketcher_, k(), rng);
    return n;
}

double NeuronCompressor::variance_bound() const {
    double L = protocol().L;
    double u = sketcher_.norm();
    return 5.0 * L * L * u * u * k();
}

double NeuronCompressor::expected_bits() const {
    double gate_part = 0.0;
    if (h1_.zero) {
        gate_part = 6.0;
    } else {
        std::size_t payload = 0;
        for (double f : h1_.values) payload += 1 + bijective_length(zigzag(rmf_entry_law(f, h1_.alpha).floor_value));
        gate_part = 2.0 * static_cast<double>(2 + 2 * h1_.values.size() + payload) +
                    2.0 * static_cast<double>(signed_gamma_length(h1_.alpha_exponent -
                                                                  protocol().alpha_reference_exponent));
    }
    return 6.0 + std::ldexp(gate_part, -static_cast<int>(k())) + squeezer_expected_bits(sketcher_, k());
}

}  // namespace adl
