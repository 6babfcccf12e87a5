#include "adl/network.hpp"

#include "adl/error.hpp"
#include "adl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <string>

namespace adl {

namespace {

std::size_t gv_bits(const GvLaw& g) {
    if (g.value == 0.0) return 6;
    auto law = rmf_entry_law(g.value, kGvOrder);
    return 2 * (2 + 2 + 1 + bijective_length(zigzag(law.floor_value)));
}

double coefficient_bits(const CoefficientLaw& c) {
    double lo = static_cast<double>(2 * signed_gamma_length(c.floor_value));
    if (c.bump_probability == 0.0) return lo;
    double hi = static_cast<double>(2 * signed_gamma_length(c.floor_value + 1));
    return (1.0 - c.bump_probability) * lo + c.bump_probability * hi;
}

}  // namespace

std::vector<double> neuron_probs(std::span<const double> v) {
    const std::size_t T = v.size();
    if (T == 0) throw DimensionError("neuron_probs: empty v");
    double sq = 0.0;
    for (double x : v) sq += x * x;
    std::vector<double> p(T);
    double floor_p = 1.0 / (2.0 * static_cast<double>(T));
    for (std::size_t j = 0; j < T; ++j)
        p[j] = sq == 0.0 ? 1.0 / static_cast<double>(T) : v[j] * v[j] / (2.0 * sq) + floor_p;
    return p;
}

CoefficientLaw coefficient_law(double v_j, double p_j) {
    if (!(p_j > 0.0)) throw DomainError("coefficient_law: p_j must be > 0");
    CoefficientLaw c;
    c.ratio = v_j / p_j;
    double f = std::floor(c.ratio);
    c.floor_value = static_cast<std::int64_t>(f);
    c.bump_probability = c.ratio - f;
    return c;
}

std::size_t neuron_average_count(double B, std::size_t d, std::size_t m) {
    double k = static_cast<double>(ceil_log2(static_cast<std::uint64_t>(d) * m));
    return static_cast<std::size_t>(std::ceil(std::max(1.0, 5.0 * k / (B * B))));
}

GvLaw gv_law(std::span<const double> v, double sigma0) {
    double s = 0.0, a = 0.0;
    for (double x : v) {
        s += x;
        a += std::abs(x);
    }
    return {sigma0 * s, std::abs(sigma0) * a};
}

void write_part_fields(MessageWriter& out, const NetworkPart& f, const NetworkProtocol& proto) {
    out.fixed(f.index, proto.index_bits());
    out.signed_gamma(f.coefficient);
    out.open();
    for (const auto& n : f.neurons) write_neuron(out, n, proto.neuron);
    out.close();
}

NetworkPart read_part_fields(MessageReader& in, const NetworkProtocol& proto) {
    NetworkPart f;
    std::size_t at = in.bit_offset();
    f.index = static_cast<std::uint32_t>(in.fixed(proto.index_bits()));
    if (f.index >= proto.T) throw DecodeError("neuron index out of range", at);
    f.coefficient = in.signed_gamma();
    in.open();
    f.neurons.reserve(proto.n_avg);
    while (in.next_is_open()) f.neurons.push_back(read_neuron(in, proto.neuron));
    if (f.neurons.size() != proto.n_avg) throw DecodeError("wrong neuron count in bundle", in.bit_offset());
    in.close();
    return f;
}

std::size_t part_field_bits(const NetworkPart& f, const NetworkProtocol& proto) {
    std::size_t bits = 2 * (proto.index_bits() + signed_gamma_length(f.coefficient)) + 4;
    for (const auto& n : f.neurons) bits += neuron_encoded_bits(n, proto.neuron);
    return bits;
}

void write_network(MessageWriter& out, const NetworkRealization& r, const NetworkProtocol& proto) {
    out.open();
    write_part_fields(out, r.f, proto);
    write_rmf(out, r.gv);
    out.close();
}

NetworkRealization read_network(MessageReader& in, const NetworkProtocol& proto) {
    NetworkRealization r;
    in.open();
    r.f = read_part_fields(in, proto);
    r.gv = read_rmf(in, kGvOrder, 1);
    in.close();
    return r;
}

FramedMessage network_encode(const NetworkRealization& r, const NetworkProtocol& proto) {
    MessageWriter w;
    write_network(w, r, proto);
    return w.finish();
}

std::size_t network_encoded_bits(const NetworkRealization& r, const NetworkProtocol& proto) {
    return 4 + part_field_bits(r.f, proto) + rmf_encoded_bits(r.gv);
}

NetworkDecoder::NetworkDecoder(NetworkProtocol proto, const Matrix& W0, const Activation& sigma,
                               std::shared_ptr<const Matrix> points)
    : proto_(std::move(proto)), sigma0_(sigma.at_zero()) {
    if (static_cast<std::size_t>(W0.rows()) != proto_.T) throw DimensionError("NetworkDecoder: W0 has wrong row count");
    rows_.reserve(proto_.T);
    for (std::size_t j = 0; j < proto_.T; ++j) rows_.emplace_back(proto_.neuron, Vector(W0.row(static_cast<Eigen::Index>(j)).transpose()), sigma, points);
}

NetworkRealization NetworkDecoder::decode(const FramedMessage& msg) const {
    MessageReader r(msg);
    auto out = read_network(r, proto_);
    r.expect_end();
    return out;
}

double NetworkDecoder::eval_part(const NetworkPart& f, std::size_t index) const {
    const NeuronDecoder& row = rows_.at(f.index);
    double s = 0.0;
    for (const auto& n : f.neurons) s += row.eval(n, index) - sigma0_;
    return static_cast<double>(f.coefficient) * (s / static_cast<double>(f.neurons.size()));
}

double NetworkDecoder::eval(const NetworkRealization& r, std::size_t index) const {
    return eval_part(r.f, index) + r.gv.value(0);
}

NeuronBank::NeuronBank(const Matrix& W, const Matrix& W0, std::shared_ptr<const Matrix> points, double B,
                       const Activation& sigma, const SketchConfig& cfg, std::uint64_t seed,
                       const H1Options& opts)
    : points_(std::move(points)), cfg_(cfg), W0_(W0) {
    if (W.rows() != W0.rows() || W.cols() != W0.cols()) throw DimensionError("NeuronBank: W and W0 differ in shape");
    const std::size_t T = static_cast<std::size_t>(W.rows());
    const std::size_t d = static_cast<std::size_t>(W.cols());
    std::map<std::vector<double>, std::size_t> seen;
    std::vector<std::size_t> owner(T);
    std::vector<std::size_t> firsts;
    for (std::size_t j = 0; j < T; ++j) {
        std::vector<double> key(2 * d);
        auto w = row_span(W, j);
        auto w0 = row_span(W0, j);
        std::copy(w.begin(), w.end(), key.begin());
        std::copy(w0.begin(), w0.end(), key.begin() + static_cast<std::ptrdiff_t>(d));
        auto [it, inserted] = seen.emplace(std::move(key), firsts.size());
        if (inserted) firsts.push_back(j);
        owner[j] = it->second;
    }
    distinct_ = firsts.size();
    std::vector<std::shared_ptr<const NeuronCompressor>> built(distinct_);
    std::vector<double> bits(distinct_);
    parallel_chunks(distinct_, [&](std::size_t c) {
        std::size_t j = firsts[c];
        Rng rng = make_stream(seed, j);
        auto nc = std::make_shared<const NeuronCompressor>(row_span(W, j), row_span(W0, j), points_, B, sigma, cfg,
                                                           rng, opts);
        bits[c] = nc->expected_bits();
        built[c] = std::move(nc);
    });
    rows_.resize(T);
    bits_.resize(T);
    for (std::size_t j = 0; j < T; ++j) {
        rows_[j] = built[owner[j]];
        bits_[j] = bits[owner[j]];
    }
    distance_sq_ = (W - W0).squaredNorm();
}

SketchConfig network_sketch_config(const HypoParams& p, unsigned mantissa_bits) {
    double share = p.R() / std::sqrt(static_cast<double>(p.T()));
    return SketchConfig::make(p.d(), p.B(), mantissa_bits, share > 0.0 ? share : 1.0);
}

namespace {

std::shared_ptr<const NeuronBank> make_bank(const Hypothesis& h, const HypoParams& p, const SampleSet& A,
                                            const Activation& sigma, const NetworkOptions& opts) {
    auto rep = validate(h, p);
    if (!rep.valid())
        throw DomainError("network: hypothesis outside the class (‖W − W0‖_F = " + std::to_string(rep.w_distance) +
                          ", ‖v − v0‖ = " + std::to_string(rep.v_distance) + ")");
    if (A.d() != p.d()) throw DimensionError("network: sample dimension differs from d");
    if (A.B() > p.B()) throw DomainError("network: sample bound exceeds B");
    return std::make_shared<const NeuronBank>(h.W(), p.W0(), std::make_shared<const Matrix>(A.points()), p.B(),
                                              sigma, network_sketch_config(p, opts.mantissa_bits), opts.h1_seed,
                                              opts.h1);
}

NetworkProtocol make_protocol(const NeuronBank& bank, std::size_t T, double B) {
    NetworkProtocol proto;
    proto.neuron = bank.row(0).protocol();
    proto.T = T;
    proto.n_avg = neuron_average_count(B, proto.neuron.cfg.d, proto.neuron.m);
    return proto;
}

}  // namespace

NetworkCompressor::NetworkCompressor(const Hypothesis& h, const HypoParams& p, const SampleSet& A,
                                     const Activation& sigma, const NetworkOptions& opts)
    : NetworkCompressor(make_bank(h, p, A, sigma, opts), h.v(), p, sigma) {}

NetworkCompressor::NetworkCompressor(std::shared_ptr<const NeuronBank> bank, const Vector& v, const HypoParams& p,
                                     const Activation& sigma)
    : bank_(std::move(bank)),
      v_(v),
      sigma0_(sigma.at_zero()),
      proto_(make_protocol(*bank_, static_cast<std::size_t>(v.size()), p.B())),
      decoder_(proto_, bank_->W0(), sigma, bank_->points()) {
    if (bank_->size() != proto_.T) throw DimensionError("network: v length differs from width");
    p_ = neuron_probs(as_span(v_));
    double acc = 0.0;
    for (std::size_t j = 0; j < proto_.T; ++j) {
        acc += p_[j];
        cumulative_.push_back(acc);
        coef_.push_back(coefficient_law(v_[static_cast<Eigen::Index>(j)], p_[j]));
    }
    gv_ = gv_law(as_span(v_), sigma0_);
    const std::size_t m = proto_.neuron.m;
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < proto_.T; ++j) s += v_[static_cast<Eigen::Index>(j)] * bank_->row(j).target(i);
        target_.push_back(s);
    }
    double L = sigma.lipschitz();
    double B = p.B();
    f_bound_ = 10.0 * L * L * B * B * (v_.squaredNorm() + 0.125) * (bank_->distance_sq() + p.W0().squaredNorm());
}

NetworkPart NetworkCompressor::sample_part(Rng& rng) const {
    NetworkPart f;
    double target = uniform01(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), proto_.T - 1);
    f.index = static_cast<std::uint32_t>(j);
    f.coefficient = coef_[j].floor_value + (bernoulli(rng, coef_[j].bump_probability) ? 1 : 0);
    f.neurons.reserve(proto_.n_avg);
    const NeuronCompressor& nc = bank_->row(j);
    for (std::size_t a = 0; a < proto_.n_avg; ++a) f.neurons.push_back(nc.sample(rng));
    return f;
}

NetworkRealization NetworkCompressor::sample(Rng& rng) const {
    NetworkRealization r;
    r.f = sample_part(rng);
    const double g[1] = {gv_.value};
    r.gv = rmf_make(g, gv_.C, kGvOrder, rng);
    return r;
}

double NetworkCompressor::eval_part(const NetworkPart& f, std::size_t index) const {
    const NeuronCompressor& nc = bank_->row(f.index);
    double s = 0.0;
    for (const auto& n : f.neurons) s += nc.eval(n, index) - sigma0_;
    return static_cast<double>(f.coefficient) * (s / static_cast<double>(f.neurons.size()));
}

double NetworkCompressor::eval(const NetworkRealization& r, std::size_t index) const {
    return eval_part(r.f, index) + r.gv.value(0);
}

double NetworkCompressor::expected_part_bits() const {
    double e = 2.0 * proto_.index_bits() + 4.0;
    for (std::size_t j = 0; j < proto_.T; ++j)
        e += p_[j] * (coefficient_bits(coef_[j]) + static_cast<double>(proto_.n_avg) * bank_->row_expected_bits(j));
    return e;
}

double NetworkCompressor::expected_bits() const {
    return 4.0 + expected_part_bits() + static_cast<double>(gv_bits(gv_));
}

std::size_t unit_family_count(double L, double B, double R, double W0_fro, double rho) {
    if (rho == 0.0) return 0;
    double V = 10.0 * L * L * B * B * (rho * rho + 0.125) * (R * R + W0_fro * W0_fro);
    return static_cast<std::size_t>(std::max(1.0, std::ceil(8.0 / 3.0 * V)));
}

std::size_t unit_family_count_reference(double L, double B, double R, double W0_fro, double rho) {
    return static_cast<std::size_t>(std::ceil(15.0 * L * L * B * B * rho * rho * (R * R + W0_fro * W0_fro)));
}

void write_unit(MessageWriter& out, const UnitRealization& u, const NetworkProtocol& proto) {
    out.open();
    write_rmf(out, u.gv);
    for (const auto* fam : {&u.a, &u.b}) {
        out.open();
        for (const auto& f : *fam) {
            out.open();
            write_part_fields(out, f, proto);
            out.close();
        }
        out.close();
    }
    out.close();
}

UnitRealization read_unit(MessageReader& in, const NetworkProtocol& proto, std::size_t n_a, std::size_t n_b) {
    UnitRealization u;
    in.open();
    u.gv = read_rmf(in, kGvOrder, 1);
    for (auto [fam, n] : {std::pair{&u.a, n_a}, std::pair{&u.b, n_b}}) {
        in.open();
        while (in.next_is_open()) {
            in.open();
            fam->push_back(read_part_fields(in, proto));
            in.close();
        }
        if (fam->size() != n) throw DecodeError("wrong family size", in.bit_offset());
        in.close();
    }
    in.close();
    return u;
}

FramedMessage unit_encode(const UnitRealization& u, const NetworkProtocol& proto) {
    MessageWriter w;
    write_unit(w, u, proto);
    return w.finish();
}

std::size_t unit_encoded_bits(const UnitRealization& u, const NetworkProtocol& proto) {
    std::size_t bits = 4 + rmf_encoded_bits(u.gv) + 8;
    for (const auto* fam : {&u.a, &u.b})
        for (const auto& f : *fam) bits += 4 + part_field_bits(f, proto);
    return bits;
}

UnitEstimator::UnitEstimator(const Hypothesis& h, const HypoParams& p, const SampleSet& A, const Activation& sigma,
                             const NetworkOptions& opts) {
    auto bank = make_bank(h, p, A, sigma, opts);
    Vector dv = h.v() - p.v0();
    a_ = std::make_unique<NetworkCompressor>(bank, dv, p, sigma);
    b_ = std::make_unique<NetworkCompressor>(bank, p.v0(), p, sigma);
    gv_ = gv_law(as_span(h.v()), sigma.at_zero());
    double w0 = p.W0().norm();
    double L = sigma.lipschitz();
    n_a_ = unit_family_count(L, p.B(), p.R(), w0, p.r());
    n_b_ = unit_family_count(L, p.B(), p.R(), w0, p.v0().norm());
    reference_count_ = unit_family_count_reference(L, p.B(), p.R(), w0, h.v().norm());
    for (std::size_t i = 0; i < A.m(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < h.T(); ++j) s += h.v()[static_cast<Eigen::Index>(j)] * bank->row(j).target(i);
        target_.push_back(s);
    }
}

UnitRealization UnitEstimator::sample(Rng& rng) const {
    UnitRealization u;
    const double g[1] = {gv_.value};
    u.gv = rmf_make(g, gv_.C, kGvOrder, rng);
    u.a.reserve(n_a_);
    for (std::size_t t = 0; t < n_a_; ++t) u.a.push_back(a_->sample_part(rng));
    u.b.reserve(n_b_);
    for (std::size_t t = 0; t < n_b_; ++t) u.b.push_back(b_->sample_part(rng));
    return u;
}

double UnitEstimator::eval(const UnitRealization& u, std::size_t index) const {
    double out = u.gv.value(0);
    if (!u.a.empty()) {
        double s = 0.0;
        for (const auto& f : u.a) s += a_->eval_part(f, index);
        out += s / static_cast<double>(u.a.size());
    }
    if (!u.b.empty()) {
        double s = 0.0;
        for (const auto& f : u.b) s += b_->eval_part(f, index);
        out += s / static_cast<double>(u.b.size());
    }
    return out;
}

UnitRealization UnitEstimator::decode(const FramedMessage& msg) const {
    MessageReader r(msg);
    auto u = read_unit(r, protocol(), n_a_, n_b_);
    r.expect_end();
    return u;
}

double UnitEstimator::variance_bound() const {
    double v = 0.25;
    if (n_a_ > 0) v += a_->f_variance_bound() / static_cast<double>(n_a_);
    if (n_b_ > 0) v += b_->f_variance_bound() / static_cast<double>(n_b_);
    return v;
}

double UnitEstimator::expected_bits() const {
    return 4.0 + static_cast<double>(gv_bits(gv_)) + 8.0 +
           static_cast<double>(n_a_) * (4.0 + a_->expected_part_bits()) +
           static_cast<double>(n_b_) * (4.0 + b_->expected_part_bits());
}

}  // namespace adl
