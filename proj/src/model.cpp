#include "adl/model.hpp"

#include "adl/error.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace adl {

unsigned ceil_log2(std::uint64_t n) {
    if (n <= 1) return 0;
    return static_cast<unsigned>(std::bit_width(n - 1));
}

namespace {

bool all_finite(const double* p, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i)
        if (!std::isfinite(p[i])) return false;
    return true;
}

}  // namespace

HypoParams::HypoParams(double L, double B, double R, double r, Matrix W0, Vector v0)
    : L_(L), B_(B), R_(R), r_(r), W0_(std::move(W0)), v0_(std::move(v0)) {
    if (W0_.rows() < 1 || W0_.cols() < 1) throw DomainError("HypoParams: T and d must be >= 1");
    if (v0_.size() != W0_.rows())
        throw DimensionError("HypoParams: v0 has length " + std::to_string(v0_.size()) +
                             " but W0 has " + std::to_string(W0_.rows()) + " rows");
    if (!(L_ > 0.0) || !std::isfinite(L_)) throw DomainError("HypoParams: L must be > 0");
    if (!(B_ > 0.0) || !std::isfinite(B_)) throw DomainError("HypoParams: B must be > 0");
    if (!(R_ >= 0.0) || !std::isfinite(R_)) throw DomainError("HypoParams: R must be >= 0");
    if (!(r_ >= 0.0) || !std::isfinite(r_)) throw DomainError("HypoParams: r must be >= 0");
    if (!all_finite(W0_.data(), W0_.size()) || !all_finite(v0_.data(), v0_.size()))
        throw DomainError("HypoParams: initialization must be finite");
}

HypoParams HypoParams::zero_init(std::size_t T, std::size_t d, double L, double B, double R,
                                 double r) {
    return HypoParams(L, B, R, r, Matrix::Zero(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(d)),
                      Vector::Zero(static_cast<Eigen::Index>(T)));
}

Hypothesis::Hypothesis(Matrix W, Vector v) : W_(std::move(W)), v_(std::move(v)) {
    if (v_.size() != W_.rows())
        throw DimensionError("Hypothesis: v has length " + std::to_string(v_.size()) +
                             " but W has " + std::to_string(W_.rows()) + " rows");
    if (W_.rows() < 1 || W_.cols() < 1) throw DomainError("Hypothesis: empty network");
}

SampleSet::SampleSet(Matrix points, double B) : points_(std::move(points)), B_(B) {
    if (points_.rows() < 1) throw DomainError("SampleSet: m must be >= 1");
    if (!(B_ > 0.0)) throw DomainError("SampleSet: B must be > 0");
    for (Eigen::Index i = 0; i < points_.rows(); ++i) {
        double n = points_.row(i).norm();
        if (!std::isfinite(n) || n > B_)
            throw DomainError("SampleSet: point " + std::to_string(i) + " has norm " +
                              std::to_string(n) + " > B = " + std::to_string(B_));
    }
}

Activation::Activation(std::string name, std::function<double(double)> fn, double lipschitz,
                       bool affine)
    : name_(std::move(name)), fn_(std::move(fn)), L_(lipschitz), affine_(affine) {
    if (!fn_) throw DomainError("Activation: empty function");
    if (!(L_ > 0.0) || !std::isfinite(L_))
        throw DomainError("Activation: Lipschitz constant must be declared and > 0");
    sigma0_ = fn_(0.0);
}

Activation Activation::identity() {
    return Activation("identity", [](double a) { return a; }, 1.0, true);
}

Activation Activation::scaled_identity(double c) {
    if (c == 0.0 || !std::isfinite(c)) throw DomainError("scaled identity needs finite c != 0");
    return Activation("scaled:" + std::to_string(c), [c](double a) { return c * a; },
                      std::abs(c), true);
}

Activation Activation::relu() {
    return Activation("relu", [](double a) { return a > 0.0 ? a : 0.0; }, 1.0);
}

Activation Activation::tanh() {
    return Activation("tanh", [](double a) { return std::tanh(a); }, 1.0);
}

Activation Activation::by_name(const std::string& name) {
    if (name == "identity") return identity();
    if (name == "relu") return relu();
    if (name == "tanh") return tanh();
    if (name.rfind("scaled:", 0) == 0) return scaled_identity(std::stod(name.substr(7)));
    throw DomainError("unknown activation '" + name + "'");
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DimensionError("dot: lengths " + std::to_string(a.size()) + " and " +
                             std::to_string(b.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double eval_network(const Hypothesis& h, std::span<const double> x, const Activation& sigma) {
    if (x.size() != h.d())
        throw DimensionError("eval_network: x has length " + std::to_string(x.size()) +
                             ", expected d = " + std::to_string(h.d()));
    double out = 0.0;
    for (std::size_t j = 0; j < h.T(); ++j) out += h.v()[static_cast<Eigen::Index>(j)] * sigma(dot(row_span(h.W(), j), x));
    return out;
}

ValidityReport validate(const Hypothesis& h, const HypoParams& p) {
    ValidityReport rep;
    if (h.T() != p.T() || h.d() != p.d()) {
        rep.dimensions_ok = false;
        rep.w_within = rep.v_within = false;
        return rep;
    }
    rep.w_distance = (h.W() - p.W0()).norm();
    rep.v_distance = (h.v() - p.v0()).norm();
    rep.w_within = rep.w_distance <= p.R();
    rep.v_within = rep.v_distance <= p.r();
    return rep;
}

Vector with_bias(const Vector& x) {
    Vector out(x.size() + 1);
    out.head(x.size()) = x;
    out[x.size()] = 1.0;
    return out;
}

EstimatorContract compose_sum(const EstimatorContract& a, const EstimatorContract& b) {
    return {a.variance_bound + b.variance_bound, a.expected_bits_bound + b.expected_bits_bound};
}

}  // namespace adl
