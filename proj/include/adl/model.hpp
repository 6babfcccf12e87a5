#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

namespace adl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// ⌈a⌉₊: the smallest non-negative integer n with a ≤ n.
inline double ceil_plus(double a) { return a <= 0.0 ? 0.0 : std::ceil(a); }

// ⌈log₂ n⌉ for n ≥ 1 (0 for n = 1).
unsigned ceil_log2(std::uint64_t n);

// Class parameters of the two-layer hypothesis class: width T, input
// dimension d, activation Lipschitz constant L, input norm bound B, distance
// budgets R (Frobenius, hidden layer) and r (output layer), and the known
// initialization (W0, v0).
class HypoParams {
public:
    HypoParams(double L, double B, double R, double r, Matrix W0, Vector v0);
    // Zero initialization of the given shape.
    static HypoParams zero_init(std::size_t T, std::size_t d, double L, double B, double R,
                                double r);

    std::size_t T() const { return static_cast<std::size_t>(W0_.rows()); }
    std::size_t d() const { return static_cast<std::size_t>(W0_.cols()); }
    double L() const { return L_; }
    double B() const { return B_; }
    double R() const { return R_; }
    double r() const { return r_; }
    const Matrix& W0() const { return W0_; }
    const Vector& v0() const { return v0_; }

private:
    double L_, B_, R_, r_;
    Matrix W0_;
    Vector v0_;
};

// A network x ↦ ⟨v, σ(Wx)⟩ with W of shape T×d.
class Hypothesis {
public:
    Hypothesis(Matrix W, Vector v);

    std::size_t T() const { return static_cast<std::size_t>(W_.rows()); }
    std::size_t d() const { return static_cast<std::size_t>(W_.cols()); }
    const Matrix& W() const { return W_; }
    const Vector& v() const { return v_; }

private:
    Matrix W_;
    Vector v_;
};

// m points of R^d, each of norm at most B. Rows of points() are the x_i.
class SampleSet {
public:
    SampleSet(Matrix points, double B);

    std::size_t m() const { return static_cast<std::size_t>(points_.rows()); }
    std::size_t d() const { return static_cast<std::size_t>(points_.cols()); }
    double B() const { return B_; }
    const Matrix& points() const { return points_; }
    std::span<const double> point(std::size_t i) const {
        return {points_.data() + i * d(), d()};
    }

private:
    Matrix points_;
    double B_;
};

// Element-wise scalar activation with a declared Lipschitz constant.
class Activation {
public:
    Activation(std::string name, std::function<double(double)> fn, double lipschitz,
               bool affine = false);

    static Activation identity();
    static Activation scaled_identity(double c);
    static Activation relu();
    static Activation tanh();
    // Built-in activation by name: identity, relu, tanh, or scaled:<c>.
    static Activation by_name(const std::string& name);

    double operator()(double a) const { return fn_(a); }
    double lipschitz() const { return L_; }
    double at_zero() const { return sigma0_; }
    // σ is affine, so E[σ(X)] = σ(E[X]) for every integrable X.
    bool affine() const { return affine_; }
    const std::string& name() const { return name_; }

private:
    std::string name_;
    std::function<double(double)> fn_;
    double L_;
    double sigma0_;
    bool affine_;
};

// Ascending-order dot product of two equal-length spans.
double dot(std::span<const double> a, std::span<const double> b);

inline std::span<const double> as_span(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<const double> row_span(const Matrix& M, std::size_t j) {
    return {M.data() + j * static_cast<std::size_t>(M.cols()), static_cast<std::size_t>(M.cols())};
}

// Σ_j v_j σ(⟨w_j, x⟩), accumulated in ascending j.
double eval_network(const Hypothesis& h, std::span<const double> x, const Activation& sigma);
inline double eval_network(const Hypothesis& h, const Vector& x, const Activation& sigma) {
    return eval_network(h, as_span(x), sigma);
}

struct ValidityReport {
    double w_distance = 0.0;  // ‖W − W0‖_F
    double v_distance = 0.0;  // ‖v − v0‖
    bool w_within = true;
    bool v_within = true;
    bool dimensions_ok = true;
    bool valid() const { return dimensions_ok && w_within && v_within; }
};

ValidityReport validate(const Hypothesis& h, const HypoParams& p);

// Appends a constant-1 coordinate so that a bias can be carried by the last
// column of W.
Vector with_bias(const Vector& x);

// Declared (ε², n) pair of an ε-estimator with expected length n bits.
struct EstimatorContract {
    double variance_bound = 0.0;
    double expected_bits_bound = 0.0;
};

// Independent sum: variances and lengths add.
EstimatorContract compose_sum(const EstimatorContract& a, const EstimatorContract& b);

}  // namespace adl
