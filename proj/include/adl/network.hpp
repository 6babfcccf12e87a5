#pragma once

#include "adl/model.hpp"
#include "adl/neuron.hpp"
#include "adl/rmf.hpp"
#include "adl/sketch.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace adl {

// p_j = v_j²/(2‖v‖²) + 1/(2T); uniform when v = 0.
std::vector<double> neuron_probs(std::span<const double> v);

// Two-point law of the coefficient ⌊v_j/p_j⌋ + b̂_j.
struct CoefficientLaw {
    double ratio = 0.0;  // v_j / p_j
    std::int64_t floor_value = 0;
    double bump_probability = 0.0;
};
CoefficientLaw coefficient_law(double v_j, double p_j);

// Per-neuron averaging count ⌈max(1, 5B⁻²⌈log₂(dm)⌉)⌉.
std::size_t neuron_average_count(double B, std::size_t d, std::size_t m);

// ĝ_v = RMF of order 4 for the constant σ(0)·Σ_j v_j with C = |σ(0)|·Σ_j|v_j|.
struct GvLaw {
    double value = 0.0;
    double C = 0.0;
};
GvLaw gv_law(std::span<const double> v, double sigma0);
inline constexpr double kGvOrder = 4.0;

// One draw of f̂_{v,W}: the picked neuron, its coefficient, and the averaged
// neuron realizations for f_{w_j} = h_{w_j} − σ(0).
struct NetworkPart {
    std::uint32_t index = 0;
    std::int64_t coefficient = 0;
    std::vector<NeuronRealization> neurons;
    friend bool operator==(const NetworkPart&, const NetworkPart&) = default;
};

struct NetworkRealization {
    NetworkPart f;
    RMFRealization gv;
    friend bool operator==(const NetworkRealization&, const NetworkRealization&) = default;
};

struct NetworkProtocol {
    NeuronProtocol neuron;
    std::size_t T = 1;
    std::size_t n_avg = 1;
    unsigned index_bits() const { return ceil_log2(T); }
};

// Part fields (no frame): index, coefficient, open [n_avg neuron frames] close.
void write_part_fields(MessageWriter& out, const NetworkPart& f, const NetworkProtocol& proto);
NetworkPart read_part_fields(MessageReader& in, const NetworkProtocol& proto);
std::size_t part_field_bits(const NetworkPart& f, const NetworkProtocol& proto);

// Layout: open, part fields, ĝ RMF block, close.
void write_network(MessageWriter& out, const NetworkRealization& r, const NetworkProtocol& proto);
NetworkRealization read_network(MessageReader& in, const NetworkProtocol& proto);
FramedMessage network_encode(const NetworkRealization& r, const NetworkProtocol& proto);
std::size_t network_encoded_bits(const NetworkRealization& r, const NetworkProtocol& proto);

// Decoder-side context: protocol, W0, σ and the sample set.
class NetworkDecoder {
public:
    NetworkDecoder(NetworkProtocol proto, const Matrix& W0, const Activation& sigma,
                   std::shared_ptr<const Matrix> points);

    const NetworkProtocol& protocol() const { return proto_; }
    NetworkRealization decode(const FramedMessage& msg) const;
    double eval_part(const NetworkPart& f, std::size_t index) const;
    double eval(const NetworkRealization& r, std::size_t index) const;

private:
    NetworkProtocol proto_;
    double sigma0_;
    std::vector<NeuronDecoder> rows_;
};

// Neuron compressors for every row of W, built once and shared by identical
// rows.
class NeuronBank {
public:
    NeuronBank(const Matrix& W, const Matrix& W0, std::shared_ptr<const Matrix> points, double B,
               const Activation& sigma, const SketchConfig& cfg, std::uint64_t seed,
               const H1Options& opts);

    const NeuronCompressor& row(std::size_t j) const { return *rows_[j]; }
    // Exact expected physical bits of one neuron realization of row j.
    double row_expected_bits(std::size_t j) const { return bits_[j]; }
    std::size_t distinct() const { return distinct_; }
    std::size_t size() const { return rows_.size(); }
    const std::shared_ptr<const Matrix>& points() const { return points_; }
    const SketchConfig& config() const { return cfg_; }
    const Matrix& W0() const { return W0_; }
    // ‖W − W0‖²_F.
    double distance_sq() const { return distance_sq_; }

private:
    std::vector<std::shared_ptr<const NeuronCompressor>> rows_;
    std::vector<double> bits_;
    std::size_t distinct_ = 0;
    std::shared_ptr<const Matrix> points_;
    SketchConfig cfg_;
    Matrix W0_;
    double distance_sq_ = 0.0;
};

struct NetworkOptions {
    H1Options h1;
    // Seed of the streams used by Monte Carlo H1 references.
    std::uint64_t h1_seed = 0;
    unsigned mantissa_bits = 4;
};

// Sketch config used for networks: scale exponents relative to the per-row
// share R/√T of the distance budget (or 1 if R = 0).
SketchConfig network_sketch_config(const HypoParams& p, unsigned mantissa_bits = 4);

// Width-T estimator ĥ_{v,W} = coeff·f̂_{w_j} + ĝ_v on the sample set.
class NetworkCompressor {
public:
    NetworkCompressor(const Hypothesis& h, const HypoParams& p, const SampleSet& A,
                      const Activation& sigma, const NetworkOptions& opts = {});
    // Reuses an existing bank; v may differ from the bank's hypothesis.
    NetworkCompressor(std::shared_ptr<const NeuronBank> bank, const Vector& v, const HypoParams& p,
                      const Activation& sigma);

    NetworkPart sample_part(Rng& rng) const;
    NetworkRealization sample(Rng& rng) const;
    double eval_part(const NetworkPart& f, std::size_t index) const;
    double eval(const NetworkRealization& r, std::size_t index) const;

    const NetworkProtocol& protocol() const { return proto_; }
    const NetworkDecoder& decoder() const { return decoder_; }
    const std::vector<double>& probabilities() const { return p_; }
    const NeuronBank& bank() const { return *bank_; }
    const GvLaw& gv() const { return gv_; }
    // ⟨v, σ(W x_i)⟩.
    double target(std::size_t index) const { return target_[index]; }
    // 10L²B²(‖v‖² + 1/8)(‖W − W0‖²_F + ‖W0‖²_F).
    double f_variance_bound() const { return f_bound_; }
    // 1/2 + f_variance_bound().
    double variance_bound() const { return 0.5 + f_bound_; }
    // Exact expected physical bits of the part fields and of a full realization.
    double expected_part_bits() const;
    double expected_bits() const;

private:
    std::shared_ptr<const NeuronBank> bank_;
    Vector v_;
    double sigma0_;
    NetworkProtocol proto_;
    NetworkDecoder decoder_;
    std::vector<double> p_;
    std::vector<double> cumulative_;
    std::vector<CoefficientLaw> coef_;
    GvLaw gv_;
    std::vector<double> target_;
    double f_bound_ = 0.0;
};

// Averaging counts of the unit estimator for one family with output norm ρ:
// ⌈(8/3)·10L²B²(ρ² + 1/8)(R² + ‖W0‖²_F)⌉, or 0 when ρ = 0.
std::size_t unit_family_count(double L, double B, double R, double W0_fro, double rho);
// ⌈15L²B²ρ²(R² + ‖W0‖²_F)⌉ for comparison.
std::size_t unit_family_count_reference(double L, double B, double R, double W0_fro, double rho);

struct UnitRealization {
    RMFRealization gv;
    std::vector<NetworkPart> a;  // family for v − v0
    std::vector<NetworkPart> b;  // family for v0
    friend bool operator==(const UnitRealization&, const UnitRealization&) = default;
};

// Layout: open, ĝ RMF, open [a parts] close, open [b parts] close, close;
// every part is framed.
void write_unit(MessageWriter& out, const UnitRealization& u, const NetworkProtocol& proto);
UnitRealization read_unit(MessageReader& in, const NetworkProtocol& proto, std::size_t n_a,
                          std::size_t n_b);
FramedMessage unit_encode(const UnitRealization& u, const NetworkProtocol& proto);
std::size_t unit_encoded_bits(const UnitRealization& u, const NetworkProtocol& proto);

// 1-estimator: ĝ_v plus averages of n_a draws of f̂_{v−v0,W} and n_b draws
// of f̂_{v0,W}. Var ≤ 1/4 + 3/8 + 3/8.
class UnitEstimator {
public:
    UnitEstimator(const Hypothesis& h, const HypoParams& p, const SampleSet& A,
                  const Activation& sigma, const NetworkOptions& opts = {});

    UnitRealization sample(Rng& rng) const;
    double eval(const UnitRealization& u, std::size_t index) const;
    UnitRealization decode(const FramedMessage& msg) const;

    std::size_t n_a() const { return n_a_; }
    std::size_t n_b() const { return n_b_; }
    std::size_t reference_count() const { return reference_count_; }
    double target(std::size_t index) const { return target_[index]; }
    double variance_bound() const;
    double expected_bits() const;
    const NetworkProtocol& protocol() const { return a_->protocol(); }

private:
    std::unique_ptr<NetworkCompressor> a_;
    std::unique_ptr<NetworkCompressor> b_;
    GvLaw gv_;
    std::size_t n_a_ = 0, n_b_ = 0, reference_count_ = 0;
    std::vector<double> target_;
};

}  // namespace adl
