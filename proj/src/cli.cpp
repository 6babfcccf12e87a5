#include "adl/cli.hpp"

#include "adl/bounds.hpp"
#include "adl/concentration.hpp"
#include "adl/error.hpp"
#include "adl/harness.hpp"
#include "adl/json_io.hpp"
#include "adl/network.hpp"
#include "adl/neuron.hpp"
#include "adl/parallel.hpp"
#include "adl/rng.hpp"
#include "adl/shatter.hpp"
#include "adl/sketch.hpp"
#include "adl/squeezer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace adl::cli {

namespace {

constexpr const char* kVersion = "0.3.0";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Resolved parameters: config file first, flags override. Every value read
// is echoed into the report so a run documents its own configuration.
class Params {
public:
    std::map<std::string, std::string> values;
    Json resolved = Json::object();

    bool has(const std::string& key) const { return values.count(key) > 0; }

    std::string text(const std::string& key, const std::string& def) {
        auto it = values.find(key);
        std::string v = it == values.end() ? def : it->second;
        resolved[key] = v;
        return v;
    }
    double real(const std::string& key, double def) {
        auto it = values.find(key);
        double v = def;
        if (it != values.end()) {
            const std::string& s = it->second;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
                throw UsageError("--" + key + ": not a number: " + s);
        }
        resolved[key] = v;
        return v;
    }
    std::uint64_t u64(const std::string& key, std::uint64_t def) {
        auto it = values.find(key);
        std::uint64_t v = def;
        if (it != values.end()) {
            const std::string& s = it->second;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size()) {
                double dv = 0.0;
                auto [p2, ec2] = std::from_chars(s.data(), s.data() + s.size(), dv);
                if (ec2 != std::errc() || p2 != s.data() + s.size() || !(dv >= 0.0) || dv != std::floor(dv) ||
                    dv > 1.8e19)
                    throw UsageError("--" + key + ": not a non-negative integer: " + s);
                v = static_cast<std::uint64_t>(dv);
            }
        }
        resolved[key] = v;
        return v;
    }
    std::size_t size(const std::string& key, std::size_t def) { return static_cast<std::size_t>(u64(key, def)); }
};

struct Row {
    std::string tag;
    std::string metric;
    double value;
    double bound;
    bool pass;
};

struct SuiteResult {
    std::string name;
    Json report = Json::object();
    std::vector<Row> rows;
    std::vector<std::string> failing;
    bool pass = true;

    void add(const std::string& tag, const std::string& metric, double value, double bound, bool ok) {
        rows.push_back({tag, metric, value, bound, ok});
        if (!ok) {
            pass = false;
            if (std::find(failing.begin(), failing.end(), tag) == failing.end()) failing.push_back(tag);
        }
    }
};

// Setup draws and Monte Carlo runs use separate stream families.
std::uint64_t mc_seed(std::uint64_t seed, std::uint64_t id) { return seed ^ (0x9E3779B97F4A7C15ull * (id + 1)); }
Rng setup_stream(std::uint64_t seed, std::uint64_t id) { return make_stream(seed, (std::uint64_t{1} << 48) + id); }

Vector random_direction(std::size_t d, double norm, Rng& rng) {
    Vector v(static_cast<Eigen::Index>(d));
    do {
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gaussian(rng);
    } while (v.norm() == 0.0);
    return v * (norm / v.norm());
}

// m points of norm just inside B.
Matrix random_points(std::size_t m, std::size_t d, double B, Rng& rng) {
    Matrix P(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < m; ++i)
        P.row(static_cast<Eigen::Index>(i)) = random_direction(d, B * (1.0 - 1e-12), rng).transpose();
    return P;
}

void add_mc_rows(SuiteResult& s, const std::string& tag, const MCReport& r) {
    s.add(tag, "abs_z", std::abs(r.z), 4.0, r.unbiased && r.finite);
    s.add(tag, "variance", r.variance, r.var_bound * 1.05, r.variance_ok && r.finite);
    if (r.len_bound) s.add(tag, "mean_bits", r.mean_bits, *r.len_bound, r.length_ok);
}

void add_mc_rows(SuiteResult& s, const std::string& tag, const MCVectorReport& r) {
    for (std::size_t i = 0; i < r.outputs.size(); ++i) {
        const MCReport& o = r.outputs[i];
        std::string t = tag + "[" + std::to_string(i) + "]";
        s.add(t, "abs_z", std::abs(o.z), 4.0, o.unbiased && o.finite);
        s.add(t, "variance", o.variance, o.var_bound * 1.05, o.variance_ok && o.finite);
    }
    if (r.len_bound) s.add(tag, "mean_bits", r.mean_bits, *r.len_bound, r.length_ok);
}

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

SuiteResult sketch_suite(Params& p, std::uint64_t seed) {
    SuiteResult s;
    s.name = "sketch-verify";
    const std::size_t d = p.size("d", 100);
    const double B = p.real("B", 1.0);
    const double R = p.real("R", 1.0);
    const std::size_t trials = p.size("trials", 100000);
    if (d < 1 || !(B > 0.0) || !(R > 0.0)) throw UsageError("sketch-verify: need d >= 1, B > 0, R > 0");

    Rng setup = setup_stream(seed, 1);
    Vector w0 = random_direction(d, 1.0, setup);
    Vector u = random_direction(d, R, setup);
    Vector w = w0 + u;
    Vector x = random_direction(d, B, setup);
    SketchConfig cfg = SketchConfig::make(d, B);
    Sketcher sk(as_span(u), cfg);
    const double offset = dot(as_span(w0), as_span(x));
    const double n_B = sk.expected_bits();

    MCOptions opts;
    opts.len_overhead = 0.05;
    Sampler sampler = [&](Rng& rng) {
        SketchSample smp = sk.sample(rng);
        return MCSample{smp.eval(as_span(x), cfg) + offset, static_cast<double>(sketch_encoded_bits(smp, cfg))};
    };
    MCReport mc = mc_contract(sampler, dot(as_span(w), as_span(x)), R * R, n_B, trials, mc_seed(seed, 1), opts);
    add_mc_rows(s, "sketch", mc);

    // Exact expected length against d at fixed B.
    Json sweep = Json::array();
    std::vector<double> xs, ys;
    for (std::size_t dd = 16; dd <= 4096; dd *= 2) {
        Vector ud = random_direction(dd, 1.0, setup);
        Sketcher skd(as_span(ud), SketchConfig::make(dd, B));
        double bits = skd.expected_bits();
        xs.push_back(B * B * std::log2(static_cast<double>(dd)));
        ys.push_back(bits);
        sweep.push_back(Json{{"d", dd}, {"expected_bits", bits}});
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += xs[i] * ys[i];
        sxx += xs[i] * xs[i];
    }
    const double c = sxy / sxx;
    double max_inc = 0.0;
    for (std::size_t i = 1; i < ys.size(); ++i) max_inc = std::max(max_inc, ys[i] - ys[i - 1]);
    s.add("sketch_length_fit", "c", c, 0.0, c > 0.0);
    s.add("sketch_length_fit", "max_doubling_increment", max_inc, c * B * B + 0.5, max_inc <= c * B * B + 0.5);

    s.report = Json{{"n_B", n_B}, {"mc", to_json(mc)}, {"length_sweep", std::move(sweep)}, {"fitted_c", c}};
    return s;
}

SuiteResult neuron_suite(Params& p, std::uint64_t seed) {
    SuiteResult s;
    s.name = "neuron-verify";
    const std::size_t d = p.size("d", 2);
    const std::size_t m = p.size("m", 2);
    const double B = p.real("B", 1.0);
    const double R = p.real("R", 1.0);
    const Activation sigma = Activation::by_name(p.text("activation", "relu"));
    const std::size_t trials = p.size("trials", 100000);
    if (d < 1 || m < 1 || !(B > 0.0) || !(R > 0.0)) throw UsageError("neuron-verify: need d, m >= 1, B > 0, R > 0");

    Rng setup = setup_stream(seed, 2);
    Matrix points = random_points(m, d, B, setup);
    Vector w0 = random_direction(d, 1.0, setup);
    Vector w = w0 + random_direction(d, R, setup);
    SketchConfig cfg = SketchConfig::make(d, B);
    NeuronCompressor nc(as_span(w), as_span(w0), SampleSet(points, B), sigma, cfg, setup);
    const unsigned k = nc.k();
    const double L = sigma.lipschitz();
    const double n_B = nc.sketcher().expected_bits();

    // Squeezer against E[σ(⟨w̃^k, x⟩)].
    Rng ref_rng = setup_stream(seed, 3);
    H1Reference ref = h1_reference(nc.sketcher(), as_span(w0), points, k, sigma, H1Options{}, ref_rng, 1e-3);
    MCOptions sq_opts;
    sq_opts.bias_allowance = 4.0 * max_of(ref.standard_error);
    VectorSampler sq = [&](Rng& rng) {
        SqueezerRealization r = squeezer_sample(nc.sketcher(), k, rng);
        MCVectorSample out;
        for (std::size_t i = 0; i < m; ++i) out.values.push_back(r.eval(row_span(points, i), as_span(w0), sigma, cfg));
        out.bits = static_cast<double>(squeezer_encoded_bits(r, cfg));
        return out;
    };
    MCVectorReport sq_rep = mc_contract_vector(sq, ref.expectation, 3.0 * L * L * R * R * k,
                                               squeezer_length_bound(k, n_B), trials, mc_seed(seed, 2), sq_opts);
    add_mc_rows(s, "squeezer", sq_rep);

    // Combined neuron against σ(⟨w, x_i⟩).
    std::vector<double> truth(m);
    for (std::size_t i = 0; i < m; ++i) truth[i] = nc.target(i);
    MCOptions n_opts;
    n_opts.bias_allowance = 4.0 * max_of(nc.h1().reference.standard_error);
    n_opts.len_overhead = 0.05;
    const NeuronProtocol& proto = nc.protocol();
    VectorSampler ns = [&](Rng& rng) {
        NeuronRealization r = nc.sample(rng);
        MCVectorSample out;
        for (std::size_t i = 0; i < m; ++i) out.values.push_back(nc.eval(r, i));
        out.bits = static_cast<double>(neuron_encoded_bits(r, proto));
        return out;
    };
    MCVectorReport n_rep =
        mc_contract_vector(ns, truth, nc.variance_bound(), nc.expected_bits(), trials, mc_seed(seed, 3), n_opts);
    add_mc_rows(s, "neuron", n_rep);

    const auto& h1 = nc.h1();
    s.report = Json{{"k", k},
                    {"n_B", n_B},
                    {"squeezer_reference_exact", ref.exact},
                    {"squeezer", to_json(sq_rep)},
                    {"neuron", to_json(n_rep)},
                    {"h1",
                     Json{{"alpha", h1.alpha},
                          {"C", h1.C},
                          {"clamped", h1.clamped},
                          {"zero", h1.zero},
                          {"reference_exact", h1.reference.exact},
                          {"reference_trials", h1.reference.trials}}},
                    {"expected_bits", nc.expected_bits()}};
    return s;
}

SuiteResult network_suite(Params& p, std::uint64_t seed) {
    SuiteResult s;
    s.name = "network-verify";
    const std::size_t T = p.size("T", 16);
    const std::size_t d = p.size("d", 2);
    const std::size_t m = p.size("m", 2);
    const double B = p.real("B", 1.0);
    const double R = p.real("R", 1.0);
    const double r = p.real("r", 1.0);
    const double W0_norm = p.real("W0-norm", 1.0);
    const double v0_norm = p.real("v0-norm", 1.0);
    const Activation sigma = Activation::by_name(p.text("activation", "relu"));
    const std::size_t trials = p.size("trials", 100000);
    if (T < 1 || d < 1 || m < 1 || !(B > 0.0) || R < 0.0 || r < 0.0 || W0_norm < 0.0 || v0_norm < 0.0)
        throw UsageError("network-verify: invalid scenario parameters");

    Rng setup = setup_stream(seed, 4);
    Matrix points = random_points(m, d, B, setup);
    auto random_matrix = [&](double fro) {
        Vector flat = random_direction(T * d, 1.0, setup) * fro;
        return Matrix(Eigen::Map<Matrix>(flat.data(), static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(d)));
    };
    Matrix W0 = random_matrix(W0_norm);
    Vector v0 = random_direction(T, v0_norm, setup);
    Matrix W = W0 + random_matrix(R * (1.0 - 1e-12));
    Vector v = v0 + random_direction(T, r * (1.0 - 1e-12), setup);
    HypoParams params(sigma.lipschitz(), B, R, r, W0, v0);
    Hypothesis h(W, v);
    SampleSet A(points, B);
    NetworkOptions opts;
    opts.h1_seed = mc_seed(seed, 4);
    NetworkCompressor nc(h, params, A, sigma, opts);

    double psum = 0.0;
    for (double q : nc.probabilities()) psum += q;
    s.add("network_probabilities", "abs_sum_minus_one", std::abs(psum - 1.0), 1e-12, std::abs(psum - 1.0) <= 1e-12);

    double bias = 0.0;
    for (std::size_t j = 0; j < T; ++j)
        bias += std::abs(v[static_cast<Eigen::Index>(j)]) * 4.0 * max_of(nc.bank().row(j).h1().reference.standard_error);
    std::vector<double> truth(m);
    for (std::size_t i = 0; i < m; ++i) truth[i] = nc.target(i);
    MCOptions mopts;
    mopts.bias_allowance = bias;
    mopts.len_overhead = 0.05;
    const NetworkProtocol& proto = nc.protocol();
    VectorSampler ns = [&](Rng& rng) {
        NetworkRealization real = nc.sample(rng);
        MCVectorSample out;
        for (std::size_t i = 0; i < m; ++i) out.values.push_back(nc.eval(real, i));
        out.bits = static_cast<double>(network_encoded_bits(real, proto));
        return out;
    };
    MCVectorReport net =
        mc_contract_vector(ns, truth, nc.variance_bound(), nc.expected_bits(), trials, mc_seed(seed, 5), mopts);
    add_mc_rows(s, "network", net);

    UnitEstimator ue(h, params, A, sigma, opts);
    std::vector<double> utruth(m);
    for (std::size_t i = 0; i < m; ++i) utruth[i] = ue.target(i);
    MCOptions uopts;
    uopts.bias_allowance = bias;
    uopts.len_overhead = 0.05;
    const std::size_t unit_trials = std::max<std::size_t>(1000, trials / 100);
    VectorSampler us = [&](Rng& rng) {
        UnitRealization real = ue.sample(rng);
        MCVectorSample out;
        for (std::size_t i = 0; i < m; ++i) out.values.push_back(ue.eval(real, i));
        out.bits = static_cast<double>(unit_encoded_bits(real, ue.protocol()));
        return out;
    };
    MCVectorReport unit = mc_contract_vector(us, utruth, 1.0, ue.expected_bits(), unit_trials, mc_seed(seed, 6), uopts);
    add_mc_rows(s, "unit", unit);
    s.add("unit", "variance_bound", ue.variance_bound(), 1.0, ue.variance_bound() <= 1.0);

    s.report = Json{{"T", T},
                    {"distinct_rows", nc.bank().distinct()},
                    {"n_avg", proto.n_avg},
                    {"probability_sum", psum},
                    {"expected_bits", nc.expected_bits()},
                    {"network", to_json(net)},
                    {"unit",
                     Json{{"n_a", ue.n_a()},
                          {"n_b", ue.n_b()},
                          {"reference_count", ue.reference_count()},
                          {"variance_bound", ue.variance_bound()},
                          {"expected_bits", ue.expected_bits()},
                          {"mc", to_json(unit)}}}};
    return s;
}

SuiteResult bounds_suite(Params& p, const std::string& out_dir, bool write_sweep) {
    SuiteResult s;
    s.name = "bounds";
    const std::size_t T = p.size("T", 1024);
    const std::size_t d = p.size("d", 50);
    const std::size_t m = p.size("m", 1000);
    const double L = p.real("L", 1.0);
    const double B = p.real("B", 1.0);
    const double R = p.real("R", 2.0);
    const double r = p.real("r", 1.0);
    const double delta = p.real("delta", 0.01);
    const double L_loss = p.real("L-loss", 1.0);
    const double B_loss = p.real("B-loss", 1.0);
    const double sigma0 = p.real("sigma0", 0.0);
    if (T < 1 || d < 1 || m < 1) throw UsageError("bounds: T, d, m must be >= 1");

    BoundReport rep = bound_report(HypoParams::zero_init(T, d, L, B, R, r), m, delta, L_loss, B_loss, sigma0);
    s.add("adl_bound", "bits", rep.adl.bits, 0.0, std::isfinite(rep.adl.bits) && rep.adl.bits > 0.0);
    s.add("gen_bound", "gen_gap", rep.gen_gap, 0.0, std::isfinite(rep.gen_gap));
    s.report = to_json(rep);

    if (write_sweep) {
        std::string csv = "T,d,m,adl_bits,gen_gap\n";
        auto line = [&](std::size_t t, std::size_t mm) {
            BoundReport b = bound_report(HypoParams::zero_init(t, d, L, B, R, r), mm, delta, L_loss, B_loss, sigma0);
            char buf[160];
            std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.17g,%.17g\n", t, d, mm, b.adl.bits, b.gen_gap);
            csv += buf;
        };
        for (std::size_t t = 1; t < T; t *= 2) line(t, m);
        line(T, m);
        for (std::size_t mm = 1; mm < m; mm *= 2)
            if (mm != m) line(T, mm);
        write_file_atomic((std::filesystem::path(out_dir) / "sweep.csv").string(), csv);
    }
    return s;
}

SuiteResult shatter_suite(Params& p, std::uint64_t seed, const std::string& out_dir) {
    SuiteResult s;
    s.name = "shatter";
    const std::size_t pairs = p.size("pairs", 10000);
    ShatterInstance inst;
    bool from_bundle = p.has("verify");
    if (from_bundle) {
        std::string path = p.text("verify", "");
        inst = shatter_from_bundle(Json::parse(read_file(path)));
    } else {
        const std::size_t d = p.size("d", 20);
        const std::size_t h = p.size("h", 20);
        const std::size_t retries = p.size("retries", 1000);
        if (d < 1 || h < d || retries < 1) throw UsageError("shatter: need h >= d >= 1 and retries >= 1");
        try {
            inst = build_instance(d, h, seed, retries);
        } catch (const ShatterSearchError& e) {
            s.add("separation", "min_pair_dist_sq", e.best().min_pair_dist_sq, kSeparationSq, false);
            s.report = Json{{"error", e.what()}, {"best", to_json(e.best())}};
            return s;
        }
        write_file_atomic((std::filesystem::path(out_dir) / "bundle.json").string(), dump_json(shatter_bundle(inst)));
    }
    const auto& c = inst.candidate;
    SeparationReport sep = check_separation(c);
    ShatterReport shat = verify_shatter(inst);
    Rng lrng = setup_stream(seed, 5);
    LipschitzReport lip = verify_lipschitz(inst, pairs, lrng);
    const double frob_bound = 2.0 * static_cast<double>(c.d);
    s.add("separation", "max_frobenius_sq", sep.max_frobenius_sq, frob_bound, sep.frobenius_ok);
    s.add("separation", "min_cross_dist_sq", sep.min_cross_dist_sq, kSeparationSq, sep.cross_ok);
    s.add("separation", "min_same_dist_sq", sep.min_same_dist_sq, kSeparationSq, sep.same_ok);
    s.add("shattering", "min_margin", shat.min_margin, 1.0 - kMarginTolerance, shat.pass());
    s.add("lipschitz", "max_ratio", lip.max_ratio, lip.lipschitz + kMarginTolerance, lip.pass());
    s.add("lipschitz", "constant", lip.lipschitz, 8.0 + kMarginTolerance, lip.lipschitz <= 8.0 + kMarginTolerance);
    s.report = Json{{"d", c.d},
                    {"h", c.h},
                    {"m", c.m},
                    {"patterns", inst.patterns()},
                    {"seed", inst.seed},
                    {"attempts", inst.attempts},
                    {"from_bundle", from_bundle},
                    {"gaussian_algorithm", kGaussianAlgorithm},
                    {"alpha", inst.extension.alpha},
                    {"separation", to_json(sep)},
                    {"shattering", to_json(shat)},
                    {"lipschitz", to_json(lip)}};
    return s;
}

SuiteResult concentration_cmd(Params& p, std::uint64_t seed) {
    SuiteResult s;
    s.name = "concentration";
    const std::size_t d = p.size("d", 50);
    const std::size_t h = p.size("h", 50);
    const std::size_t trials = p.size("trials", 100000);
    if (trials < 10000) throw UsageError("concentration: --trials must be >= 10000");
    ConcentrationReport rep = concentration_suite(d, h, trials, seed);
    for (const auto& t : rep.checks) {
        char eps[32];
        std::snprintf(eps, sizeof eps, "%.17g", t.epsilon);
        s.add(t.tag + "(eps=" + eps + ")", "frequency", t.frequency, t.threshold, t.pass);
    }
    s.report = to_json(rep);
    return s;
}

std::string csv_field(const std::string& f) {
    if (f.find_first_of(",\"\n") == std::string::npos) return f;
    std::string out = "\"";
    for (char ch : f) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string utc_timestamp() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::map<std::string, std::string> read_config(const std::string& path) {
    std::map<std::string, std::string> out;
    std::istringstream in(read_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto trim = [](std::string x) {
            auto b = x.find_first_not_of(" \t\r");
            auto e = x.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : x.substr(b, e - b + 1);
        };
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

struct Command {
    std::string name;
    std::string help;
    std::vector<std::string> keys;
};

const std::map<std::string, std::string>& key_help() {
    static const std::map<std::string, std::string> help = {
        {"T", "Hidden width"},
        {"d", "Input dimension"},
        {"m", "Sample count"},
        {"h", "Matrix side (shatter, concentration)"},
        {"L", "Activation Lipschitz constant"},
        {"B", "Input norm bound"},
        {"R", "Frobenius budget for W - W0"},
        {"r", "Norm budget for v - v0"},
        {"W0-norm", "Frobenius norm of the random W0"},
        {"v0-norm", "Norm of the random v0"},
        {"activation", "identity, relu, tanh or scaled:<c>"},
        {"trials", "Monte Carlo trials"},
        {"delta", "Failure probability in (0, 1)"},
        {"L-loss", "Loss Lipschitz constant"},
        {"B-loss", "Loss bound"},
        {"sigma0", "Activation value at 0"},
        {"retries", "Candidate resampling cap"},
        {"pairs", "Random pairs for the Lipschitz audit"},
        {"verify", "Re-verify an existing bundle.json instead of building"},
    };
    return help;
}

const std::vector<Command>& commands() {
    static const std::vector<Command> cmds = {
        {"sketch-verify", "Random sketch contract and length scaling", {"d", "B", "R", "trials"}},
        {"neuron-verify", "Squeezer and single-neuron compressor contracts", {"d", "m", "B", "R", "activation", "trials"}},
        {"network-verify",
         "Network and unit estimator contracts",
         {"T", "d", "m", "B", "R", "r", "W0-norm", "v0-norm", "activation", "trials"}},
        {"bounds",
         "Description length and generalization bound calculator",
         {"T", "d", "m", "L", "B", "R", "r", "delta", "L-loss", "B-loss", "sigma0"}},
        {"shatter", "Build and verify a strong shattering instance", {"d", "h", "retries", "pairs", "verify"}},
        {"concentration", "Empirical tail frequencies of the concentration inequalities", {"d", "h", "trials"}},
        {"all", "Every suite with default parameters", {"trials"}},
    };
    return cmds;
}

int execute(const std::string& name, std::map<std::string, std::string> flags, const std::string& config_path,
            const std::vector<std::string>& argv) {
    const Command& cmd = *std::find_if(commands().begin(), commands().end(), [&](const Command& c) { return c.name == name; });
    Params p;
    if (!config_path.empty()) {
        for (auto& [k, v] : read_config(config_path)) {
            bool known = k == "seed" || k == "out" ||
                         std::find(cmd.keys.begin(), cmd.keys.end(), k) != cmd.keys.end();
            if (!known) throw UsageError(config_path + ": unknown key '" + k + "' for " + name);
            p.values[k] = v;
        }
    }
    for (auto& [k, v] : flags) p.values[k] = v;

    const bool needs_seed = name != "bounds";
    if (needs_seed && !p.has("seed")) throw UsageError(name + ": --seed is required");
    const std::uint64_t seed = needs_seed ? p.u64("seed", 0) : 0;
    const std::string out_dir = p.text("out", ".");
    std::filesystem::create_directories(out_dir);

    std::vector<SuiteResult> results;
    if (name == "sketch-verify") results.push_back(sketch_suite(p, seed));
    else if (name == "neuron-verify") results.push_back(neuron_suite(p, seed));
    else if (name == "network-verify") results.push_back(network_suite(p, seed));
    else if (name == "bounds") results.push_back(bounds_suite(p, out_dir, true));
    else if (name == "shatter") results.push_back(shatter_suite(p, seed, out_dir));
    else if (name == "concentration") results.push_back(concentration_cmd(p, seed));
    else {
        // Each suite reads its own defaults; only the trial count is shared.
        auto sub = [&](std::initializer_list<std::string> keys) {
            Params q;
            for (const auto& k : keys)
                if (p.has(k)) q.values[k] = p.values[k];
            return q;
        };
        Params a = sub({"trials"}), b = sub({"trials"}), c = sub({"trials"}), e = sub({}), f = sub({}),
               g = sub({"trials"});
        results.push_back(sketch_suite(a, seed));
        results.push_back(neuron_suite(b, seed));
        results.push_back(network_suite(c, seed));
        results.push_back(bounds_suite(e, out_dir, true));
        results.push_back(shatter_suite(f, seed, out_dir));
        results.push_back(concentration_cmd(g, seed));
        Json cfgs = Json::object();
        cfgs["sketch-verify"] = a.resolved;
        cfgs["neuron-verify"] = b.resolved;
        cfgs["network-verify"] = c.resolved;
        cfgs["bounds"] = e.resolved;
        cfgs["shatter"] = f.resolved;
        cfgs["concentration"] = g.resolved;
        for (auto& r : results) r.report["config"] = cfgs[r.name];
    }

    bool pass = true;
    std::vector<std::string> failing;
    Json suites = Json::object();
    std::string csv = "suite,tag,metric,value,bound,pass\n";
    for (auto& r : results) {
        pass = pass && r.pass;
        for (const auto& t : r.failing) failing.push_back(r.name + ":" + t);
        Json failing_json = Json::array();
        for (const auto& t : r.failing) failing_json.push_back(t);
        suites[r.name] = Json{{"pass", r.pass}, {"failing", std::move(failing_json)}, {"report", r.report}};
        for (const auto& row : r.rows) {
            char buf[96];
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%s\n", row.value, row.bound, row.pass ? "true" : "false");
            csv += csv_field(r.name) + "," + csv_field(row.tag) + "," + csv_field(row.metric) + buf;
        }
    }
    Json failing_json = Json::array();
    for (const auto& t : failing) failing_json.push_back(t);
    Json report{{"command", name},
                {"version", kVersion},
                {"config", p.resolved},
                {"pass", pass},
                {"failing", std::move(failing_json)},
                {"suites", std::move(suites)}};
    namespace fs = std::filesystem;
    write_file_atomic((fs::path(out_dir) / "report.json").string(), dump_json(report));
    write_file_atomic((fs::path(out_dir) / "summary.csv").string(), csv);
    Json args = Json::array();
    for (const auto& a : argv) args.push_back(a);
    Json meta{{"command", name},
              {"argv", std::move(args)},
              {"timestamp_utc", utc_timestamp()},
              {"version", kVersion},
              {"workers", worker_count()},
              {"gaussian_algorithm", kGaussianAlgorithm}};
    write_file_atomic((fs::path(out_dir) / "metadata.json").string(), dump_json(meta));

    for (const auto& r : results)
        std::cout << r.name << ": " << (r.pass ? "PASS" : "FAIL") << "\n";
    if (!pass) {
        std::cerr << "failing gates:";
        for (const auto& t : failing) std::cerr << " " << t;
        std::cerr << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"adl: approximate description length verification toolkit"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", kVersion);

    std::map<std::string, std::string> flags;
    std::string config_path;
    for (const auto& cmd : commands()) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->set_help_flag("--help", "Print this help message and exit");
        sub->add_option_function<std::string>(
            "--seed", [&flags](const std::string& v) { flags["seed"] = v; }, "Random seed (required except for bounds)");
        sub->add_option_function<std::string>(
            "--out", [&flags](const std::string& v) { flags["out"] = v; }, "Output directory (default .)");
        sub->add_option("--config", config_path, "Flat key=value file; flags override it");
        for (const auto& key : cmd.keys)
            sub->add_option_function<std::string>(
                "--" + key, [&flags, key](const std::string& v) { flags[key] = v; }, key_help().at(key));
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::string name;
    for (auto* sub : app.get_subcommands()) name = sub->get_name();
    try {
        return execute(name, flags, config_path, args);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args);
}

}  // namespace adl::cli
