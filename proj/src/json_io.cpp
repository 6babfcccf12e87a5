#include "adl/json_io.hpp"

#include "adl/error.hpp"
#include "adl/rng.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace adl {

namespace {

void emit(const Json& j, std::string& out, int depth) {
    auto indent = [&](int n) { out.append(static_cast<std::size_t>(2 * n), ' '); };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                indent(depth + 1);
                out += Json(it.key()).dump();
                out += ": ";
                emit(it.value(), out, depth + 1);
            }
            out += "\n";
            indent(depth);
            out += "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            bool flat = true;
            for (const auto& e : j) flat = flat && !e.is_structured();
            if (flat) {
                out += "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) out += ", ";
                    emit(j[i], out, depth + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                indent(depth + 1);
                emit(j[i], out, depth + 1);
            }
            out += "\n";
            indent(depth);
            out += "]";
            return;
        }
        case Json::value_t::number_float: {
            double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
                return;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += buf;
            return;
        }
        default:
            out += j.dump();
    }
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string dump_json(const Json& j) {
    std::string out;
    emit(j, out, 0);
    out += "\n";
    return out;
}

Json vector_json(const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json matrix_json(const Matrix& M) {
    Json a = Json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        a.push_back(std::move(row));
    }
    return a;
}

Vector vector_from_json(const Json& j) {
    if (!j.is_array()) throw DomainError("vector_from_json: array expected");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array()) throw DomainError("matrix_from_json: array of rows expected");
    const std::size_t rows = j.size();
    const std::size_t cols = rows ? j[0].size() : 0;
    Matrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw DimensionError("matrix_from_json: ragged rows");
        for (std::size_t c = 0; c < cols; ++c)
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
    return M;
}

Json to_json(const HypoParams& p) {
    return Json{{"T", p.T()}, {"d", p.d()}, {"L", p.L()},          {"B", p.B()},
                {"R", p.R()}, {"r", p.r()}, {"W0", matrix_json(p.W0())}, {"v0", vector_json(p.v0())}};
}

Json to_json(const Hypothesis& h) { return Json{{"W", matrix_json(h.W())}, {"v", vector_json(h.v())}}; }

Json to_json(const SampleSet& s) { return Json{{"B", s.B()}, {"points", matrix_json(s.points())}}; }

HypoParams params_from_json(const Json& j) {
    Matrix W0 = matrix_from_json(j.at("W0"));
    if (j.contains("d") && W0.rows() == 0) W0.resize(0, j.at("d").get<Eigen::Index>());
    return HypoParams(j.at("L").get<double>(), j.at("B").get<double>(), j.at("R").get<double>(),
                      j.at("r").get<double>(), std::move(W0), vector_from_json(j.at("v0")));
}

Hypothesis hypothesis_from_json(const Json& j) {
    return Hypothesis(matrix_from_json(j.at("W")), vector_from_json(j.at("v")));
}

SampleSet samples_from_json(const Json& j) {
    return SampleSet(matrix_from_json(j.at("points")), j.at("B").get<double>());
}

Json to_json(const BitString& b) { return Json{{"bits", b.size()}, {"hex", b.to_hex()}}; }

BitString bits_from_json(const Json& j) {
    return BitString::from_hex(j.at("hex").get<std::string>(), j.at("bits").get<std::size_t>());
}

Json to_json(const MCReport& r) {
    Json j{{"n_trials", r.n_trials},
           {"truth", r.truth},
           {"mean", r.mean},
           {"variance", r.variance},
           {"standard_error", r.standard_error},
           {"z", r.z},
           {"var_bound", r.var_bound},
           {"mean_bits", r.mean_bits},
           {"len_bound", opt(r.len_bound)},
           {"unbiased", r.unbiased},
           {"variance_ok", r.variance_ok},
           {"length_ok", r.length_ok},
           {"finite", r.finite},
           {"bad_trial", r.bad_trial ? Json(*r.bad_trial) : Json(nullptr)},
           {"criteria", r.criteria},
           {"pass", r.pass}};
    return j;
}

Json to_json(const MCVectorReport& r) {
    Json outs = Json::array();
    for (const auto& o : r.outputs) outs.push_back(to_json(o));
    return Json{{"mean_bits", r.mean_bits},
                {"len_bound", opt(r.len_bound)},
                {"length_ok", r.length_ok},
                {"pass", r.pass},
                {"outputs", std::move(outs)}};
}

Json to_json(const ExactReport& r) {
    return Json{{"outcome_count", r.outcome_count},
                {"total_probability", r.total_probability},
                {"mean", r.mean},
                {"variance", r.variance},
                {"expected_bits", r.expected_bits}};
}

Json to_json(const TailCheck& t) {
    return Json{{"tag", t.tag},       {"event", t.event}, {"epsilon", t.epsilon},     {"trials", t.trials},
                {"hits", t.hits},     {"frequency", t.frequency}, {"bound", t.bound}, {"threshold", t.threshold},
                {"pass", t.pass}};
}

Json to_json(const ConcentrationReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    return Json{{"d", r.d},
                {"h", r.h},
                {"trials", r.trials},
                {"seed", r.seed},
                {"gaussian_algorithm", kGaussianAlgorithm},
                {"checks", std::move(checks)},
                {"pass", r.pass}};
}

Json to_json(const AdlBound& b) {
    return Json{{"bits", b.bits},
                {"big_o", b.big_o},
                {"k", b.k},
                {"q_B", b.q_B},
                {"n_avg", b.n_avg},
                {"n_a", b.n_a},
                {"n_b", b.n_b},
                {"sketch_bits", b.sketch_bits},
                {"squeezer_bits", b.squeezer_bits},
                {"rmf_bits", b.rmf_bits},
                {"neuron_bits", b.neuron_bits},
                {"part_bits_a", b.part_bits_a},
                {"part_bits_b", b.part_bits_b},
                {"gv_bits", b.gv_bits}};
}

Json to_json(const BoundReport& r) {
    return Json{{"L", r.L},           {"B", r.B},          {"R", r.R},           {"r", r.r},
                {"d", r.d},           {"m", r.m},          {"T", r.T},           {"delta", r.delta},
                {"L_loss", r.L_loss}, {"B_loss", r.B_loss}, {"sigma0", r.sigma0}, {"adl", to_json(r.adl)},
                {"gen_gap", r.gen_gap}};
}

Json to_json(const SeparationReport& r) {
    return Json{{"max_frobenius_sq", r.max_frobenius_sq},
                {"min_cross_dist_sq", r.min_cross_dist_sq},
                {"min_same_dist_sq", r.min_same_dist_sq},
                {"min_pair_dist_sq", r.min_pair_dist_sq},
                {"frobenius_ok", r.frobenius_ok},
                {"cross_ok", r.cross_ok},
                {"same_ok", r.same_ok},
                {"pass", r.pass()}};
}

Json to_json(const ShatterReport& r) {
    Json fails = Json::array();
    for (const auto& f : r.failures) fails.push_back(Json{{"k", f.k}, {"i", f.i}, {"value", f.value}});
    return Json{{"cells", r.cells}, {"min_margin", r.min_margin}, {"failures", std::move(fails)}, {"pass", r.pass()}};
}

Json to_json(const LipschitzReport& r) {
    return Json{{"pairs", r.pairs}, {"max_ratio", r.max_ratio}, {"lipschitz", r.lipschitz}, {"pass", r.pass()}};
}

Json shatter_bundle(const ShatterInstance& inst) {
    const auto& c = inst.candidate;
    Json mats = Json::array();
    for (const auto& a : c.A) mats.push_back(matrix_json(a));
    Json labels = Json::array();
    for (std::size_t k = 0; k < c.A.size(); ++k) {
        Json row = Json::array();
        for (std::size_t i = 0; i < c.m; ++i) row.push_back(static_cast<int>(inst.label(k, i)));
        labels.push_back(std::move(row));
    }
    const auto& e = inst.extension;
    return Json{{"d", c.d},
                {"h", c.h},
                {"m", c.m},
                {"seed", inst.seed},
                {"attempts", inst.attempts},
                {"gaussian_algorithm", kGaussianAlgorithm},
                {"x", matrix_json(c.x)},
                {"A", std::move(mats)},
                {"labels", std::move(labels)},
                {"extension",
                 Json{{"center", e.center},
                      {"alpha", e.alpha},
                      {"alpha_worst_case", 0.25},
                      {"slope", e.slope},
                      {"lipschitz", e.lipschitz()},
                      {"lipschitz_worst_case", 8.0}}},
                {"separation", to_json(inst.separation)}};
}

ShatterInstance shatter_from_bundle(const Json& j) {
    ShatterCandidate c;
    c.d = j.at("d").get<std::size_t>();
    c.h = j.at("h").get<std::size_t>();
    c.m = j.at("m").get<std::size_t>();
    c.x = matrix_from_json(j.at("x"));
    for (const auto& a : j.at("A")) c.A.push_back(matrix_from_json(a));
    if (static_cast<std::size_t>(c.x.rows()) != c.m || static_cast<std::size_t>(c.x.cols()) != c.d ||
        c.m >= 64 || c.A.size() != (std::size_t{1} << c.m))
        throw DimensionError("shatter_from_bundle: inconsistent shapes");
    for (const auto& a : c.A)
        if (static_cast<std::size_t>(a.rows()) != c.h || static_cast<std::size_t>(a.cols()) != c.d)
            throw DimensionError("shatter_from_bundle: matrix shape mismatch");
    return assemble_instance(std::move(c), j.at("seed").get<std::uint64_t>(), j.at("attempts").get<std::size_t>());
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("write_file_atomic: cannot open " + tmp);
        out << content;
        out.flush();
        if (!out) throw Error("write_file_atomic: write failed for " + tmp);
    }
    fs::rename(tmp, p);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("read_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace adl
