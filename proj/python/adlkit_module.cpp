#include "adl/bitcodec.hpp"
#include "adl/bounds.hpp"
#include "adl/cli.hpp"
#include "adl/concentration.hpp"
#include "adl/error.hpp"
#include "adl/json_io.hpp"
#include "adl/network.hpp"
#include "adl/rng.hpp"
#include "adl/shatter.hpp"
#include "adl/sketch.hpp"

#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

namespace py = pybind11;
using namespace adl;

namespace {

// Reports cross the boundary as JSON text; the Python side parses them.
std::string dumps(const Json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Compression estimators for two-layer networks";

    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<DecodeError>(m, "DecodeError", PyExc_ValueError);
    py::register_exception<RefusalError>(m, "RefusalError", PyExc_RuntimeError);

    py::class_<Rng>(m, "Rng")
        .def(py::init([](std::uint64_t seed, std::uint64_t stream) { return make_stream(seed, stream); }),
             py::arg("seed"), py::arg("stream") = 0)
        .def("uniform", [](Rng& r) { return uniform01(r); })
        .def("gaussian", [](Rng& r) { return gaussian(r); });

    m.def("encode_gamma", [](std::uint64_t n) { return encode_gamma(n).to_string(); });
    m.def("decode_gamma", [](const std::string& s) { return decode_gamma(BitString::from_string(s)); });
    m.def("gamma_length", &gamma_length);
    m.def("encode_signed_gamma", [](std::int64_t n) { return encode_signed_gamma(n).to_string(); });
    m.def("signed_gamma_length", &signed_gamma_length);
    m.def("zigzag", &zigzag);
    m.def("unzigzag", &unzigzag);

    py::class_<Activation>(m, "Activation")
        .def(py::init(&Activation::by_name), py::arg("name"))
        .def_property_readonly("name", &Activation::name)
        .def("__call__", [](const Activation& a, double x) { return a(x); });

    py::class_<HypoParams>(m, "HypoParams")
        .def(py::init<double, double, double, double, Matrix, Vector>(), py::arg("L"), py::arg("B"), py::arg("R"),
             py::arg("r"), py::arg("W0"), py::arg("v0"))
        .def_static("zero_init", &HypoParams::zero_init, py::arg("T"), py::arg("d"), py::arg("L"), py::arg("B"),
                    py::arg("R"), py::arg("r"))
        .def_property_readonly("T", &HypoParams::T)
        .def_property_readonly("d", &HypoParams::d)
        .def_property_readonly("R", &HypoParams::R)
        .def_property_readonly("r", &HypoParams::r);

    py::class_<Hypothesis>(m, "Hypothesis")
        .def(py::init<Matrix, Vector>(), py::arg("W"), py::arg("v"))
        .def_property_readonly("W", &Hypothesis::W)
        .def_property_readonly("v", &Hypothesis::v)
        .def(
            "__call__", [](const Hypothesis& h, const Vector& x, const Activation& s) { return eval_network(h, x, s); },
            py::arg("x"), py::arg("sigma"));

    py::class_<SampleSet>(m, "SampleSet")
        .def(py::init<Matrix, double>(), py::arg("points"), py::arg("B"))
        .def_property_readonly("m", &SampleSet::m)
        .def_property_readonly("d", &SampleSet::d);

    py::class_<SketchConfig>(m, "SketchConfig")
        .def(py::init(&SketchConfig::make), py::arg("d"), py::arg("B"), py::arg("mantissa_bits") = 4,
             py::arg("norm_ref") = 1.0)
        .def_readonly("d", &SketchConfig::d)
        .def_readonly("q_B", &SketchConfig::q_B)
        .def_readonly("mantissa_bits", &SketchConfig::mantissa_bits)
        .def_readonly("norm_ref", &SketchConfig::norm_ref);

    py::class_<SketchSample>(m, "SketchSample")
        .def_property_readonly("is_zero", &SketchSample::is_zero)
        .def(
            "eval",
            [](const SketchSample& s, const std::vector<double>& x, const SketchConfig& c) { return s.eval(x, c); },
            py::arg("x"), py::arg("config"))
        .def(
            "encode", [](const SketchSample& s, const SketchConfig& c) { return sketch_encode(s, c).to_bits().to_string(); },
            py::arg("config"))
        .def(py::self == py::self);
    m.def(
        "sketch_decode",
        [](const std::string& bits, const SketchConfig& c) {
            return sketch_decode(FramedMessage::from_bits(BitString::from_string(bits)), c);
        },
        py::arg("bits"), py::arg("config"));

    py::class_<Sketcher>(m, "Sketcher")
        .def(py::init([](const std::vector<double>& u, const SketchConfig& c) { return Sketcher(u, c); }), py::arg("u"),
             py::arg("config"))
        .def("sample", &Sketcher::sample, py::arg("rng"))
        .def("expected_bits", &Sketcher::expected_bits)
        .def_property_readonly("norm", &Sketcher::norm)
        .def_property_readonly("step", &Sketcher::step);

    py::class_<NetworkRealization>(m, "NetworkRealization")
        .def_property_readonly("index", [](const NetworkRealization& r) { return r.f.index; })
        .def_property_readonly("coefficient", [](const NetworkRealization& r) { return r.f.coefficient; })
        .def_property_readonly("neurons", [](const NetworkRealization& r) { return r.f.neurons.size(); })
        .def(py::self == py::self);

    py::class_<NetworkCompressor>(m, "NetworkCompressor")
        .def(py::init([](const Hypothesis& h, const HypoParams& p, const SampleSet& A, const Activation& s) {
                 return NetworkCompressor(h, p, A, s);
             }),
             py::arg("h"), py::arg("params"), py::arg("samples"), py::arg("sigma"))
        .def("sample", &NetworkCompressor::sample, py::arg("rng"))
        .def("eval", &NetworkCompressor::eval, py::arg("realization"), py::arg("index"))
        .def("target", &NetworkCompressor::target, py::arg("index"))
        .def("variance_bound", &NetworkCompressor::variance_bound)
        .def("expected_bits", &NetworkCompressor::expected_bits)
        .def_property_readonly("probabilities", &NetworkCompressor::probabilities)
        .def_property_readonly("n_avg", [](const NetworkCompressor& c) { return c.protocol().n_avg; })
        .def(
            "encode",
            [](const NetworkCompressor& c, const NetworkRealization& r) {
                return network_encode(r, c.protocol()).to_bits().to_string();
            },
            py::arg("realization"))
        .def(
            "decode",
            [](const NetworkCompressor& c, const std::string& bits) {
                return c.decoder().decode(FramedMessage::from_bits(BitString::from_string(bits)));
            },
            py::arg("bits"));

    m.def(
        "adl_bound_json",
        [](const HypoParams& p, std::size_t samples, double sigma0) { return dumps(to_json(adl_bound(p, samples, sigma0))); },
        py::arg("params"), py::arg("m"), py::arg("sigma0") = 0.0);
    m.def("gen_bound", &gen_bound, py::arg("n"), py::arg("m"), py::arg("L_loss"), py::arg("B_loss"), py::arg("delta"));
    m.def(
        "concentration_json",
        [](std::size_t d, std::size_t h, std::size_t trials, std::uint64_t seed) {
            py::gil_scoped_release release;
            return dumps(to_json(concentration_suite(d, h, trials, seed)));
        },
        py::arg("d"), py::arg("h"), py::arg("trials"), py::arg("seed"));
    m.def(
        "shatter_json",
        [](std::size_t d, std::size_t h, std::uint64_t seed) {
            ShatterInstance inst = build_instance(d, h, seed);
            Json out;
            out["report"] = to_json(verify_shatter(inst));
            out["bundle"] = shatter_bundle(inst);
            return dumps(out);
        },
        py::arg("d"), py::arg("h"), py::arg("seed"));
    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "adl");
            py::gil_scoped_release release;
            return cli::run(args);
        },
        py::arg("args"));
}
