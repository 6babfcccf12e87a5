#pragma once

#include "adl/bitcodec.hpp"
#include "adl/bounds.hpp"
#include "adl/concentration.hpp"
#include "adl/harness.hpp"
#include "adl/model.hpp"
#include "adl/shatter.hpp"

#include <json.hpp>

#include <string>

namespace adl {

using Json = nlohmann::ordered_json;

// Serializes with floating-point values printed as %.17g, two-space indent
// and a trailing newline. Non-finite numbers become null.
std::string dump_json(const Json& j);

Json vector_json(const Vector& v);
Json matrix_json(const Matrix& M);  // array of rows
Vector vector_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);

Json to_json(const HypoParams& p);
Json to_json(const Hypothesis& h);
Json to_json(const SampleSet& s);
HypoParams params_from_json(const Json& j);
Hypothesis hypothesis_from_json(const Json& j);
SampleSet samples_from_json(const Json& j);

// {"bits": n, "hex": "..."}
Json to_json(const BitString& b);
BitString bits_from_json(const Json& j);

Json to_json(const MCReport& r);
Json to_json(const MCVectorReport& r);
Json to_json(const ExactReport& r);
Json to_json(const TailCheck& t);
Json to_json(const ConcentrationReport& r);
Json to_json(const AdlBound& b);
Json to_json(const BoundReport& r);
Json to_json(const SeparationReport& r);
Json to_json(const ShatterReport& r);
Json to_json(const LipschitzReport& r);

// Instance bundle: points, matrices, labels, extension parameters, seed,
// attempt count and the Gaussian algorithm name.
Json shatter_bundle(const ShatterInstance& inst);
ShatterInstance shatter_from_bundle(const Json& j);

// Writes to path + ".tmp" and renames over path.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace adl
