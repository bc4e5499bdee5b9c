#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qlc/cycles.hpp"
#include "qlc/flow.hpp"
#include "qlc/isocline.hpp"
#include "qlc/rotation.hpp"
#include "qlc/scenario.hpp"
#include "qlc/separatrix.hpp"
#include "qlc/singular.hpp"
#include "qlc/vectorfield.hpp"

namespace qlc {

/// Insertion-ordered so that emitted documents are byte-stable.
using Json = nlohmann::ordered_json;

/// Locale-independent rendering with 17 significant digits.
std::string format_double(double v);

/// Serialises with every floating-point number at 17 significant digits.
/// indent < 0 gives a single line.
std::string dump_json(const Json& j, int indent = 2);

/// Throws std::invalid_argument with the parser message on malformed input.
Json parse_json(std::string_view text);

std::string read_file(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Value types. from_json accepts partial objects for configuration types
// (missing keys keep their defaults) and rejects unknown keys.
void to_json(Json& j, const Vec2& v);
void from_json(const Json& j, Vec2& v);
void to_json(Json& j, const Mat2& m);
void to_json(Json& j, const QuadraticCoefficients& q);
void from_json(const Json& j, QuadraticCoefficients& q);
void to_json(Json& j, const CanonicalParamsII& p);
void from_json(const Json& j, CanonicalParamsII& p);
void to_json(Json& j, const CanonicalParamsI& p);
void from_json(const Json& j, CanonicalParamsI& p);

void to_json(Json& j, const Box& b);
void from_json(const Json& j, Box& b);
void to_json(Json& j, const IntegratorConfig& c);
void from_json(const Json& j, IntegratorConfig& c);
void to_json(Json& j, const Section& s);
void from_json(const Json& j, Section& s);
void to_json(Json& j, const Trajectory& t);

void to_json(Json& j, const ConicCurve& c);
void to_json(Json& j, const Line& l);
void to_json(Json& j, const IsoclineClass& c);

void to_json(Json& j, const SingularPoint& sp);
void to_json(Json& j, const SignReport& r);

void to_json(Json& j, const CycleSearchConfig& c);
void from_json(const Json& j, CycleSearchConfig& c);
void to_json(Json& j, const LimitCycleRecord& r);
void to_json(Json& j, const DisplacementSample& s);
void to_json(Json& j, const CycleSearch& s);
void to_json(Json& j, const CycleCount& c);
void to_json(Json& j, const FamilyPoint& p);
void to_json(Json& j, const FamilyCurve& c);
void to_json(Json& j, const StepPolicy& p);
void from_json(const Json& j, StepPolicy& p);

void to_json(Json& j, const SaddleFrame& f);
void to_json(Json& j, const LoopValue& v);

void to_json(Json& j, const ScenarioConfig& c);
void from_json(const Json& j, ScenarioConfig& c);
void to_json(Json& j, const StageReport& s);
void to_json(Json& j, const ScenarioReport& r);
void to_json(Json& j, const FoldRecord& r);
void to_json(Json& j, const GridSpec& g);
void from_json(const Json& j, GridSpec& g);
void to_json(Json& j, const SweepPoint& p);
void to_json(Json& j, const SweepSummary& s);

}  // namespace qlc
