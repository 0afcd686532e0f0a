#pragma once

// JSON instance and result files.
//
// Instance:
//   {"kind": "interval", "buyers": N, "items": M, "demands": [...],
//    "lower": [[...]], "upper": [[...]]}
//   {"kind": "deterministic", "buyers": N, "items": M, "demands": [...],
//    "valuations": [[...]]}
// Matrices are buyer-major (N rows of M entries); "demands" is optional.
// Every floating value written by this module is rounded to 9 significant
// digits.

#include <string>

#include "json.hpp"
#include "regret_pricer/core.hpp"

namespace regret_pricer::io {

using nlohmann::json;

inline constexpr int kSignificantDigits = 9;

double round_significant(double v, int digits = kSignificantDigits);
json number(double v);
json number_array(const std::vector<double>& v);
json matrix_json(const Matrix& m);

RawInstance parse_instance(const json& j);
json instance_json(const RawInstance& raw);
json instance_json(const IntervalUncertainty& s);

std::string read_file(const std::string& path);
// Writes text to path, or to stdout when path is "-".
void write_file(const std::string& path, const std::string& text);
json load_json(const std::string& path);
// Pretty-printed with a trailing newline.
std::string dump(const json& j);

}  // namespace regret_pricer::io
