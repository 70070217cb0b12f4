#pragma once

#include "aot/path_measure.hpp"

#include <string>

#include <json.hpp>

namespace aot {

/// Measure file schema:
///   {"d": int, "T": int, "atoms": [{"path": [[f64; d]; T], "weight": f64}, ...]}
/// Weights must sum to 1 within 1e-9; violations are rejected with a
/// diagnostic naming the deficit.
PathMeasure load_measure(const std::string& path);
PathMeasure measure_from_json(const nlohmann::ordered_json& j, const std::string& origin);

nlohmann::ordered_json measure_to_json(const PathMeasure& mu);
void save_measure(const PathMeasure& mu, const std::string& path);

} // namespace aot
