// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include <string>

#include <json.hpp>

#include "opmeans/hpd.hpp"
#include "opmeans/measure.hpp"

namespace opmeans {

/// JSON wire formats.  A matrix is {"dim": N, "data": [[row], ...]} with the
/// entries row-major; a measure is {"dim": N, "atoms": [{"weight": "p/q",
/// "matrix": [[row], ...]}, ...]} with weights as exact rational strings.
/// Floating-point output uses shortest round-trip decimals (at most 17
/// significant digits), so a write/read cycle reproduces every 64-bit
/// value bit-for-bit.

/// Serialize a symmetric positive definite matrix.
nlohmann::ordered_json matrix_to_json(const HpdMatrix& a);
/// Serialize a plain dense matrix (used for traces and report payloads).
nlohmann::ordered_json dense_to_json(const Eigen::MatrixXd& a);

/// Parse {"dim", "data"}; validates symmetry and positive definiteness.
HpdMatrix matrix_from_json(const nlohmann::json& j, const EigOptions& opt = {});

/// Serialize a measure with exact rational weight strings.
nlohmann::ordered_json measure_to_json(const DiscreteMeasure& mu);
/// Parse {"dim", "atoms": [{"weight", "matrix"}]}.
DiscreteMeasure measure_from_json(const nlohmann::json& j, const EigOptions& opt = {});

/// Read and parse a JSON file; throws ParseError with the path on failure.
nlohmann::json load_json_file(const std::string& path);
/// Load a measure from a JSON file.
DiscreteMeasure load_measure_file(const std::string& path, const EigOptions& opt = {});
/// Write JSON to a file, creating or truncating it; 2-space indentation.
void save_json_file(const std::string& path, const nlohmann::json& j);

} // namespace opmeans
