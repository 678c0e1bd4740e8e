// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include "opmeans/json_io.hpp"

#include <fstream>

#include "opmeans/errors.hpp"
#include "opmeans/rational.hpp"

namespace opmeans {
namespace {

nlohmann::ordered_json rows_to_json(const Eigen::MatrixXd& a) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            row.push_back(a(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd rows_from_json(const nlohmann::json& rows, Eigen::Index dim,
                               const std::string& what) {
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != dim) {
        throw ParseError(what + ": expected " + std::to_string(dim) + " rows");
    }
    Eigen::MatrixXd a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const nlohmann::json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
            throw ParseError(what + ": row " + std::to_string(i) + " must have " +
                             std::to_string(dim) + " entries");
        }
        for (Eigen::Index j = 0; j < dim; ++j) {
            const nlohmann::json& cell = row[static_cast<std::size_t>(j)];
            if (!cell.is_number()) {
                throw ParseError(what + ": non-numeric entry at (" + std::to_string(i) +
                                 ", " + std::to_string(j) + ")");
            }
            a(i, j) = cell.get<double>();
        }
    }
    return a;
}

Eigen::Index dim_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_integer()) {
        throw ParseError(what + ": expected an object with an integer \"dim\"");
    }
    const auto dim = j["dim"].get<std::int64_t>();
    if (dim < 1 || dim > 4096) {
        throw ParseError(what + ": dim " + std::to_string(dim) + " out of range");
    }
    return static_cast<Eigen::Index>(dim);
}

} // namespace

nlohmann::ordered_json matrix_to_json(const HpdMatrix& a) {
    nlohmann::ordered_json j;
    j["dim"] = a.dim();
    j["data"] = rows_to_json(a.mat());
    return j;
}

nlohmann::ordered_json dense_to_json(const Eigen::MatrixXd& a) {
    nlohmann::ordered_json j;
    j["dim"] = a.rows();
    j["data"] = rows_to_json(a);
    return j;
}

HpdMatrix matrix_from_json(const nlohmann::json& j, const EigOptions& opt) {
    const Eigen::Index dim = dim_from_json(j, "matrix");
    if (!j.contains("data")) {
        throw ParseError("matrix: missing \"data\"");
    }
    return HpdMatrix::checked(rows_from_json(j["data"], dim, "matrix"), opt);
}

nlohmann::ordered_json measure_to_json(const DiscreteMeasure& mu) {
    nlohmann::ordered_json j;
    j["dim"] = mu.dim();
    nlohmann::ordered_json atoms = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < mu.size(); ++i) {
        nlohmann::ordered_json atom;
        atom["weight"] = mu.weight(i).str();
        atom["matrix"] = rows_to_json(mu.atom(i).mat());
        atoms.push_back(std::move(atom));
    }
    j["atoms"] = std::move(atoms);
    return j;
}

DiscreteMeasure measure_from_json(const nlohmann::json& j, const EigOptions& opt) {
    const Eigen::Index dim = dim_from_json(j, "measure");
    if (!j.contains("atoms") || !j["atoms"].is_array() || j["atoms"].empty()) {
        throw ParseError("measure: expected a non-empty \"atoms\" array");
    }
    std::vector<HpdMatrix> atoms;
    std::vector<Rational> weights;
    atoms.reserve(j["atoms"].size());
    weights.reserve(j["atoms"].size());
    for (const nlohmann::json& entry : j["atoms"]) {
        if (!entry.is_object() || !entry.contains("weight") || !entry.contains("matrix")) {
            throw ParseError("measure: each atom needs \"weight\" and \"matrix\"");
        }
        if (!entry["weight"].is_string()) {
            throw ParseError("measure: weights must be rational strings like \"1/3\"");
        }
        weights.push_back(Rational::parse(entry["weight"].get<std::string>()));
        atoms.push_back(HpdMatrix::checked(rows_from_json(entry["matrix"], dim, "measure atom"), opt));
    }
    return DiscreteMeasure(std::move(atoms), std::move(weights));
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open file: " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

DiscreteMeasure load_measure_file(const std::string& path, const EigOptions& opt) {
    return measure_from_json(load_json_file(path), opt);
}

void save_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write file: " + path);
    }
    out << j.dump(2) << '\n';
}

} // namespace opmeans
