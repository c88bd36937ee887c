#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gtr/gmrf.hpp"
#include "gtr/grid.hpp"
#include "gtr/plan.hpp"

namespace gtr {

// Partition document: {"h", "w", "K", "stages": [[[i,j], ...], ...]}.
nlohmann::json partition_to_json(const StagePartition& partition);
StagePartition partition_from_json(const nlohmann::json& j);

// Plan document: {"shape": {"h","w"}, "seed", "steps": [{"stage", "tokens", "t"}]}.
nlohmann::json plan_to_json(const SamplingPlan& plan);
SamplingPlan plan_from_json(const nlohmann::json& j);

nlohmann::json cost_to_json(const CostCounters& cost);

// Model document: {"h", "w", "d", "rho", "rho_map": null | [n doubles]}.
struct ModelParams {
    GridShape shape{8, 8};
    double diag = 1.0;
    double rho = 0.22;
    std::optional<std::vector<double>> rho_map;
};

nlohmann::json model_params_to_json(const ModelParams& params);
ModelParams model_params_from_json(const nlohmann::json& j);
GmrfModel build_model(const ModelParams& params);

// Law document: {"mean": [n], "covariance": [n*n row-major]}.
nlohmann::json law_to_json(const GaussianLaw& law);
GaussianLaw law_from_json(const nlohmann::json& j);

// Conditioning-vector CSV: one row per token, "index,z0,z1,...". All rows
// must have the same dimensionality; throws ParseError on ragged input.
std::vector<std::pair<int, std::vector<double>>> vectors_from_csv(const std::string& text);

// Score CSV: "position,score,selected" rows in position order.
std::string scores_to_csv(const std::vector<int>& positions, const std::vector<double>& scores,
                          const std::vector<bool>& selected);

// Plain PGM (P2), values rescaled linearly to 0..255 (constant input -> 0).
std::string pgm_from_grid(const std::vector<double>& values, GridShape shape);

// Deterministic float formatting for CSV/report output.
std::string format_double(double value);

// Write via temp-file-then-rename so failures never leave partial output.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace gtr
