#include "gtr/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gtr/errors.hpp"

namespace gtr {

namespace {

using nlohmann::json;

// get<T> with a field-name in the error instead of nlohmann's type_error.
template <typename T>
T field(const json& j, const char* name) {
    if (!j.contains(name)) throw ParseError(std::string("missing field \"") + name + "\"");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad field \"") + name + "\": " + e.what());
    }
}

json token_to_json(TokenPos p) { return json::array({p.i, p.j}); }

TokenPos token_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ParseError("token must be an [i, j] pair");
    try {
        return {j.at(0).get<int>(), j.at(1).get<int>()};
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad token pair: ") + e.what());
    }
}

}  // namespace

json partition_to_json(const StagePartition& partition) {
    json stages = json::array();
    for (const auto& stage : partition.stages) {
        json cells = json::array();
        for (const TokenPos& p : stage) cells.push_back(token_to_json(p));
        stages.push_back(std::move(cells));
    }
    return json{{"h", partition.shape.h},
                {"w", partition.shape.w},
                {"K", partition.stage_count()},
                {"stages", std::move(stages)}};
}

StagePartition partition_from_json(const json& j) {
    StagePartition partition;
    partition.shape = {field<int>(j, "h"), field<int>(j, "w")};
    const json stages = field<json>(j, "stages");
    if (!stages.is_array()) throw ParseError("\"stages\" must be an array");
    for (const json& stage : stages) {
        if (!stage.is_array()) throw ParseError("each stage must be an array of tokens");
        std::vector<TokenPos> cells;
        for (const json& cell : stage) cells.push_back(token_from_json(cell));
        partition.stages.push_back(std::move(cells));
    }
    if (field<int>(j, "K") != partition.stage_count()) {
        throw ParseError("\"K\" disagrees with the number of stages");
    }
    return partition;
}

json plan_to_json(const SamplingPlan& plan) {
    json steps = json::array();
    for (const PlanStep& step : plan.steps) {
        json tokens = json::array();
        for (const TokenPos& p : step.tokens) tokens.push_back(token_to_json(p));
        steps.push_back(json{{"stage", step.stage}, {"tokens", std::move(tokens)}, {"t", step.steps}});
    }
    return json{{"shape", {{"h", plan.shape.h}, {"w", plan.shape.w}}},
                {"seed", plan.seed},
                {"steps", std::move(steps)}};
}

SamplingPlan plan_from_json(const json& j) {
    SamplingPlan plan;
    const json shape = field<json>(j, "shape");
    plan.shape = {field<int>(shape, "h"), field<int>(shape, "w")};
    plan.seed = field<std::uint64_t>(j, "seed");
    const json steps = field<json>(j, "steps");
    if (!steps.is_array()) throw ParseError("\"steps\" must be an array");
    for (const json& s : steps) {
        PlanStep step;
        step.stage = field<int>(s, "stage");
        const json tokens = field<json>(s, "tokens");
        if (!tokens.is_array()) throw ParseError("\"tokens\" must be an array");
        for (const json& cell : tokens) step.tokens.push_back(token_from_json(cell));
        step.steps = field<std::vector<int>>(s, "t");
        if (step.steps.size() != step.tokens.size()) {
            throw ParseError("\"t\" and \"tokens\" lengths differ");
        }
        plan.steps.push_back(std::move(step));
    }
    return plan;
}

json cost_to_json(const CostCounters& cost) {
    json stages = json::array();
    for (const StageCost& s : cost.per_stage) {
        stages.push_back(json{{"stage", s.stage},
                              {"ar_steps", s.ar_steps},
                              {"token_diffusion_steps", s.token_diffusion_steps}});
    }
    return json{{"ar_steps", cost.ar_steps},
                {"token_diffusion_steps", cost.token_diffusion_steps},
                {"per_stage", std::move(stages)}};
}

json model_params_to_json(const ModelParams& params) {
    json j{{"h", params.shape.h}, {"w", params.shape.w}, {"d", params.diag}, {"rho", params.rho}};
    j["rho_map"] = params.rho_map ? json(*params.rho_map) : json(nullptr);
    return j;
}

ModelParams model_params_from_json(const json& j) {
    ModelParams params;
    params.shape = {field<int>(j, "h"), field<int>(j, "w")};
    params.diag = field<double>(j, "d");
    params.rho = field<double>(j, "rho");
    if (j.contains("rho_map") && !j.at("rho_map").is_null()) {
        params.rho_map = field<std::vector<double>>(j, "rho_map");
    }
    return params;
}

GmrfModel build_model(const ModelParams& params) {
    std::span<const double> rho_map;
    if (params.rho_map) rho_map = *params.rho_map;
    return build_grid_gmrf(params.shape, params.rho, params.diag, rho_map);
}

json law_to_json(const GaussianLaw& law) {
    std::vector<double> mean(law.mean.data(), law.mean.data() + law.mean.size());
    std::vector<double> cov;
    cov.reserve(static_cast<std::size_t>(law.covariance.size()));
    for (Eigen::Index r = 0; r < law.covariance.rows(); ++r) {
        for (Eigen::Index c = 0; c < law.covariance.cols(); ++c) cov.push_back(law.covariance(r, c));
    }
    return json{{"mean", std::move(mean)}, {"covariance", std::move(cov)}};
}

GaussianLaw law_from_json(const json& j) {
    const auto mean = field<std::vector<double>>(j, "mean");
    const auto cov = field<std::vector<double>>(j, "covariance");
    const auto n = static_cast<Eigen::Index>(mean.size());
    if (cov.size() != mean.size() * mean.size()) {
        throw ParseError("covariance length must be mean length squared");
    }
    GaussianLaw law;
    law.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), n);
    law.covariance.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            law.covariance(r, c) = cov[static_cast<std::size_t>(r * n + c)];
        }
    }
    return law;
}

std::vector<std::pair<int, std::vector<double>>> vectors_from_csv(const std::string& text) {
    std::vector<std::pair<int, std::vector<double>>> rows;
    std::istringstream lines(text);
    std::string line;
    std::size_t dim = 0;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<double> values;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ParseError("line " + std::to_string(line_no) + ": bad number \"" + cell + "\"");
            }
        }
        if (values.size() < 3) {
            throw ParseError("line " + std::to_string(line_no) + ": need index plus >= 2 components");
        }
        const double index = values.front();
        if (index != std::floor(index)) {
            throw ParseError("line " + std::to_string(line_no) + ": index must be an integer");
        }
        values.erase(values.begin());
        if (dim == 0) {
            dim = values.size();
        } else if (values.size() != dim) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                             " components, got " + std::to_string(values.size()));
        }
        rows.emplace_back(static_cast<int>(index), std::move(values));
    }
    if (rows.empty()) throw ParseError("no data rows");
    return rows;
}

std::string scores_to_csv(const std::vector<int>& positions, const std::vector<double>& scores,
                          const std::vector<bool>& selected) {
    if (positions.size() != scores.size() || positions.size() != selected.size()) {
        throw InvalidArgument("positions, scores, selected must have equal lengths");
    }
    std::string out = "position,score,selected\n";
    for (std::size_t i = 0; i < positions.size(); ++i) {
        out += std::to_string(positions[i]);
        out += ',';
        out += format_double(scores[i]);
        out += ',';
        out += selected[i] ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string pgm_from_grid(const std::vector<double>& values, GridShape shape) {
    require_valid(shape);
    if (static_cast<int>(values.size()) != shape.tokens()) {
        throw InvalidArgument("got " + std::to_string(values.size()) + " values for a " +
                              std::to_string(shape.h) + "x" + std::to_string(shape.w) + " grid");
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double span = *hi_it - lo;

    std::string out = "P2\n" + std::to_string(shape.w) + " " + std::to_string(shape.h) + "\n255\n";
    for (int i = 0; i < shape.h; ++i) {
        for (int j = 0; j < shape.w; ++j) {
            const double v = values[static_cast<std::size_t>(raster_index({i, j}, shape))];
            const int gray = span > 0.0 ? static_cast<int>(std::lround((v - lo) / span * 255.0)) : 0;
            out += std::to_string(gray);
            out += (j + 1 == shape.w) ? '\n' : ' ';
        }
    }
    return out;
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidArgument("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out.flush()) throw InvalidArgument("write to " + tmp.string() + " failed");
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace gtr
