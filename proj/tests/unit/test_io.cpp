#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gtr/io.hpp"

using namespace gtr;
namespace fs = std::filesystem;

namespace {

const DiffusionSchedule kSched{50, 20, 20, 50, 0.1};

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "gtr_io_test";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("partition JSON round trip") {
    const StagePartition p = partition_stages({4, 4}, 3);
    const nlohmann::json j = partition_to_json(p);
    CHECK(j.at("h") == 4);
    CHECK(j.at("K") == 3);
    CHECK(j.at("stages").size() == 3);
    CHECK(j.at("stages")[0][0] == nlohmann::json::array({0, 0}));

    const StagePartition back = partition_from_json(j);
    CHECK(back.shape == p.shape);
    CHECK(back.stages == p.stages);

    nlohmann::json bad = j;
    bad["K"] = 5;
    CHECK_THROWS_AS(partition_from_json(bad), ParseError);
    bad = j;
    bad.erase("stages");
    CHECK_THROWS_AS(partition_from_json(bad), ParseError);
}

TEST_CASE("plan JSON round trip") {
    const StagePartition p = partition_stages({8, 8}, 3);
    const SamplingPlan plan = build_plan(p, {{3.2, 8.0, 32.0}}, kSched, 42);
    const nlohmann::json j = plan_to_json(plan);
    CHECK(j.at("seed") == 42);
    CHECK(j.at("steps").size() == 8);

    const SamplingPlan back = plan_from_json(j);
    CHECK(back.shape == plan.shape);
    CHECK(back.seed == plan.seed);
    CHECK(back.steps == plan.steps);

    nlohmann::json bad = j;
    bad["steps"][0]["t"].erase(0);
    CHECK_THROWS_AS(plan_from_json(bad), ParseError);
}

TEST_CASE("cost JSON shape") {
    const SamplingPlan plan = plan_from_order({4, 4}, order_raster({4, 4}), 4, 25);
    const nlohmann::json j = cost_to_json(count_cost(plan));
    CHECK(j.at("ar_steps") == 4);
    CHECK(j.at("token_diffusion_steps") == 400);
    CHECK(j.at("per_stage")[0].at("stage") == 1);
}

TEST_CASE("model params JSON round trip, with and without rho_map") {
    ModelParams params;
    const nlohmann::json j = model_params_to_json(params);
    CHECK(j.at("rho_map").is_null());
    const ModelParams back = model_params_from_json(j);
    CHECK(back.shape == params.shape);
    CHECK(back.rho == params.rho);
    CHECK(!back.rho_map);

    ModelParams het = params;
    het.shape = {2, 2};
    het.rho_map = std::vector<double>{0.1, 0.2, 0.2, 0.1};
    const ModelParams het_back = model_params_from_json(model_params_to_json(het));
    REQUIRE(het_back.rho_map);
    CHECK(*het_back.rho_map == *het.rho_map);

    const GmrfModel model = build_model(het_back);
    CHECK(model.dim() == 4);
}

TEST_CASE("law JSON round trip is exact") {
    const GmrfModel model = build_model(ModelParams{{3, 3}, 1.0, 0.2, {}});
    const GaussianLaw law{model.mean, model.covariance};
    const GaussianLaw back = law_from_json(law_to_json(law));
    CHECK((back.mean - law.mean).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.covariance - law.covariance).cwiseAbs().maxCoeff() == 0.0);

    nlohmann::json bad = law_to_json(law);
    bad["covariance"].erase(0);
    CHECK_THROWS_AS(law_from_json(bad), ParseError);
}

TEST_CASE("vectors_from_csv") {
    const auto rows = vectors_from_csv("0,1.5,2.5\n1,-1,0.25\n\n2,3,4\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].first == 0);
    CHECK(rows[1].second == std::vector<double>{-1.0, 0.25});

    CHECK_THROWS_AS(vectors_from_csv("0,1,2\n1,1\n"), ParseError);      // ragged
    CHECK_THROWS_AS(vectors_from_csv("0,1,abc\n"), ParseError);         // non-numeric
    CHECK_THROWS_AS(vectors_from_csv("0,1\n"), ParseError);             // too few components
    CHECK_THROWS_AS(vectors_from_csv("0.5,1,2\n"), ParseError);         // fractional index
    CHECK_THROWS_AS(vectors_from_csv(""), ParseError);                  // empty
}

TEST_CASE("scores_to_csv") {
    const std::string csv = scores_to_csv({0, 1, 2}, {1.5, 0.0, 2.25}, {false, false, true});
    CHECK(csv == "position,score,selected\n0,1.5,0\n1,0,0\n2,2.25,1\n");
    CHECK_THROWS_AS(scores_to_csv({0}, {1.0, 2.0}, {true}), InvalidArgument);
}

TEST_CASE("pgm_from_grid") {
    const std::string pgm = pgm_from_grid({0.0, 1.0, 0.5, 0.25}, {2, 2});
    CHECK(pgm == "P2\n2 2\n255\n0 255\n128 64\n");
    // constant grids render as all-zero rather than dividing by zero
    CHECK(pgm_from_grid({3.0, 3.0}, {1, 2}) == "P2\n2 1\n255\n0 0\n");
    CHECK_THROWS_AS(pgm_from_grid({1.0}, {2, 2}), InvalidArgument);
}

TEST_CASE("format_double is locale-free and stable") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-3.0) == "-3");
    CHECK(format_double(1e-9) == "1e-09");
    CHECK(format_double(1234567.25) == "1234567.25");
}

TEST_CASE("write_file_atomic") {
    const fs::path dir = temp_dir();
    const fs::path target = dir / "out.json";
    write_file_atomic(target, "hello\n");
    CHECK(read_file(target) == "hello\n");
    CHECK(!fs::exists(target.string() + ".tmp"));
    write_file_atomic(target, "replaced\n");
    CHECK(read_file(target) == "replaced\n");

    CHECK_THROWS_AS(read_file(dir / "does_not_exist"), InvalidArgument);
    CHECK_THROWS_AS(write_file_atomic(dir / "no_dir" / "x", "y"), InvalidArgument);
    fs::remove_all(dir);
}

TEST_SUITE_END();
