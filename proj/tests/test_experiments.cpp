#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include <crossnet/experiments.hpp>

using namespace crossnet;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    return std::string((std::istreambuf_iterator<char>(f)), {});
}

struct OutDir {
    std::filesystem::path p;
    explicit OutDir(const char* leaf)
        : p(std::filesystem::temp_directory_path() / "crossnet_exp_test" / leaf) {
        std::filesystem::remove_all(p);
    }
    ~OutDir() { std::filesystem::remove_all(p); }
    std::string str() const { return p.string(); }
};

}  // namespace

TEST_CASE("experiment configs") {
    ordered_json j;
    j["schema_version"] = "crossnet-config/1";
    j["scenario"] = "zeno";
    j["out_dir"] = "somewhere";
    j["params"]["depth"] = 6;
    const ExperimentConfig c = ExperimentConfig::from_json(j);
    REQUIRE(c.scenario == "zeno");
    REQUIRE(c.out_dir == "somewhere");
    REQUIRE(c.integer("depth", 10) == 6);
    REQUIRE(c.num("probe_t", 0.375) == 0.375);
    REQUIRE(c.num_list("eps", {1e-3}) == std::vector<double>{1e-3});

    SECTION("round-trip") {
        const ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
        REQUIRE(back.scenario == c.scenario);
        REQUIRE(back.params == c.params);
    }
    SECTION("rejects bad schema") {
        ordered_json bad = j;
        bad["schema_version"] = "crossnet-config/2";
        REQUIRE_THROWS(ExperimentConfig::from_json(bad));
    }
    SECTION("rejects unknown top-level keys") {
        ordered_json bad = j;
        bad["scenari0"] = "zeno";
        REQUIRE_THROWS(ExperimentConfig::from_json(bad));
    }
}

TEST_CASE("scenario registry") {
    REQUIRE(scenario_names().size() == 7);
    ExperimentConfig c;
    c.scenario = "not-a-scenario";
    c.out_dir = (std::filesystem::temp_directory_path() / "crossnet_exp_none").string();
    REQUIRE_THROWS(run_scenario(c));
}

TEST_CASE("dyadic chattering scenario passes and is reproducible") {
    OutDir d1("zeno_a"), d2("zeno_b");
    ExperimentConfig c;
    c.scenario = "zeno";
    c.out_dir = d1.str();
    c.params["depth"] = 6;
    c.params["eps"] = {1e-3, 1e-4};
    const ScenarioResult r1 = run_scenario(c);
    REQUIRE(r1.pass);
    REQUIRE(r1.manifest.at("schema") == "crossnet-manifest/1");
    REQUIRE(r1.manifest.at("pass").get<bool>());

    // artifact checksums in the manifest match the files on disk
    for (const auto& a : r1.manifest.at("artifacts")) {
        const std::string f = d1.str() + "/" + a.at("file").get<std::string>();
        REQUIRE(std::filesystem::exists(f));
        REQUIRE(a.at("fnv1a64").get<std::string>() == checksum_hex(fnv1a64_file(f)));
    }

    // a rerun with the same params produces byte-identical outputs
    c.out_dir = d2.str();
    run_scenario(c);
    REQUIRE(slurp(d1.str() + "/manifest.json") == slurp(d2.str() + "/manifest.json"));
    REQUIRE(slurp(d1.str() + "/zeno_samples.csv") == slurp(d2.str() + "/zeno_samples.csv"));
    REQUIRE(slurp(d1.str() + "/zeno_limit.json") == slurp(d2.str() + "/zeno_limit.json"));
}

TEST_CASE("scaling scenario with overridden parameters") {
    OutDir d("scaling");
    ExperimentConfig c;
    c.scenario = "scaling-law";
    c.out_dir = d.str();
    c.params["count"] = 4;
    c.params["rho"] = 1.7;
    const ScenarioResult r = run_scenario(c);
    REQUIRE(r.pass);
    // effective parameters (defaults merged with overrides) are recorded
    REQUIRE(r.manifest.at("params").at("count").get<int>() == 4);
    REQUIRE(r.manifest.at("params").at("rho").get<double>() == 1.7);
    REQUIRE(r.manifest.at("params").at("eps").get<double>() == 1e-3);
}

TEST_CASE("summary table") {
    OutDir d("summary");
    ExperimentConfig c;
    c.scenario = "counterexample";
    c.out_dir = d.str();
    c.params["lambdas"] = {0.5, 1.0};
    const ScenarioResult r = run_scenario(c);
    REQUIRE(r.pass);
    const std::string table = summarize({r.manifest_path});
    REQUIRE(table.find("counterexample") != std::string::npos);
    REQUIRE(table.find("3/3") != std::string::npos);
    REQUIRE(table.find("pass") != std::string::npos);
    REQUIRE(table.find("FAIL") == std::string::npos);
}
