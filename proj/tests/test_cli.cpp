#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include <crossnet/io.hpp>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

// run the built binary, capture stdout, fold stderr away
RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(CROSSNET_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), n);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

struct OutDir {
    std::filesystem::path p;
    explicit OutDir(const char* leaf)
        : p(std::filesystem::temp_directory_path() / "crossnet_cli_test" / leaf) {
        std::filesystem::remove_all(p);
    }
    ~OutDir() { std::filesystem::remove_all(p); }
    std::string str() const { return p.string(); }
};

}  // namespace

TEST_CASE("projection golden output") {
    const RunResult r = run_cli("project --x 1,2");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out == "N 1.7320508075688772\n");

    const RunResult tie = run_cli("project --x -0.5,0.5");
    REQUIRE(tie.exit_code == 0);
    REQUIRE(tie.out == "O 0\n");
}

TEST_CASE("limit golden outputs") {
    // the exact diagonal heading from the junction stays pinned forever
    const RunResult r = run_cli("limit --start O --theta 0.7853981634");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out == "0 inf O 0 0\n");

    const RunResult two = run_cli("limit --start N,1 --theta 3.9269908169872414 --eval 2.5");
    REQUIRE(two.exit_code == 0);
    REQUIRE(two.out.find("W") != std::string::npos);
    REQUIRE(two.out.find("at 2.5: W") != std::string::npos);
}

TEST_CASE("usage errors exit with status two") {
    REQUIRE(run_cli("project").exit_code == 2);
    REQUIRE(run_cli("zzz").exit_code == 2);
    REQUIRE(run_cli("project --x 1,2,3").exit_code == 2);
    REQUIRE(run_cli("limit --start Q,1 --theta 0").exit_code == 2);
    REQUIRE(run_cli("scenario not-a-scenario").exit_code == 2);
    REQUIRE(run_cli("value2d --eps 0.2 --region 2,-2").exit_code == 2);
}

TEST_CASE("help is success") {
    REQUIRE(run_cli("--help").exit_code == 0);
    REQUIRE(run_cli("simulate --help").exit_code == 0);
}

TEST_CASE("selftest passes") {
    const RunResult r = run_cli("selftest");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("ok   penalty-identities") != std::string::npos);
    REQUIRE(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("simulate writes a checksummed table") {
    OutDir d("sim");
    const RunResult r =
        run_cli("simulate --eps 1e-3 --x 1,1 --theta 0 --horizon 0.5 --out " + d.str());
    REQUIRE(r.exit_code == 0);
    const std::string csv = d.str() + "/trajectory.csv";
    REQUIRE(std::filesystem::exists(csv));

    const crossnet::ordered_json m = crossnet::read_json(d.str() + "/manifest.json");
    REQUIRE(m.at("schema") == "crossnet-trajectory/1");
    REQUIRE(m.at("eps").get<double>() == 1e-3);
    REQUIRE(m.at("csv_fnv1a64").get<std::string>() ==
            crossnet::checksum_hex(crossnet::fnv1a64_file(csv)));

    // the table parses and starts at the requested point
    const auto samples = crossnet::read_trajectory_csv(csv);
    REQUIRE(samples.t.front() == 0.0);
    REQUIRE(samples.x.front() == crossnet::Vec2{1.0, 1.0});
}

TEST_CASE("scenario subcommand runs from a config file") {
    OutDir d("scen");
    std::filesystem::create_directories(d.str());
    crossnet::ordered_json cfg;
    cfg["schema_version"] = "crossnet-config/1";
    cfg["scenario"] = "zeno";
    cfg["out_dir"] = d.str() + "/out";
    cfg["params"]["depth"] = 5;
    crossnet::write_json(d.str() + "/cfg.json", cfg);

    const RunResult r = run_cli("scenario --config " + d.str() + "/cfg.json");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("zeno") != std::string::npos);
    REQUIRE(std::filesystem::exists(d.str() + "/out/manifest.json"));

    // a name disagreeing with the config is a usage error
    REQUIRE(run_cli("scenario tracking --config " + d.str() + "/cfg.json").exit_code == 2);
}

TEST_CASE("network value solve prints the junction value") {
    OutDir d("vnet");
    const RunResult r =
        run_cli("valuenet --cost norm --lambda 1 --radius 2 --grid-h 0.01 --out " + d.str());
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("junction 0\n") != std::string::npos);
    REQUIRE(std::filesystem::exists(d.str() + "/valuenet.csv"));
}
