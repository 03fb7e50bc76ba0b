#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "driftguard/cli.hpp"

using namespace driftguard;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path tmp(const std::string& name) {
    const char* dir = std::getenv("DRIFTGUARD_TEST_TMP");
    return std::filesystem::path(dir ? dir : ".") / name;
}

std::string write(const std::string& name, const std::string& body) {
    const auto p = tmp(name);
    std::ofstream(p) << body;
    return p.string();
}

std::string confidence_csv(const std::string& name) {
    std::ostringstream body;
    body << "q\n";
    for (int i = 0; i < 600; ++i) body << (i < 300 ? 0.95 : 0.55) + 0.01 * (i % 5) << "\n";
    return write(name, body.str());
}

}  // namespace

TEST_CASE("usage errors exit 1") {
    auto r = invoke({});
    CHECK(r.code == cli::kExitConfig);
    r = invoke({"run", "--bogus"});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("--bogus") != std::string::npos);
    CHECK(r.err.find("Usage") != std::string::npos);
    r = invoke({"frobnicate"});
    CHECK(r.code == cli::kExitConfig);
    CHECK(invoke({"--help"}).code == cli::kExitOk);
}

TEST_CASE("detect validates lambda") {
    const auto csv = confidence_csv("conf.csv");
    const auto r = invoke({"detect", "--csv", csv, "--lambda", "1.5", "--delta", "100", "--nmax", "1000"});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("(0,1)") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("detect reports a drop") {
    const auto csv = confidence_csv("conf2.csv");
    const auto r = invoke({"detect", "--csv", csv, "--lambda", "0.05", "--delta", "50", "--nmax", "400",
                           "--stride", "10"});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(r.out.find("drift at sample") != std::string::npos);
    CHECK(r.out.find("drift events: 1") != std::string::npos);
}

TEST_CASE("detect rejects malformed input") {
    const auto bad = write("bad_conf.csv", "q\n0.5\nnope\n");
    const auto r = invoke({"detect", "--csv", bad, "--lambda", "0.05", "--delta", "10", "--nmax", "100"});
    CHECK(r.code == cli::kExitRuntime);
    CHECK(r.err.find(":3:") != std::string::npos);
}

TEST_CASE("run then report") {
    const auto out = tmp("report.json").string();
    const auto matrix = tmp("matrix.csv").string();
    const auto r = invoke({"run", "--method", "dawc", "--seed", "0", "--out", out, "--matrix-csv", matrix});
    REQUIRE(r.code == cli::kExitOk);
    std::ifstream in(out);
    const auto j = nlohmann::json::parse(in);
    CHECK(j["config"]["method"] == "dawc");
    CHECK(std::filesystem::file_size(matrix) > 0);

    const auto s = invoke({"report", "--in", out});
    CHECK(s.code == cli::kExitOk);
    CHECK(s.out.find("drift events: 3") != std::string::npos);
    CHECK(s.out.find("AA: ") != std::string::npos);
}

TEST_CASE("run honours a config file") {
    const auto cfg = write("cfg.json", R"({"method": "stl", "seed": 3,
        "stream": {"task_count": 1, "samples_per_task": 400}})");
    const auto r = invoke({"run", "--config", cfg});
    REQUIRE(r.code == cli::kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["config"]["method"] == "stl");
    CHECK(j["config"]["seed"] == 3);
    CHECK(j["drift_events"].empty());
}

TEST_CASE("bad configs exit 1") {
    const auto typo = write("typo.json", R"({"detector": {"lamda": 0.1}})");
    auto r = invoke({"run", "--config", typo});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("lamda") != std::string::npos);

    const auto range = write("range.json", R"({"detector": {"lambda": 2.0}})");
    CHECK(invoke({"run", "--config", range}).code == cli::kExitConfig);
    CHECK(invoke({"run", "--method", "maml"}).code == cli::kExitConfig);
    CHECK(invoke({"report", "--in", tmp("missing.json").string()}).code == cli::kExitConfig);
}
