#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gibbslab/cli.hpp"
#include "gibbslab/common.hpp"
#include <unistd.h>

using namespace gibbslab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("gibbslab_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

std::string write_config(const TempDir& dir, const json& cfg, const std::string& name = "cfg.json") {
    const auto p = dir.path / name;
    std::ofstream os(p);
    os << cfg.dump(2);
    return p.string();
}

json base_config() {
    return {
        {"experiment", "exponential_law"},
        {"model", {{"preset", "iid"}, {"p", {0.5, 0.5}}}},
        {"d", 2},
        {"n", 1},
        {"M", 300},
        {"seed", 12},
        {"t_max", 2.5},
    };
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_THROWS_AS(validate_config(json{{"experiment", "exponential_law"}}), ValidationError);

    json bad_m = base_config();
    bad_m["M"] = -5;
    CHECK_THROWS_AS(validate_config(bad_m), ValidationError);

    json unknown = base_config();
    unknown["surprise"] = 1;
    CHECK_THROWS_AS(validate_config(unknown), ValidationError);

    json bad_exp = base_config();
    bad_exp["experiment"] = "teleportation";
    CHECK_THROWS_AS(validate_config(bad_exp), ValidationError);

    json bad_model = base_config();
    bad_model["model"] = {{"preset", "iid"}, {"p", {0.5, 0.6}}};
    CHECK_THROWS_AS(validate_config(bad_model), ValidationError);

    const json ok = validate_config(base_config());
    CHECK(ok.at("workers").get<long long>() >= 1);
}

TEST_CASE("config hash ignores runtime-only knobs") {
    json a = validate_config(base_config());
    json b = a;
    b["workers"] = 7;
    b["output"] = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    json c = a;
    c["seed"] = 999;
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("load_config applies dotted overrides") {
    TempDir dir;
    const std::string path = write_config(dir, base_config());
    const json cfg = load_config(path, {"M=500", "model.p=[0.3,0.7]"});
    CHECK(cfg.at("M").get<int>() == 500);
    CHECK(cfg.at("model").at("p")[1].get<double>() == 0.7);
}

TEST_CASE("run_experiment_config is deterministic modulo the timestamp") {
    const json cfg = validate_config(base_config());
    json a = run_experiment_config(cfg);
    json b = run_experiment_config(cfg);
    a.erase("generated_at");
    b.erase("generated_at");
    CHECK(a.dump() == b.dump());
    CHECK(a.contains("config_hash"));
    CHECK(a.at("version").get<std::string>() == std::string(kVersion));
    CHECK(a.at("csv").contains("survival.csv"));
    CHECK(a.at("target_provenance").get<std::string>().find("closed-form") != std::string::npos);
}

TEST_CASE("cli run writes outputs atomically and respects exit codes") {
    TempDir dir;
    const std::string path = write_config(dir, base_config());
    const std::string out = (dir.path / "out").string();

    SUBCASE("successful run writes result and curves, exit 0") {
        const int rc = run_cli({"run", path, "--out", out, "--workers", "2"});
        CHECK(rc == 0);
        CHECK(fs::exists(out + "/result.json"));
        CHECK(fs::exists(out + "/survival.csv"));
        CHECK(fs::exists(out + "/records.csv"));
        for (const auto& e : fs::directory_iterator(out)) {
            CHECK(e.path().extension() != ".tmp");
        }
        std::ifstream is(out + "/result.json");
        const json result = json::parse(is);
        CHECK(result.at("config").at("M").get<int>() == 300);
    }

    SUBCASE("tolerance failure exits 2") {
        const int rc = run_cli({"run", path, "--out", out, "--set", "tolerances.sup_gap=1e-9"});
        CHECK(rc == 2);
    }

    SUBCASE("invalid config exits 1 and writes nothing") {
        const int rc = run_cli({"run", path, "--out", out, "--set", "M=-3"});
        CHECK(rc == 1);
        CHECK_FALSE(fs::exists(out + "/result.json"));
    }

    SUBCASE("usage errors exit 1") {
        CHECK(run_cli({"run"}) == 1);
        CHECK(run_cli({"frobnicate"}) == 1);
        CHECK(run_cli({"verify", "no-such-suite"}) == 1);
    }

    SUBCASE("help exits 0") { CHECK(run_cli({"--help"}) == 0); }
}

TEST_CASE("cli oracle dump") {
    TempDir dir;
    json cfg = base_config();
    cfg["K"] = 2;
    cfg["pattern"] = {{"values", {1, 0, 0, 1}}};
    const std::string path = write_config(dir, cfg);
    const std::string out = (dir.path / "oracle").string();
    CHECK(run_cli({"oracle", path, "--out", out}) == 0);
    std::ifstream is(out + "/hitting_law.csv");
    std::string header;
    std::getline(is, header);
    CHECK(header == "k,prob,prob_with_origin,mean_count,second_moment");
    std::ifstream js(out + "/hitting_law.json");
    const json table = json::parse(js);
    CHECK(table.at("model_hash").is_number());
    CHECK(table.at("prob").size() == 3);
}

TEST_CASE("cli sample dump carries sampler metadata") {
    TempDir dir;
    json cfg = base_config();
    cfg["n"] = 4;
    const std::string path = write_config(dir, cfg);
    const std::string out = (dir.path / "samples").string();
    CHECK(run_cli({"sample", path, "--count", "2", "--out", out}) == 0);
    std::ifstream is(out + "/sample_1.json");
    const json s = json::parse(is);
    CHECK(s.at("sampler").at("method").get<std::string>() == "iid");
    CHECK(s.at("values").size() == 25);
    CHECK(fs::exists(out + "/sample_1.txt"));
}

TEST_CASE("cli dobrushin report runs") {
    TempDir dir;
    json cfg = base_config();
    cfg["model"] = {{"preset", "ising"}, {"beta", 0.1}, {"J", 1.0}, {"h", 0.0}};
    const std::string path = write_config(dir, cfg);
    CHECK(run_cli({"dobrushin", path}) == 0);
}
