#include "lppd/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    int status;
    std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "lppd");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int status = lppd::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lppd-test-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<fs::path> runs_in(const fs::path& root) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(root)) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("missing required flag is a usage error with no output") {
    const fs::path root = scratch("usage");
    const Outcome o = invoke({"duality", "--m", "4", "--samples", "200", "--seed", "1", "--out", root.string()});
    CHECK(o.status == lppd::cli::exit_usage);
    CHECK(o.err.find("n") != std::string::npos);
    CHECK(runs_in(root).empty());

    CHECK(invoke({"nonsense"}).status == lppd::cli::exit_usage);
    CHECK(invoke({"duality", "--m", "four"}).status == lppd::cli::exit_usage);
    CHECK(invoke({"gcurve", "--m", "16", "--samples", "100", "--seed", "1", "--r-grid", "1,x",
                  "--out", root.string()})
              .status == lppd::cli::exit_usage);
    CHECK(runs_in(root).empty());
}

TEST_CASE("validate reports every violation") {
    const Outcome o = invoke({"validate", "duality", "--m", "8", "--n", "8", "--samples", "5"});
    CHECK(o.status == lppd::cli::exit_ok);
    const json j = json::parse(o.out);
    CHECK(j.at("command") == "duality");
    const auto v = j.at("violations").get<std::vector<std::string>>();
    bool order = false, samples = false, seed = false;
    for (const auto& s : v) {
        order |= s.find("n > m") != std::string::npos;
        samples |= s.find("samples") != std::string::npos;
        seed |= s.find("seed") != std::string::npos;
    }
    CHECK(order);
    CHECK(samples);
    CHECK(seed);

    const json ok = json::parse(invoke({"validate", "fcdf", "--n", "64", "--samples", "100", "--seed", "2"}).out);
    CHECK(ok.at("violations").empty());
    CHECK(ok.at("config_hash").get<std::string>().size() == 16);
}

TEST_CASE("runs are byte-identical across worker counts") {
    const fs::path root = scratch("determinism");
    const std::vector<std::string> base = {"duality", "--m", "2", "--n", "8", "--samples", "200", "--seed", "11",
                                           "--out", root.string()};
    auto with_workers = [&](const char* w) {
        auto a = base;
        a.push_back("--workers");
        a.push_back(w);
        return invoke(a);
    };
    const Outcome one = with_workers("1");
    const Outcome two = with_workers("2");
    CHECK(one.status != lppd::cli::exit_usage);
    CHECK(one.status != lppd::cli::exit_runtime);
    CHECK(one.status == two.status);
    const auto dirs = runs_in(root);
    REQUIRE(dirs.size() == 2);
    CHECK(dirs[1].string() == dirs[0].string() + ".1");
    CHECK(slurp(dirs[0] / "duality.csv") == slurp(dirs[1] / "duality.csv"));

    const json m = json::parse(slurp(dirs[0] / "manifest.json"));
    CHECK(m.at("command") == "duality");
    CHECK(m.at("master_seed") == 11);
    CHECK(m.at("config").at("m") == 2);
    CHECK(m.at("files").size() == 1);
    CHECK(m.at("config_hash") == dirs[0].filename().string().substr(8));
}

TEST_CASE("config file values are overridden by flags") {
    const fs::path root = scratch("config");
    const fs::path cfg = root / "cfg.json";
    {
        std::ofstream out(cfg);
        out << R"({"n": 64, "samples": 100, "seed": 3, "s_grid": [-1, 0, 1]})";
    }
    const Outcome v = invoke({"validate", "fcdf", "--config", cfg.string(), "--seed", "9"});
    const json j = json::parse(v.out);
    CHECK(j.at("params").at("seed") == 9);
    CHECK(j.at("params").at("n") == 64);
    CHECK(j.at("params").at("s_grid").size() == 3);

    const fs::path out = root / "runs";
    const Outcome r = invoke({"fcdf", "--config", cfg.string(), "--out", out.string()});
    CHECK(r.status != lppd::cli::exit_usage);
    const auto dirs = runs_in(out);
    REQUIRE(dirs.size() == 1);
    const std::string csv = slurp(dirs[0] / "fcdf.csv");
    CHECK(csv.rfind("s,n,S,F_hat,dkw\n", 0) == 0);

    {
        std::ofstream bad(root / "bad.json");
        bad << R"({"workers": "lots"})";
    }
    CHECK(invoke({"fcdf", "--config", (root / "bad.json").string(), "--out", out.string()}).status ==
          lppd::cli::exit_usage);
}
