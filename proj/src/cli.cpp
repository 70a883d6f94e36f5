#include "lppd/cli.hpp"

#include "lppd/experiments.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace lppd::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt(bool v) { return v ? "true" : "false"; }
std::string fmt(const std::string& v) { return v; }
template <class I>
std::enable_if_t<std::is_integral_v<I>, std::string> fmt(I v) {
    return std::to_string(v);
}

/// Builds one CSV file row by row.
class Csv {
public:
    explicit Csv(std::initializer_list<const char*> header) {
        bool first = true;
        for (const char* h : header) {
            if (!first) text_ += ',';
            text_ += h;
            first = false;
        }
        text_ += '\n';
    }
    template <class... T>
    void row(const T&... cells) {
        bool first = true;
        ((text_ += (first ? "" : ","), text_ += fmt(cells), first = false), ...);
        text_ += '\n';
    }
    const std::string& text() const { return text_; }

private:
    std::string text_;
};

struct Gate {
    std::string name;
    bool pass = false;
    json detail;
};

struct Report {
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<Gate> gates;
    json summary = json::object();
};

Coord geti(const json& p, const char* k) { return p.at(k).get<Coord>(); }
std::uint64_t getu(const json& p, const char* k) { return p.at(k).get<std::uint64_t>(); }
double getd(const json& p, const char* k) { return p.at(k).get<double>(); }
std::vector<double> getv(const json& p, const char* k) { return p.at(k).get<std::vector<double>>(); }

// ---------------------------------------------------------------------------

Report run_duality(const json& p, unsigned workers) {
    const DualityEstimate e = estimate_duality(geti(p, "m"), geti(p, "n"), getu(p, "samples"), getu(p, "seed"), workers);
    Report r;
    Csv csv({"m", "n", "S", "p_lhs", "se_lhs", "p_rhs", "se_rhs", "z", "excluded_lhs", "excluded_rhs"});
    csv.row(e.m, e.n, e.S, e.p_lhs, e.se_lhs, e.p_rhs, e.se_rhs, e.z, e.excluded_lhs, e.excluded_rhs);
    r.files.emplace_back("duality.csv", csv.text());
    r.gates.push_back({"z_score", e.z <= getd(p, "z_max"), {{"z", e.z}, {"max", getd(p, "z_max")}}});
    r.gates.push_back({"exclusions", !e.flagged, {{"excluded_lhs", e.excluded_lhs}, {"excluded_rhs", e.excluded_rhs}}});
    r.summary = {{"p_lhs", e.p_lhs}, {"p_rhs", e.p_rhs}, {"z", e.z}};
    return r;
}

void gcurve_gates(const GCurve& g, const json& p, Report& r) {
    r.gates.push_back({"T_at_least_m", g.below_m == 0, {{"below_m", g.below_m}}});
    bool strict = true;
    for (std::size_t k = 1; k < g.G_hat.size(); ++k) strict = strict && g.G_hat[k] < g.G_hat[k - 1];
    r.gates.push_back({"strictly_decreasing", strict, {{"G_hat", g.G_hat}}});
    const double floor = getd(p, "G_first_min");
    r.gates.push_back({"G_first_min", g.G_hat.front() >= floor, {{"r", g.r.front()}, {"G_hat", g.G_hat.front()}, {"min", floor}}});
    r.gates.push_back({"exclusions", g.rescaled.excluded_fraction() <= 0.01, {{"excluded", g.rescaled.excluded}}});
}

Report run_gcurve(const json& p, unsigned workers) {
    const GCurve g = estimate_G(getv(p, "r_grid"), geti(p, "m"), getu(p, "samples"), getu(p, "seed"), workers);
    Report r;
    Csv csv({"r", "m", "S", "G_hat", "dkw"});
    for (std::size_t k = 0; k < g.r.size(); ++k) csv.row(g.r[k], g.m, g.rescaled.values.size(), g.G_hat[k], g.dkw);
    r.files.emplace_back("gcurve.csv", csv.text());
    gcurve_gates(g, p, r);
    r.summary = {{"horizon", g.horizon}, {"G_hat", g.G_hat}};
    return r;
}

Report run_fcdf(const json& p, unsigned workers) {
    const FCdf f = estimate_F(getv(p, "s_grid"), geti(p, "n"), getu(p, "samples"), getu(p, "seed"), workers);
    Report r;
    Csv csv({"s", "n", "S", "F_hat", "dkw"});
    for (std::size_t k = 0; k < f.s.size(); ++k) csv.row(f.s[k], f.n, f.rescaled.values.size(), f.F_hat[k], f.dkw);
    r.files.emplace_back("fcdf.csv", csv.text());
    bool monotone = true;
    for (std::size_t k = 1; k < f.F_hat.size(); ++k) monotone = monotone && f.F_hat[k] >= f.F_hat[k - 1];
    r.gates.push_back({"monotone", monotone, {{"F_hat", f.F_hat}}});
    r.summary = {{"median_U", f.rescaled.distribution().median()}};
    return r;
}

Report run_lowtail(const json& p, unsigned workers) {
    const auto rows = check_lowtail(getv(p, "r_grid"), geti(p, "m"), geti(p, "n"), getu(p, "samples"),
                                    getu(p, "seed"), workers);
    Report r;
    Csv csv({"r", "lhs", "rhs", "pass", "G_hat", "eps_G", "eps_F"});
    for (const auto& row : rows) {
        csv.row(row.r, row.lhs(), row.F_diff, row.pass(), row.G_hat, row.eps_G, row.eps_F);
        r.gates.push_back({"lowtail_r=" + fmt(row.r), row.pass(), {{"lhs", row.lhs()}, {"rhs", row.F_diff}}});
    }
    r.files.emplace_back("lowtail.csv", csv.text());
    return r;
}

std::vector<double> profile_grid(const json& p) {
    const Coord n = geti(p, "n");
    if (!p.at("u_grid").is_null()) return getv(p, "u_grid");
    // Default: every lattice index z in [-n, n].
    std::vector<double> u;
    for (Coord z = -n; z <= n; ++z) u.push_back(static_cast<double>(z) / exit_scale(n));
    return u;
}

Report run_profiles(const json& p, unsigned workers) {
    const Coord n = geti(p, "n");
    const std::uint64_t S = getu(p, "samples"), seed = getu(p, "seed");
    const std::vector<double> grid = profile_grid(p);
    const auto samples = run_replicates(0, S, workers, [&](std::uint64_t k) {
        return rescaled_profiles(n, grid, experiment_seed(seed, "profiles/" + std::to_string(n), k));
    });
    Report r;
    Csv prof({"n", "u", "A_n", "B_n"});
    const RescaledSample& first = samples.front();
    for (std::size_t k = 0; k < grid.size(); ++k)
        prof.row(n, grid[k], first.a_values(static_cast<Eigen::Index>(k)), first.b_values(static_cast<Eigen::Index>(k)));
    Csv scalars({"n", "C_n", "U_n", "replicate", "argmax_in_grid", "max_matches"});
    std::uint64_t dominated_fail = 0, mismatch = 0;
    double c_sum = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto& s = samples[k];
        scalars.row(n, s.c_value, s.u_n, k, s.argmax_in_grid, s.max_matches);
        if (!s.dominated) ++dominated_fail;
        if (s.argmax_in_grid && !s.max_matches) ++mismatch;
        c_sum += s.c_value;
    }
    r.files.emplace_back("profiles.csv", prof.text());
    r.files.emplace_back("scalars.csv", scalars.text());
    const double c_mean = c_sum / static_cast<double>(samples.size());
    const auto band = getv(p, "C_mean_band");
    r.gates.push_back({"max_dominates_terms", dominated_fail == 0, {{"violations", dominated_fail}}});
    r.gates.push_back({"exact_max_on_grid", mismatch == 0, {{"mismatches", mismatch}}});
    r.gates.push_back({"C_mean_band", c_mean >= band.at(0) && c_mean <= band.at(1), {{"mean", c_mean}, {"band", band}}});
    r.summary = {{"C_mean", c_mean}};
    return r;
}

Report run_tree_check(const json& p, unsigned workers) {
    PathwiseOptions opts;
    opts.window = geti(p, "window_cap");
    const TreeCheckSummary s = tree_check(geti(p, "m"), geti(p, "n"), getu(p, "samples"), getu(p, "seed"), opts, workers);
    Report r;
    Csv csv({"replicate", "lhs", "rhs", "crossing_count", "N_used", "stabilized", "valid"});
    for (std::size_t k = 0; k < s.records.size(); ++k) {
        const auto& rec = s.records[k];
        csv.row(k, rec.lhs, rec.rhs, rec.crossing_count, rec.N_used, rec.stabilized, rec.valid);
    }
    r.files.emplace_back("treecheck.csv", csv.text());
    r.gates.push_back({"agreement", s.all_agree(), {{"agree", s.agree}, {"stabilized", s.stabilized}}});
    r.gates.push_back({"stabilization_failure_rate", s.failure_rate() <= getd(p, "max_failure_rate"),
                       {{"rate", s.failure_rate()}, {"invalid", s.invalid}}});
    r.summary = {{"agree", s.agree}, {"stabilized", s.stabilized}, {"failure_rate", s.failure_rate()}};
    return r;
}

void add_ks(Csv& csv, Report& r, const KsCheck& c, bool gating = true) {
    csv.row(c.name, c.samples, c.statistic, c.threshold, c.pass);
    if (gating) r.gates.push_back({c.name, c.pass, {{"statistic", c.statistic}, {"threshold", c.threshold}}});
}

Report run_burke(const json& p, unsigned workers) {
    const std::uint64_t S = getu(p, "samples"), seed = getu(p, "seed");
    Report r;
    Csv csv({"check", "samples", "statistic", "threshold", "pass"});
    add_ks(csv, r, burke_busemann(S, seed, geti(p, "busemann_N0"), geti(p, "window_cap"), workers));
    add_ks(csv, r, burke_increments(geti(p, "n"), S, seed, workers));
    const MeanCheck mc = burke_mean(geti(p, "mean_n"), getu(p, "mean_samples"), seed, workers);
    csv.row(std::string("lbar_mean_ratio"), mc.samples, mc.ratio, 0.01, mc.pass);
    r.gates.push_back({"lbar_mean_ratio", mc.pass, {{"ratio", mc.ratio}, {"n", mc.n}}});
    r.files.emplace_back("burke.csv", csv.text());
    return r;
}

Report run_tasep(const json& p, unsigned workers) {
    TasepOptions opts;
    opts.K = geti(p, "half_width");
    opts.start = palm_start_from_string(p.at("start").get<std::string>());
    opts.burn_in = getd(p, "burn_in");
    const std::uint64_t seed = getu(p, "seed");
    const TasepSummary s = tasep_experiment(getu(p, "samples"), seed, opts, workers);
    const DensityCheck d = tasep_density(geti(p, "density_half_width"), getu(p, "density_replicates"), seed, workers);
    Report r;
    Csv csv({"replicate", "i", "j", "G_value", "valid"});
    for (const auto& rep : s.replicates) {
        const auto& t = rep.table;
        for (std::int64_t i = t.i_lo; i <= t.i_hi; ++i)
            for (std::int64_t j = t.j_lo; j <= t.j_hi; ++j) csv.row(rep.index, i, j, t(i, j), t.valid);
    }
    r.files.emplace_back("tasep.csv", csv.text());
    Csv checks({"check", "samples", "statistic", "threshold", "pass"});
    checks.row(std::string("G00_zero"), s.valid, 0.0, 0.0, s.g00_zero);
    r.gates.push_back({"G00_zero", s.g00_zero, {{"valid", s.valid}}});
    add_ks(checks, r, s.ks_g11);
    // Under the re-rooting surrogate the past is biased; reported, not gated.
    for (const auto& c : s.reverse) add_ks(checks, r, c, false);
    double worst = 0.0;
    for (double x : d.densities) worst = std::max(worst, std::abs(x - 0.5));
    checks.row(std::string("density_after_K_over_4"), d.densities.size(), worst, d.band, d.pass);
    r.gates.push_back({"density", d.pass, {{"max_deviation", worst}, {"band", d.band}}});
    r.files.emplace_back("tasep_checks.csv", checks.text());
    r.summary = {{"valid", s.valid}, {"ks_G11", s.ks_g11.statistic}};
    return r;
}

Report run_massfield(const json& p, unsigned) {
    Eigen::ArrayXd masses;
    const KsCheck c = mass_field_check(getd(p, "rho"), geti(p, "n"), geti(p, "samples"), getu(p, "seed"), &masses);
    Report r;
    Csv csv({"site", "mass"});
    for (Eigen::Index k = 0; k < masses.size(); ++k) csv.row(static_cast<Coord>(k + 1), masses(k));
    r.files.emplace_back("massfield.csv", csv.text());
    Csv checks({"check", "samples", "statistic", "threshold", "pass"});
    add_ks(checks, r, c);
    r.files.emplace_back("massfield_checks.csv", checks.text());
    return r;
}

using Runner = Report (*)(const json&, unsigned);

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> table{
        {"duality", run_duality},   {"gcurve", run_gcurve},         {"fcdf", run_fcdf},
        {"lowtail", run_lowtail},   {"profiles", run_profiles},     {"tree-check", run_tree_check},
        {"burke", run_burke},       {"tasep", run_tasep},           {"massfield", run_massfield},
    };
    return table;
}

std::string fnv_hex(const std::string& s) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(tag_hash(s)));
    return buf;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw ResourceError("cannot write " + path.string());
}

bool increasing(const json& grid) {
    if (!grid.is_array() || grid.empty()) return false;
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k].get<double>() > grid[k - 1].get<double>())) return false;
    return true;
}

} // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, fn] : runners()) v.push_back(name);
        return v;
    }();
    return names;
}

json default_params(const std::string& command) {
    if (command == "duality") return {{"z_max", 3.0}};
    if (command == "gcurve") return {{"r_grid", {0.2, 1.0, 4.0}}, {"G_first_min", 0.8}};
    if (command == "fcdf") return {{"s_grid", {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0}}};
    if (command == "lowtail") return {{"r_grid", {1.0, 2.0, 4.0}}};
    if (command == "profiles") return {{"u_grid", nullptr}, {"C_mean_band", {-1.0, 0.2}}};
    if (command == "tree-check")
        return {{"m", 8}, {"n", 64}, {"samples", 200}, {"window_cap", 256}, {"max_failure_rate", 0.05}};
    if (command == "burke")
        return {{"samples", 10000}, {"n", 64},        {"window_cap", 4096},
                {"busemann_N0", 64}, {"mean_n", 500}, {"mean_samples", 2000}};
    if (command == "tasep")
        return {{"samples", 5000}, {"half_width", 64}, {"start", "conditioned"}, {"burn_in", -1.0},
                {"density_half_width", 1024}, {"density_replicates", 16}};
    if (command == "massfield") return {{"n", 32}, {"samples", 10000}, {"rho", 0.5}};
    throw DomainError("unknown command '" + command + "'");
}

std::vector<std::string> required_params(const std::string& command) {
    std::vector<std::string> req{"seed"};
    if (command == "duality") req.insert(req.end(), {"m", "n", "samples"});
    if (command == "gcurve") req.insert(req.end(), {"m", "samples"});
    if (command == "fcdf") req.insert(req.end(), {"n", "samples"});
    if (command == "lowtail") req.insert(req.end(), {"m", "n", "samples"});
    if (command == "profiles") req.insert(req.end(), {"n", "samples"});
    return req;
}

std::vector<std::string> violations(const ExperimentConfig& config) {
    std::vector<std::string> v;
    if (!runners().count(config.command)) return {"unknown command '" + config.command + "'"};
    const json& p = config.params;
    const json defaults = default_params(config.command);
    for (const auto& key : required_params(config.command))
        if (!p.contains(key) || p.at(key).is_null()) v.push_back("missing required parameter '" + key + "'");
    for (const auto& [key, value] : p.items())
        if (!defaults.contains(key) && std::find(required_params(config.command).begin(),
                                                 required_params(config.command).end(),
                                                 key) == required_params(config.command).end())
            v.push_back("unknown parameter '" + key + "' for " + config.command);
    // Domain checks skip missing values, so every problem is reported at once.
    auto num = [&](const char* k) {
        return p.contains(k) && !p.at(k).is_null() ? p.at(k).get<double>() : std::nan("");
    };
    const bool has_m = p.contains("m"), has_n = p.contains("n");
    if (has_m && num("m") < 1) v.push_back("m must be >= 1");
    if (has_m && has_n && config.command != "profiles" && config.command != "fcdf" && config.command != "burke" &&
        config.command != "massfield" && num("n") <= num("m"))
        v.push_back("n must exceed m: the duality formula holds for n > m");
    if (p.contains("samples") && num("samples") < 100) v.push_back("samples must be >= 100");
    for (const char* g : {"r_grid", "s_grid"})
        if (p.contains(g) && !increasing(p.at(g))) v.push_back(std::string(g) + " must be a non-empty increasing list");
    if (config.command == "gcurve" && num("m") < 16) v.push_back("gcurve needs m >= 16");
    if (config.command == "gcurve" && increasing(p.at("r_grid")) && p.at("r_grid").at(0).get<double>() < 0)
        v.push_back("r_grid entries must be non-negative");
    if (config.command == "lowtail" && increasing(p.at("r_grid")) && p.at("r_grid").at(0).get<double>() <= 0)
        v.push_back("r_grid entries must be positive");
    if (config.command == "fcdf" && num("n") < 64) v.push_back("fcdf needs n >= 64");
    if (config.command == "profiles") {
        if (num("n") < 1) v.push_back("n must be >= 1");
        else if (!p.at("u_grid").is_null() && p.contains("n")) {
            if (!increasing(p.at("u_grid"))) v.push_back("u_grid must be a non-empty increasing list");
            else
                for (double u : p.at("u_grid").get<std::vector<double>>())
                    if (std::abs(u) > profile_u_limit(p.at("n").get<Coord>())) {
                        v.push_back("u_grid entry " + fmt(u) + " exceeds 2^{-5/3} n^{1/3}");
                        break;
                    }
        }
    }
    if (config.command == "tree-check" && num("window_cap") <= num("m") + 1) v.push_back("window_cap must exceed m + 1");
    if (config.command == "tasep") {
        if (num("half_width") < 64 || num("density_half_width") < 64) v.push_back("TASEP half-widths must be >= 64");
        const std::string start = p.at("start").get<std::string>();
        if (start != "conditioned" && start != "reroot") v.push_back("start must be conditioned or reroot");
    }
    if (config.command == "massfield" && !(num("rho") > 0 && num("rho") < 1)) v.push_back("rho must lie in (0,1)");
    return v;
}

std::string config_hash(const ExperimentConfig& config) { return fnv_hex(config.command + "\n" + config.params.dump()); }

fs::path run_directory(const ExperimentConfig& config) {
    const fs::path base = config.out_root / (config.command + "-" + config_hash(config));
    if (!fs::exists(base)) return base;
    for (int k = 1;; ++k) {
        fs::path p = base;
        p += "." + std::to_string(k);
        if (!fs::exists(p)) return p;
    }
}

int run(const ExperimentConfig& config, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    const Report report = runners().at(config.command)(config.params, config.workers);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const fs::path dir = run_directory(config);
    fs::create_directories(dir);
    json files = json::array();
    for (const auto& [name, text] : report.files) {
        write_file(dir / name, text);
        files.push_back(name);
    }
    json gates = json::array();
    json failures = json::array();
    for (const auto& g : report.gates) {
        gates.push_back({{"gate", g.name}, {"pass", g.pass}, {"detail", g.detail}});
        if (!g.pass) failures.push_back({{"gate", g.name}, {"detail", g.detail}});
    }
    const json manifest = {{"command", config.command},
                           {"master_seed", config.params.at("seed")},
                           {"config_hash", config_hash(config)},
                           {"config", config.params},
                           {"tool_version", LPPD_VERSION},
                           {"generator_version", generator_version},
                           {"workers", config.workers == 0 ? default_workers() : config.workers},
                           {"wall_time_seconds", wall},
                           {"files", files},
                           {"gates", gates},
                           {"summary", report.summary}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    if (!failures.empty()) write_file(dir / "failures.json", json{{"failures", failures}}.dump(2) + "\n");

    log << config.command << ": " << dir.string() << "\n";
    for (const auto& g : report.gates) log << "  " << (g.pass ? "PASS " : "FAIL ") << g.name << " " << g.detail.dump() << "\n";
    return failures.empty() ? exit_ok : exit_gate_failure;
}

// ---------------------------------------------------------------------------

namespace {

struct Flags {
    std::optional<Coord> m, n;
    std::optional<std::uint64_t> samples, seed;
    std::optional<std::string> r_grid, s_grid, u_grid;
    std::optional<Coord> window_cap, half_width;
    std::optional<std::string> start;
    std::optional<double> rho;
    unsigned workers = 0;
    std::string out, config;
};

void add_flags(CLI::App* app, Flags& f) {
    app->add_option("--m", f.m, "Start offset m");
    app->add_option("--n", f.n, "Height n");
    app->add_option("--samples", f.samples, "Replicates per side (sites for massfield)");
    app->add_option("--seed", f.seed, "Master seed");
    app->add_option("--r-grid", f.r_grid, "Comma-separated rescaled times r");
    app->add_option("--s-grid", f.s_grid, "Comma-separated rescaled exit values s");
    app->add_option("--u-grid", f.u_grid, "Comma-separated profile points u");
    app->add_option("--window-cap", f.window_cap, "Window (tree-check) or target cap (burke)");
    app->add_option("--half-width", f.half_width, "TASEP segment half-width K");
    app->add_option("--start", f.start, "TASEP Palm start: conditioned or reroot");
    app->add_option("--rho", f.rho, "Mass-field rate");
    app->add_option("--workers", f.workers, "Worker threads (0 = hardware)");
    app->add_option("--out", f.out, "Output root (default $LPP_DUALITY_OUT or ./lppd-out)");
    app->add_option("--config", f.config, "JSON config file; flags override its values");
}

std::vector<double> parse_grid(const std::string& text, const char* name) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
            throw CLI::ValidationError(name, "'" + item + "' is not a number");
        out.push_back(v);
    }
    return out;
}

ExperimentConfig resolve(const std::string& command, const Flags& f) {
    ExperimentConfig c;
    c.command = command;
    c.params = default_params(command);
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) throw CLI::ValidationError("--config", "cannot read " + f.config);
        json file;
        try {
            in >> file;
        } catch (const json::exception& e) {
            throw CLI::ValidationError("--config", e.what());
        }
        if (!file.is_object()) throw CLI::ValidationError("--config", "config file must hold a JSON object");
        try {
            for (const auto& [k, v] : file.items()) {
                if (k == "workers") c.workers = v.get<unsigned>();
                else if (k == "out") c.out_root = v.get<std::string>();
                else c.params[k] = v;
            }
        } catch (const json::exception& e) {
            throw CLI::ValidationError("--config", e.what());
        }
    }
    json& p = c.params;
    if (f.m) p["m"] = *f.m;
    if (f.n) p["n"] = *f.n;
    if (f.samples) p["samples"] = *f.samples;
    if (f.seed) p["seed"] = *f.seed;
    if (f.r_grid) p["r_grid"] = parse_grid(*f.r_grid, "--r-grid");
    if (f.s_grid) p["s_grid"] = parse_grid(*f.s_grid, "--s-grid");
    if (f.u_grid) p["u_grid"] = parse_grid(*f.u_grid, "--u-grid");
    if (f.window_cap) p["window_cap"] = *f.window_cap;
    if (f.half_width) p["half_width"] = *f.half_width;
    if (f.start) p["start"] = *f.start;
    if (f.rho) p["rho"] = *f.rho;
    if (f.workers != 0) c.workers = f.workers;
    if (!f.out.empty()) c.out_root = f.out;
    if (c.out_root.empty()) {
        const char* env = std::getenv("LPP_DUALITY_OUT");
        c.out_root = env && *env ? fs::path(env) : fs::path("lppd-out");
    }
    return c;
}

} // namespace

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exponential last-passage percolation: duality experiments and checks"};
    app.require_subcommand(1);
    std::map<std::string, Flags> flags;
    std::map<std::string, CLI::App*> subs;
    for (const auto& name : commands()) {
        subs[name] = app.add_subcommand(name);
        add_flags(subs[name], flags[name]);
    }
    CLI::App* validate = app.add_subcommand("validate", "Check a configuration without running it");
    std::string target;
    Flags vflags;
    validate->add_option("command", target, "Command to validate")->required();
    add_flags(validate, vflags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    if (validate->parsed()) {
        json report;
        report["command"] = target;
        try {
            const ExperimentConfig c = resolve(target, vflags);
            report["params"] = c.params;
            report["config_hash"] = config_hash(c);
            report["violations"] = violations(c);
        } catch (const std::exception& e) {
            report["violations"] = json::array({e.what()});
        }
        out << report.dump(2) << "\n";
        return exit_ok;
    }

    for (const auto& [name, sub] : subs) {
        if (!sub->parsed()) continue;
        ExperimentConfig c;
        try {
            c = resolve(name, flags[name]);
        } catch (const CLI::ParseError& e) {
            err << name << ": " << e.what() << "\n";
            return exit_usage;
        }
        std::vector<std::string> bad;
        try {
            bad = violations(c);
        } catch (const std::exception& e) {
            bad.push_back(std::string("malformed parameter: ") + e.what());
        }
        if (!bad.empty()) {
            for (const auto& b : bad) err << name << ": " << b << "\n";
            return exit_usage;
        }
        try {
            return run(c, out);
        } catch (const std::exception& e) {
            err << name << ": " << e.what() << "\n";
            return exit_runtime;
        }
    }
    return exit_usage;
}

} // namespace lppd::cli
