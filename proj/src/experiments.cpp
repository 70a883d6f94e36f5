#include "lppd/experiments.hpp"

#include "lppd/coalescence.hpp"
#include "lppd/lpp.hpp"
#include "lppd/mass_field.hpp"

#include <cmath>
#include <limits>

namespace lppd {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::string tagged(const std::string& base, Coord a, Coord b) {
    return base + "/" + std::to_string(a) + "/" + std::to_string(b);
}

void require_samples(std::uint64_t S, std::uint64_t minimum = 1) {
    if (S < minimum) throw DomainError("need at least " + std::to_string(minimum) + " replicates");
}

void require_grid(const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw DomainError(std::string(name) + " grid is empty");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!std::isfinite(grid[k])) throw DomainError(std::string(name) + " grid has a non-finite entry");
        if (k > 0 && grid[k] <= grid[k - 1]) throw DomainError(std::string(name) + " grid must be increasing");
    }
}

double proportion_se(double p, std::uint64_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

} // namespace

unsigned default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

EmpiricalDistribution SampleSet::distribution() const {
    return EmpiricalDistribution(Eigen::Map<const Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(values.size())));
}

double SampleSet::excluded_fraction() const {
    return replicates == 0 ? 0.0 : static_cast<double>(excluded) / static_cast<double>(replicates);
}

SampleSet merge(const SampleSet& a, const SampleSet& b) {
    if (a.replicates == 0 && a.values.empty()) return b;
    if (b.replicates == 0 && b.values.empty()) return a;
    if (a.descriptor != b.descriptor)
        throw DomainError("cannot merge '" + a.descriptor + "' with '" + b.descriptor + "'");
    SampleSet out;
    out.descriptor = a.descriptor;
    out.replicates = a.replicates + b.replicates;
    out.excluded = a.excluded + b.excluded;
    out.values.resize(a.values.size() + b.values.size());
    std::merge(a.values.begin(), a.values.end(), b.values.begin(), b.values.end(), out.values.begin());
    return out;
}

// ---------------------------------------------------------------------------

double z_score(double p_a, double se_a, double p_b, double se_b) {
    const double d = std::abs(p_a - p_b);
    const double s = std::sqrt(se_a * se_a + se_b * se_b);
    if (s == 0.0) return d == 0.0 ? 0.0 : inf;
    return d / s;
}

std::optional<double> duality_lhs_sample(std::uint64_t master_seed, Coord m, Coord n, std::uint64_t k) {
    const WeightLattice lattice(experiment_seed(master_seed, tagged("duality/lhs", m, n), k), EnvironmentKind::interior);
    const CoalescenceRecord rec = sample_coalescence_time(lattice, m, n);
    if (!rec.stabilized) return std::nullopt;
    return rec.censored ? 0.0 : 1.0;
}

std::optional<double> duality_rhs_sample(std::uint64_t master_seed, Coord m, Coord n, std::uint64_t k) {
    const WeightLattice lattice(experiment_seed(master_seed, tagged("duality/rhs", m, n), k), EnvironmentKind::boundary);
    try {
        return exit_interval_count(lattice, n, m) == 0 ? 1.0 : 0.0;
    } catch (const ResourceError&) {
        return std::nullopt;
    }
}

DualityEstimate estimate_duality(Coord m, Coord n, std::uint64_t S, std::uint64_t master_seed, unsigned workers) {
    if (m < 1 || n <= m) throw DomainError("duality needs n > m >= 1");
    require_samples(S, 100);
    const SampleSet lhs = collect(tagged("duality/lhs", m, n), 0, S, workers,
                                  [&](std::uint64_t k) { return duality_lhs_sample(master_seed, m, n, k); });
    const SampleSet rhs = collect(tagged("duality/rhs", m, n), 0, S, workers,
                                  [&](std::uint64_t k) { return duality_rhs_sample(master_seed, m, n, k); });
    DualityEstimate e;
    e.m = m;
    e.n = n;
    e.S = S;
    e.samples_lhs = lhs.values.size();
    e.samples_rhs = rhs.values.size();
    e.excluded_lhs = lhs.excluded;
    e.excluded_rhs = rhs.excluded;
    if (e.samples_lhs == 0 || e.samples_rhs == 0) throw ResourceError("every duality replicate was excluded");
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    e.p_lhs = mean(lhs.values);
    e.p_rhs = mean(rhs.values);
    e.se_lhs = proportion_se(e.p_lhs, e.samples_lhs);
    e.se_rhs = proportion_se(e.p_rhs, e.samples_rhs);
    e.z = z_score(e.p_lhs, e.se_lhs, e.p_rhs, e.se_rhs);
    e.flagged = lhs.excluded_fraction() > 0.01 || rhs.excluded_fraction() > 0.01;
    return e;
}

// ---------------------------------------------------------------------------

double coalescence_scale(Coord m) { return std::pow(2.0, -2.5) * std::pow(static_cast<double>(m), 1.5); }

Coord coalescence_horizon(Coord m, double r_max) {
    if (!(r_max >= 0.0)) throw DomainError("horizon needs a non-negative r");
    return static_cast<Coord>(std::floor(r_max * coalescence_scale(m))) + 1;
}

GCurve estimate_G(const std::vector<double>& r_grid, Coord m, std::uint64_t S, std::uint64_t master_seed,
                  unsigned workers) {
    if (m < 1) throw DomainError("coalescence needs m >= 1");
    require_grid(r_grid, "r");
    require_samples(S);
    if (r_grid.front() < 0) throw DomainError("r grid must be non-negative");
    GCurve g;
    g.m = m;
    g.r = r_grid;
    // At least up to r = 1 so the box is never thinner than the start points.
    g.horizon = std::max(coalescence_horizon(m, r_grid.back()), m + 1);
    const double scale = coalescence_scale(m);
    const std::string id = "gcurve/" + std::to_string(m);
    g.rescaled = collect(id, 0, S, workers, [&](std::uint64_t k) -> std::optional<double> {
        const WeightLattice lattice(experiment_seed(master_seed, id, k), EnvironmentKind::interior);
        const CoalescenceRecord rec = sample_coalescence_time(lattice, m, g.horizon);
        if (!rec.stabilized) return std::nullopt;
        if (rec.censored) return inf;
        return static_cast<double>(rec.T) / scale;
    });
    if (g.rescaled.values.empty()) throw ResourceError("every coalescence replicate was excluded");
    const double at_m = static_cast<double>(m) / scale;
    for (double v : g.rescaled.values) g.below_m += v < at_m ? 1 : 0;
    const EmpiricalDistribution d = g.rescaled.distribution();
    for (double r : r_grid) g.G_hat.push_back(d.survival(r));
    g.dkw = d.dkw();
    return g;
}

// ---------------------------------------------------------------------------

double exit_scale(Coord n) { return std::pow(2.0, 5.0 / 3.0) * std::pow(static_cast<double>(n), 2.0 / 3.0); }

FCdf estimate_F(const std::vector<double>& s_grid, Coord n, std::uint64_t S, std::uint64_t master_seed,
                unsigned workers) {
    if (n < 1) throw DomainError("exit point needs n >= 1");
    require_grid(s_grid, "s");
    require_samples(S);
    FCdf f;
    f.n = n;
    f.s = s_grid;
    const double scale = exit_scale(n);
    const std::string id = "fcdf/" + std::to_string(n);
    f.rescaled = collect(id, 0, S, workers, [&](std::uint64_t k) -> std::optional<double> {
        const WeightLattice lattice(experiment_seed(master_seed, id, k), EnvironmentKind::boundary);
        return static_cast<double>(exit_profile(lattice, n, n).back()) / scale;
    });
    const EmpiricalDistribution d = f.rescaled.distribution();
    for (double s : s_grid) f.F_hat.push_back(d.cdf(s));
    f.dkw = d.dkw();
    return f;
}

std::vector<LowTailRow> check_lowtail(const GCurve& g, const FCdf& f) {
    const EmpiricalDistribution d = f.rescaled.distribution();
    std::vector<LowTailRow> rows;
    for (std::size_t k = 0; k < g.r.size(); ++k) {
        LowTailRow row;
        row.r = g.r[k];
        if (!(row.r > 0)) throw DomainError("low-tail check needs r > 0");
        row.G_hat = g.G_hat[k];
        row.eps_G = g.dkw;
        const double s = std::pow(row.r, -2.0 / 3.0);
        row.F_diff = d.cdf(s) - d.cdf(-s);
        row.eps_F = f.dkw;
        rows.push_back(row);
    }
    return rows;
}

std::vector<LowTailRow> check_lowtail(const std::vector<double>& r_grid, Coord m, Coord n, std::uint64_t S,
                                      std::uint64_t master_seed, unsigned workers) {
    const GCurve g = estimate_G(r_grid, m, S, master_seed, workers);
    std::vector<double> s_grid;
    // -r^{-2/3} increases with r and +r^{-2/3} decreases.
    for (double r : r_grid) s_grid.push_back(-std::pow(r, -2.0 / 3.0));
    for (auto it = r_grid.rbegin(); it != r_grid.rend(); ++it) s_grid.push_back(std::pow(*it, -2.0 / 3.0));
    const FCdf f = estimate_F(s_grid, n, S, master_seed, workers);
    return check_lowtail(g, f);
}

// ---------------------------------------------------------------------------

double profile_u_limit(Coord n) { return std::pow(2.0, -5.0 / 3.0) * std::cbrt(static_cast<double>(n)); }

RescaledSample rescaled_profiles(Coord n, const std::vector<double>& u_grid, std::uint64_t seed) {
    if (n < 1) throw DomainError("profiles need n >= 1");
    require_grid(u_grid, "u");
    const double limit = profile_u_limit(n);
    for (double u : u_grid)
        if (std::abs(u) > limit) throw DomainError("|u| exceeds 2^{-5/3} n^{1/3} = " + std::to_string(limit));

    const WeightLattice lattice(seed, EnvironmentKind::boundary);
    const Point corner{n, n};
    const Eigen::ArrayXd terms = variational_terms(lattice, corner);
    const Eigen::ArrayXd mass = boundary_mass(lattice, -n, n);

    RescaledSample r;
    r.n = n;
    r.u_grid = u_grid;
    const auto nd = static_cast<double>(n);
    const double denom = std::pow(2.0, 4.0 / 3.0) * std::cbrt(nd);
    const double drift = std::pow(2.0, 8.0 / 3.0) * std::pow(nd, 2.0 / 3.0);
    const double curvature = std::pow(2.0, 4.0 / 3.0) * std::cbrt(nd);
    r.a_values.resize(static_cast<Eigen::Index>(u_grid.size()));
    r.b_values.resize(static_cast<Eigen::Index>(u_grid.size()));
    r.c_value = (lbar(lattice, corner) - 4.0 * nd) / denom;
    r.Z_n = variational_exit(lattice, corner).value();
    r.u_n = static_cast<double>(r.Z_n) / exit_scale(n);
    r.grid_max = -inf;
    for (std::size_t k = 0; k < u_grid.size(); ++k) {
        const double u = u_grid[k];
        const Coord z = std::clamp<Coord>(std::llround(exit_scale(n) * u), -n, n);
        r.z.push_back(z);
        const double M = mass(z + n);
        const double L = terms(z + n) - M;
        const auto i = static_cast<Eigen::Index>(k);
        r.b_values(i) = (M - drift * u) / denom;
        r.a_values(i) = (L - (4.0 * nd - drift * u) + curvature * u * u) / denom;
        const double total = r.b_values(i) + r.a_values(i) - u * u;
        r.grid_max = std::max(r.grid_max, total);
        if (total > r.c_value + 1e-9) r.dominated = false;
        if (z == r.Z_n) r.argmax_in_grid = true;
    }
    r.max_matches = r.argmax_in_grid && std::abs(r.c_value - r.grid_max) <= 1e-9;
    return r;
}

// ---------------------------------------------------------------------------

double TreeCheckSummary::failure_rate() const {
    if (records.empty()) return 0.0;
    return static_cast<double>(records.size() - stabilized) / static_cast<double>(records.size());
}

TreeCheckSummary tree_check(Coord m, Coord n, std::uint64_t R, std::uint64_t master_seed, const PathwiseOptions& opts,
                            unsigned workers) {
    require_samples(R);
    const std::string id = tagged("treecheck", m, n);
    TreeCheckSummary s;
    s.records = run_replicates(0, R, workers, [&](std::uint64_t k) {
        const WeightLattice lattice(experiment_seed(master_seed, id, k), EnvironmentKind::interior);
        return pathwise_duality_event(lattice, m, n, opts);
    });
    for (const auto& rec : s.records) {
        if (!rec.valid) ++s.invalid;
        if (!rec.stabilized) continue;
        ++s.stabilized;
        if (rec.lhs == rec.rhs) ++s.agree;
    }
    return s;
}

namespace {

KsCheck exponential_gate(std::string name, const SampleSet& set, double rate) {
    KsCheck c;
    c.name = std::move(name);
    c.samples = set.values.size();
    if (set.values.empty()) return c;
    const EmpiricalDistribution d = set.distribution();
    c.statistic = ks_distance(d, [rate](double x) { return exponential_cdf(rate, x); });
    c.threshold = d.dkw();
    c.pass = c.statistic <= c.threshold;
    return c;
}

} // namespace

KsCheck burke_busemann(std::uint64_t S, std::uint64_t master_seed, Coord N0, Coord cap, unsigned workers,
                       SampleSet* samples) {
    require_samples(S);
    const std::string id = "burke/busemann";
    CoalescenceOptions opts;
    opts.N0 = N0;
    opts.cap = cap;
    const SampleSet set = collect(id, 0, S, workers, [&](std::uint64_t k) -> std::optional<double> {
        const WeightLattice lattice(experiment_seed(master_seed, id, k), EnvironmentKind::interior);
        const BusemannValue b = busemann_down(lattice, Point{0, 0}, e1, opts);
        if (!b.stabilized) return std::nullopt;
        return b.value;
    });
    if (samples) *samples = set;
    KsCheck c = exponential_gate("busemann_down_e1", set, 0.5);
    // Unstabilized replicates count against the gate beyond 1%.
    if (set.excluded_fraction() > 0.01) c.pass = false;
    return c;
}

KsCheck burke_increments(Coord n, std::uint64_t S, std::uint64_t master_seed, unsigned workers, SampleSet* samples) {
    if (n < 1) throw DomainError("increment height must be >= 1");
    require_samples(S);
    const std::string id = "burke/increment/" + std::to_string(n);
    const SampleSet set = collect(id, 0, S, workers, [&](std::uint64_t k) -> std::optional<double> {
        const WeightLattice lattice(experiment_seed(master_seed, id, k), EnvironmentKind::boundary);
        const Eigen::ArrayXXd f = last_passage_field(lattice, Point{0, 0}, Point{n + 1, n});
        return f(n + 1, n) - f(n, n);
    });
    if (samples) *samples = set;
    return exponential_gate("lbar_horizontal_increment", set, 0.5);
}

MeanCheck burke_mean(Coord n, std::uint64_t S, std::uint64_t master_seed, unsigned workers) {
    if (n < 1) throw DomainError("mean check needs n >= 1");
    require_samples(S);
    const std::string id = "burke/mean/" + std::to_string(n);
    const SampleSet set = collect(id, 0, S, workers, [&](std::uint64_t k) -> std::optional<double> {
        const WeightLattice lattice(experiment_seed(master_seed, id, k), EnvironmentKind::boundary);
        return lbar(lattice, Point{n, n});
    });
    MeanCheck c;
    c.n = n;
    c.samples = set.values.size();
    c.ratio = set.distribution().mean() / (4.0 * static_cast<double>(n));
    c.pass = c.ratio >= 0.99 && c.ratio <= 1.01;
    return c;
}

KsCheck mass_field_check(double rho, Coord n, Coord sites, std::uint64_t master_seed, Eigen::ArrayXd* masses) {
    if (sites < 1) throw DomainError("mass field check needs at least one site");
    const MassEvolution ev = evolve_iid_mass(rho, experiment_seed(master_seed, "massfield/mass", 0),
                                             experiment_seed(master_seed, "massfield/interior", 0), n, 0, sites);
    if (masses) *masses = ev.field.masses;
    SampleSet set;
    set.values.assign(ev.field.masses.data(), ev.field.masses.data() + ev.field.masses.size());
    set.replicates = set.values.size();
    std::sort(set.values.begin(), set.values.end());
    return exponential_gate("mass_increments", set, rho);
}

// ---------------------------------------------------------------------------

PalmStart palm_start_from_string(const std::string& s) {
    if (s == "conditioned") return PalmStart::conditioned;
    if (s == "reroot") return PalmStart::reroot;
    throw DomainError("unknown TASEP start '" + s + "' (expected conditioned or reroot)");
}

std::string to_string(PalmStart s) { return s == PalmStart::conditioned ? "conditioned" : "reroot"; }

namespace {

TasepReplicate tasep_replicate(std::uint64_t master_seed, const TasepOptions& opts, std::uint64_t k) {
    const std::uint64_t init_seed = experiment_seed(master_seed, "tasep/init", k);
    const std::uint64_t clock_seed = experiment_seed(master_seed, "tasep/clock", k);
    const bool reroot = opts.start == PalmStart::reroot;
    TasepSimulator sim(reroot ? init_stationary(opts.K, init_seed) : init_palm(opts.K, init_seed), clock_seed);
    if (reroot) run_until_reference_jump(sim, opts.burn_in < 0 ? static_cast<double>(opts.K) / 8 : opts.burn_in);
    // Past interchanges exist only for the re-rooted start.
    const std::int64_t lo = reroot ? -1 : 0;
    TasepReplicate r;
    r.index = k;
    r.table = interchange_times(sim, lo, opts.i_max, lo, opts.j_max, opts.horizon);
    return r;
}

bool usable(const InterchangeTable& t) { return t.valid && !std::isnan(t(1, 1)); }

} // namespace

TasepSummary tasep_experiment(std::uint64_t valid_target, std::uint64_t master_seed, const TasepOptions& opts,
                              unsigned workers) {
    require_samples(valid_target);
    if (opts.i_max < 1 || opts.j_max < 1) throw DomainError("TASEP table must include labels up to (1,1)");
    TasepSummary s;
    std::uint64_t attempted = 0;
    while (s.valid < valid_target && attempted < 2 * valid_target) {
        const std::uint64_t batch = std::min(valid_target - s.valid, 2 * valid_target - attempted);
        auto reps = run_replicates(attempted, batch, workers,
                                   [&](std::uint64_t k) { return tasep_replicate(master_seed, opts, k); });
        attempted += batch;
        for (auto& r : reps) {
            if (usable(r.table)) ++s.valid;
            s.replicates.push_back(std::move(r));
        }
    }

    std::vector<double> g11;
    for (const auto& r : s.replicates) {
        if (!usable(r.table)) continue;
        if (r.table(0, 0) != 0.0) s.g00_zero = false;
        if (g11.size() < valid_target) g11.push_back(r.table(1, 1));
    }
    const SampleSet lb = collect("tasep/lbar", 0, valid_target, workers, [&](std::uint64_t k) -> std::optional<double> {
        const WeightLattice lattice(experiment_seed(master_seed, "tasep/lbar", k), EnvironmentKind::boundary);
        return lbar(lattice, Point{1, 1});
    });
    s.ks_g11.name = "G11_vs_lbar11";
    s.ks_g11.samples = g11.size();
    s.ks_g11.threshold = 0.05;
    if (!g11.empty()) {
        s.ks_g11.statistic = ks_distance(EmpiricalDistribution(Eigen::Map<Eigen::ArrayXd>(g11.data(), static_cast<Eigen::Index>(g11.size()))),
                                         lb.distribution());
        s.ks_g11.pass = g11.size() == valid_target && s.ks_g11.statistic <= s.ks_g11.threshold;
    }

    if (opts.start == PalmStart::reroot) {
        const Point zs[] = {{0, 1}, {1, 0}, {1, 1}};
        for (const Point& z : zs) {
            std::vector<double> fwd, rev;
            for (const auto& r : s.replicates) {
                if (!r.table.valid) continue;
                const double a = r.table(z.x, z.y), b = r.table(-z.x, -z.y);
                if (std::isnan(a) || std::isnan(b)) continue;
                fwd.push_back(a);
                rev.push_back(-b);
            }
            KsCheck c;
            c.name = "reverse_" + std::to_string(z.x) + "_" + std::to_string(z.y);
            c.samples = fwd.size();
            if (!fwd.empty()) {
                const auto n = static_cast<Eigen::Index>(fwd.size());
                c.statistic = ks_distance(EmpiricalDistribution(Eigen::Map<Eigen::ArrayXd>(fwd.data(), n)),
                                          EmpiricalDistribution(Eigen::Map<Eigen::ArrayXd>(rev.data(), n)));
                c.threshold = two_sample_radius(n, n);
                c.pass = c.statistic <= c.threshold;
            }
            s.reverse.push_back(c);
        }
    }
    return s;
}

DensityCheck tasep_density(Coord K, std::uint64_t R, std::uint64_t master_seed, unsigned workers) {
    require_samples(R);
    DensityCheck c;
    c.K = K;
    c.T = static_cast<double>(K) / 4;
    const Coord half = K / 2;
    c.band = 5.0 * 0.5 / std::sqrt(static_cast<double>(2 * half + 1));
    c.densities = run_replicates(0, R, workers, [&](std::uint64_t k) {
        TasepSimulator sim(init_stationary(K, experiment_seed(master_seed, "tasep-density/init", k)),
                           experiment_seed(master_seed, "tasep-density/clock", k), false);
        sim.run_until(c.T);
        return sim.state().density(-half, half);
    });
    c.pass = true;
    for (double d : c.densities)
        if (std::abs(d - 0.5) > c.band) c.pass = false;
    return c;
}

} // namespace lppd
