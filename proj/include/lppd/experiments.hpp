#pragma once

#include "lppd/busemann.hpp"
#include "lppd/stats.hpp"
#include "lppd/tasep.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace lppd {

// ---------------------------------------------------------------------------
// Replicate execution

/// Seed of replicate k of the experiment named `id`.
inline std::uint64_t experiment_seed(std::uint64_t master_seed, const std::string& id, std::uint64_t k) {
    return replicate_seed(master_seed, tag_hash(id), k);
}

unsigned default_workers();

/// out[k] = fn(first + k) for k < count, computed on up to `workers` threads.
/// Results land in fixed slots, so the output never depends on scheduling.
/// The first exception thrown by fn is rethrown after all threads finish.
template <class Fn>
auto run_replicates(std::uint64_t first, std::uint64_t count, unsigned workers, Fn&& fn)
    -> std::vector<decltype(fn(std::uint64_t{}))> {
    using R = decltype(fn(std::uint64_t{}));
    std::vector<R> out(count);
    if (workers == 0) workers = default_workers();
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(count, 1)));
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::uint64_t k = next.fetch_add(1);
            if (k >= count) return;
            try {
                out[k] = fn(first + k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    return out;
}

/// Scalar samples of one experiment plus exclusion counters. Values are kept
/// sorted, so merging is associative and commutative.
struct SampleSet {
    std::string descriptor;
    std::vector<double> values;
    std::uint64_t replicates = 0;  ///< attempted, including excluded ones
    std::uint64_t excluded = 0;

    EmpiricalDistribution distribution() const;
    double excluded_fraction() const;
};

SampleSet merge(const SampleSet& a, const SampleSet& b);

/// Replicates [first, first + count) of `fn`, where fn(k) returns nullopt for
/// an excluded replicate.
template <class Fn>
SampleSet collect(std::string descriptor, std::uint64_t first, std::uint64_t count, unsigned workers, Fn&& fn) {
    SampleSet s;
    s.descriptor = std::move(descriptor);
    s.replicates = count;
    for (const std::optional<double>& v : run_replicates(first, count, workers, fn)) {
        if (v) s.values.push_back(*v);
        else ++s.excluded;
    }
    std::sort(s.values.begin(), s.values.end());
    return s;
}

// ---------------------------------------------------------------------------
// Duality formula

struct DualityEstimate {
    Coord m = 0, n = 0;
    std::uint64_t S = 0;
    std::uint64_t samples_lhs = 0, samples_rhs = 0;    ///< used after exclusions
    std::uint64_t excluded_lhs = 0, excluded_rhs = 0;
    double p_lhs = 0, se_lhs = 0, p_rhs = 0, se_rhs = 0;
    double z = 0;
    bool flagged = false;  ///< more than 1% of either side excluded
};

/// |p_a - p_b| / sqrt(se_a^2 + se_b^2); 0 when both are degenerate and equal.
double z_score(double p_a, double se_a, double p_b, double se_b);

/// Indicator of T_m < n on interior replicate k (nullopt if the stationary
/// tree lost a path through the side of its box).
std::optional<double> duality_lhs_sample(std::uint64_t master_seed, Coord m, Coord n, std::uint64_t k);
/// Indicator of no exit in [-m, m] at height n on boundary replicate k.
std::optional<double> duality_rhs_sample(std::uint64_t master_seed, Coord m, Coord n, std::uint64_t k);

DualityEstimate estimate_duality(Coord m, Coord n, std::uint64_t S, std::uint64_t master_seed, unsigned workers = 0);

// ---------------------------------------------------------------------------
// Coalescence-time survival curve

/// 2^{-5/2} m^{3/2}.
double coalescence_scale(Coord m);

/// Observation horizon for rescaled times up to r_max: floor(r_max * scale) + 1.
Coord coalescence_horizon(Coord m, double r_max);

struct GCurve {
    Coord m = 0;
    Coord horizon = 0;
    std::vector<double> r;
    std::vector<double> G_hat;
    double dkw = 0;
    SampleSet rescaled;       ///< T_m / scale, +inf when censored at the horizon
    std::uint64_t below_m = 0;  ///< samples with T_m < m (must stay 0)
};

/// Survival Ĝ(r) = P(T_m / scale > r) from S stationary-tree samples
/// observed up to the largest r in the grid.
GCurve estimate_G(const std::vector<double>& r_grid, Coord m, std::uint64_t S, std::uint64_t master_seed,
                  unsigned workers = 0);

// ---------------------------------------------------------------------------
// Rescaled exit point

/// 2^{5/3} n^{2/3}.
double exit_scale(Coord n);

struct FCdf {
    Coord n = 0;
    std::vector<double> s;
    std::vector<double> F_hat;
    double dkw = 0;
    SampleSet rescaled;  ///< U_n = Z(n,n) / exit_scale(n)
};

FCdf estimate_F(const std::vector<double>& s_grid, Coord n, std::uint64_t S, std::uint64_t master_seed,
                unsigned workers = 0);

struct LowTailRow {
    double r = 0;
    double G_hat = 0;
    double eps_G = 0;
    double F_diff = 0;  ///< F̂(r^{-2/3}) - F̂(-r^{-2/3})
    double eps_F = 0;
    double lhs() const { return G_hat + eps_G + 2 * eps_F; }
    bool pass() const { return lhs() >= F_diff; }
};

std::vector<LowTailRow> check_lowtail(const GCurve& g, const FCdf& f);

/// Runs estimate_G on r_grid and estimate_F on {±r^{-2/3}}, then compares.
std::vector<LowTailRow> check_lowtail(const std::vector<double>& r_grid, Coord m, Coord n, std::uint64_t S,
                                      std::uint64_t master_seed, unsigned workers = 0);

// ---------------------------------------------------------------------------
// Rescaled profiles

struct RescaledSample {
    Coord n = 0;
    std::vector<double> u_grid;
    std::vector<Coord> z;          ///< lattice index round(exit_scale(n) u)
    Eigen::ArrayXd a_values;
    Eigen::ArrayXd b_values;
    double c_value = 0;
    double u_n = 0;
    Coord Z_n = 0;
    double grid_max = 0;           ///< max over the grid of B + A - u^2
    bool argmax_in_grid = false;
    bool max_matches = false;      ///< C_n == grid_max (checked only when argmax_in_grid)
    bool dominated = true;         ///< C_n >= B + A - u^2 at every grid point
};

/// Largest |u| allowed for a given n: 2^{-5/3} n^{1/3}.
double profile_u_limit(Coord n);

RescaledSample rescaled_profiles(Coord n, const std::vector<double>& u_grid, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Pathwise identity, Burke checks, mass field, TASEP

struct TreeCheckSummary {
    std::vector<PathwiseRecord> records;
    std::uint64_t stabilized = 0;
    std::uint64_t agree = 0;        ///< among stabilized
    std::uint64_t invalid = 0;
    double failure_rate() const;    ///< fraction not stabilized (invalid included)
    bool all_agree() const { return agree == stabilized; }
};

TreeCheckSummary tree_check(Coord m, Coord n, std::uint64_t R, std::uint64_t master_seed,
                            const PathwiseOptions& opts = {}, unsigned workers = 0);

struct KsCheck {
    std::string name;
    std::uint64_t samples = 0;
    double statistic = 0;
    double threshold = 0;
    bool pass = false;
};

/// B-down((0,0),(1,0)) on S interior replicates vs Exp(1/2).
KsCheck burke_busemann(std::uint64_t S, std::uint64_t master_seed, Coord N0 = 64, Coord cap = 4096,
                       unsigned workers = 0, SampleSet* samples = nullptr);

/// L̄(n+1,n) - L̄(n,n) on S boundary replicates vs Exp(1/2).
KsCheck burke_increments(Coord n, std::uint64_t S, std::uint64_t master_seed, unsigned workers = 0,
                         SampleSet* samples = nullptr);

struct MeanCheck {
    Coord n = 0;
    std::uint64_t samples = 0;
    double ratio = 0;  ///< mean L̄(n,n) / (4n)
    bool pass = false; ///< ratio in [0.99, 1.01]
};

MeanCheck burke_mean(Coord n, std::uint64_t S, std::uint64_t master_seed, unsigned workers = 0);

/// Time-n masses of i.i.d. Exp(rho) input on `sites` consecutive sites vs Exp(rho).
KsCheck mass_field_check(double rho, Coord n, Coord sites, std::uint64_t master_seed, Eigen::ArrayXd* masses = nullptr);

enum class PalmStart { conditioned, reroot };
PalmStart palm_start_from_string(const std::string& s);
std::string to_string(PalmStart s);

struct TasepOptions {
    Coord K = 64;
    PalmStart start = PalmStart::conditioned;
    double burn_in = -1;  ///< reroot only; negative means K/8
    std::int64_t i_max = 2, j_max = 2;
    double horizon = 1000;
};

struct TasepReplicate {
    std::uint64_t index = 0;
    InterchangeTable table;
};

struct TasepSummary {
    std::vector<TasepReplicate> replicates;  ///< every attempted replicate, valid or not
    std::uint64_t valid = 0;
    bool g00_zero = true;
    KsCheck ks_g11;           ///< G(1,1) vs L̄(1,1) over valid replicates
    std::vector<KsCheck> reverse;  ///< -G(-z) vs G(z) (reroot start only)
};

/// Runs replicates until `valid_target` valid ones are collected (at most
/// 2 * valid_target attempts) and compares G(1,1) with L̄(1,1) sampled on
/// valid_target independent boundary environments.
TasepSummary tasep_experiment(std::uint64_t valid_target, std::uint64_t master_seed, const TasepOptions& opts = {},
                              unsigned workers = 0);

struct DensityCheck {
    Coord K = 0;
    double T = 0;
    std::vector<double> densities;  ///< middle-half density per replicate
    double band = 0;                ///< 5 sigma
    bool pass = false;
};

/// Product Bernoulli(1/2) on [-K, K] run to T = K/4; the density of the
/// middle half [-K/2, K/2] must stay within 5 binomial sigmas of 1/2.
DensityCheck tasep_density(Coord K, std::uint64_t R, std::uint64_t master_seed, unsigned workers = 0);

} // namespace lppd
