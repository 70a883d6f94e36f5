#pragma once

#include "lppd/rng.hpp"
#include "lppd/types.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <queue>
#include <vector>

namespace lppd {

/// TASEP on the closed segment [-K, K]: particles jump right at rate 1 when
/// the next site is a hole; the end sites are walls. Particles and holes keep
/// their identity (index into the position vectors), numbered left to right,
/// so labels are fixed offsets from the ids once a reference is chosen.
struct TasepState {
    Coord K = 0;
    double time = 0.0;    ///< absolute simulation time
    double origin = 0.0;  ///< absolute time of the reference jump
    Eigen::Array<std::uint8_t, Eigen::Dynamic, 1> occupation;  ///< site s at index s + K
    std::vector<Coord> particle_pos;   ///< by particle id, increasing
    std::vector<Coord> hole_pos;       ///< by hole id, increasing
    std::vector<std::int32_t> id_at;   ///< particle or hole id at each site

    /// Set by re-rooting: particle label j is id particle_ref - j, hole label
    /// i is id hole_ref + i.
    bool labelled = false;
    std::int64_t particle_ref = 0;
    std::int64_t hole_ref = 0;

    struct Interchange {
        double time;
        std::int32_t particle;
        std::int32_t hole;
    };
    /// Every jump so far in absolute time order (when logging is on).
    std::vector<Interchange> log;

    bool occupied(Coord s) const { return occupation(s + K) != 0; }
    double density(Coord lo, Coord hi) const;

    /// Particle with label j / hole with label i (requires labelled).
    Coord particle(std::int64_t j) const;
    Coord hole(std::int64_t i) const;
    bool has_particle(std::int64_t j) const;
    bool has_hole(std::int64_t i) const;

    /// Exclusion and label-order invariants; throws std::logic_error.
    void check_invariants() const;
};

/// Exact-in-time event simulator: one rate-1 attempt clock per particle in a
/// priority queue; a clock is re-armed after each attempt.
class TasepSimulator {
public:
    TasepSimulator(TasepState state, std::uint64_t seed, bool logging = true);

    const TasepState& state() const noexcept { return state_; }
    TasepState& state() noexcept { return state_; }

    /// Processes attempts up to time t (absolute, current origin).
    void run_until(double t);
    /// Processes attempts until the next successful jump out of `from`, or
    /// returns false if none happens by absolute time `until`.
    bool run_until_jump(Coord from, double until);
    /// Processes one attempt; returns the moved particle id or -1.
    std::int32_t step();
    double next_time() const { return clocks_.top().time; }

    std::uint64_t events() const noexcept { return events_; }
    bool logging() const noexcept { return logging_; }

private:
    void arm(std::int32_t particle, double now);

    struct Clock {
        double time;
        std::int32_t particle;
        bool operator>(const Clock& o) const {
            return time > o.time || (time == o.time && particle > o.particle);
        }
    };

    TasepState state_;
    RngStream rng_;
    std::priority_queue<Clock, std::vector<Clock>, std::greater<>> clocks_;
    std::uint64_t events_ = 0;
    bool logging_ = true;
};

/// Product Bernoulli(1/2) configuration on [-K, K] at time 0, unlabelled.
TasepState init_stationary(Coord K, std::uint64_t seed);

/// The state just after a jump 0 -> 1 at time 0 under the Palm measure of the
/// jump process: the jump rate across (0,1) is the indicator of a particle at
/// 0 and a hole at 1, so the pre-jump configuration is product Bernoulli(1/2)
/// conditioned on that pair. Labelled, time 0, with the (0,0) interchange
/// logged. Only the future of this state is simulated.
TasepState init_palm(Coord K, std::uint64_t seed);

/// Runs for `burn_in`, then until the first 0 -> 1 jump; moves the time origin
/// there and assigns labels (particle 0 at site 1, hole 0 at site 0). This
/// re-rooting stands in for the Palm version of the process.
/// Throws ResourceError if no such jump happens within `max_wait` after the
/// burn-in.
void run_until_reference_jump(TasepSimulator& sim, double burn_in, double max_wait = 1e3);

/// G(i,j) for hole labels i in [i_lo, i_hi] and particle labels j in [j_lo, j_hi].
struct InterchangeTable {
    std::int64_t i_lo = 0, i_hi = 0, j_lo = 0, j_hi = 0;
    Eigen::ArrayXXd G;          ///< NaN where the interchange was not observed
    double reference_time = 0;  ///< absolute time of the re-rooting jump
    bool valid = true;          ///< no tracked label came within 8 sites of a wall

    static constexpr Coord wall_buffer = 8;

    double operator()(std::int64_t i, std::int64_t j) const { return G(i - i_lo, j - j_lo); }
    bool complete() const { return !G.isNaN().any(); }
};

/// Continues the simulation until every future pair in the table has
/// interchanged or `horizon` (relative to the origin) is reached; past pairs
/// (negative labels) are read from the log and are missing if they predate it.
InterchangeTable interchange_times(TasepSimulator& sim, std::int64_t i_lo, std::int64_t i_hi, std::int64_t j_lo,
                                   std::int64_t j_hi, double horizon);

} // namespace lppd
