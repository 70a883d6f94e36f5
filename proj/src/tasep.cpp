#include "lppd/tasep.hpp"

#include <cmath>
#include <limits>
#include <new>
#include <stdexcept>
#include <string>

namespace lppd {

namespace {

constexpr std::uint64_t init_stream = tag_hash("tasep/init");
constexpr std::uint64_t clock_stream = tag_hash("tasep/clocks");

std::size_t slot(const TasepState& s, Coord site) { return static_cast<std::size_t>(site + s.K); }

} // namespace

double TasepState::density(Coord lo, Coord hi) const {
    if (lo < -K || hi > K || lo > hi) throw DomainError("density window outside the segment");
    return occupation.segment(lo + K, hi - lo + 1).cast<double>().mean();
}

bool TasepState::has_particle(std::int64_t j) const {
    const std::int64_t id = particle_ref - j;
    return labelled && id >= 0 && id < static_cast<std::int64_t>(particle_pos.size());
}

bool TasepState::has_hole(std::int64_t i) const {
    const std::int64_t id = hole_ref + i;
    return labelled && id >= 0 && id < static_cast<std::int64_t>(hole_pos.size());
}

Coord TasepState::particle(std::int64_t j) const {
    if (!has_particle(j)) throw DomainError("no particle with label " + std::to_string(j));
    return particle_pos[static_cast<std::size_t>(particle_ref - j)];
}

Coord TasepState::hole(std::int64_t i) const {
    if (!has_hole(i)) throw DomainError("no hole with label " + std::to_string(i));
    return hole_pos[static_cast<std::size_t>(hole_ref + i)];
}

void TasepState::check_invariants() const {
    const auto sites = static_cast<std::size_t>(2 * K + 1);
    if (static_cast<std::size_t>(occupation.size()) != sites || id_at.size() != sites ||
        particle_pos.size() + hole_pos.size() != sites)
        throw std::logic_error("tasep state sizes inconsistent");
    for (std::size_t p = 0; p < particle_pos.size(); ++p) {
        const Coord s = particle_pos[p];
        if (!occupied(s) || id_at[slot(*this, s)] != static_cast<std::int32_t>(p))
            throw std::logic_error("particle map inconsistent at site " + std::to_string(s));
        if (p > 0 && particle_pos[p - 1] >= s) throw std::logic_error("particle order violated");
    }
    for (std::size_t h = 0; h < hole_pos.size(); ++h) {
        const Coord s = hole_pos[h];
        if (occupied(s) || id_at[slot(*this, s)] != static_cast<std::int32_t>(h))
            throw std::logic_error("hole map inconsistent at site " + std::to_string(s));
        if (h > 0 && hole_pos[h - 1] >= s) throw std::logic_error("hole order violated");
    }
}

TasepState init_stationary(Coord K, std::uint64_t seed) {
    if (K < 64) throw DomainError("TASEP half-width must be at least 64");
    if (K > (Coord{1} << 28)) throw ResourceError("TASEP segment too long");
    TasepState s;
    s.K = K;
    const auto sites = static_cast<std::size_t>(2 * K + 1);
    try {
        s.occupation.resize(static_cast<Eigen::Index>(sites));
        s.id_at.resize(sites);
    } catch (const std::bad_alloc&) {
        throw ResourceError("out of memory allocating TASEP segment");
    }
    RngStream rng(seed, init_stream);
    for (Coord site = -K; site <= K; ++site) {
        const bool occ = rng.bernoulli(0.5);
        s.occupation(site + K) = occ ? 1 : 0;
        auto& ids = occ ? s.particle_pos : s.hole_pos;
        s.id_at[slot(s, site)] = static_cast<std::int32_t>(ids.size());
        ids.push_back(site);
    }
    return s;
}

TasepState init_palm(Coord K, std::uint64_t seed) {
    TasepState s = init_stationary(K, seed);
    // Rebuild the id maps with site 0 a hole and site 1 a particle.
    s.occupation(K) = 0;
    s.occupation(K + 1) = 1;
    s.particle_pos.clear();
    s.hole_pos.clear();
    for (Coord site = -K; site <= K; ++site) {
        auto& ids = s.occupied(site) ? s.particle_pos : s.hole_pos;
        s.id_at[slot(s, site)] = static_cast<std::int32_t>(ids.size());
        ids.push_back(site);
    }
    s.particle_ref = s.id_at[slot(s, 1)];
    s.hole_ref = s.id_at[slot(s, 0)];
    s.labelled = true;
    s.log.push_back({0.0, static_cast<std::int32_t>(s.particle_ref), static_cast<std::int32_t>(s.hole_ref)});
    return s;
}

TasepSimulator::TasepSimulator(TasepState state, std::uint64_t seed, bool logging)
    : state_(std::move(state)), rng_(seed, clock_stream), logging_(logging) {
    for (std::size_t p = 0; p < state_.particle_pos.size(); ++p) arm(static_cast<std::int32_t>(p), state_.time);
}

void TasepSimulator::arm(std::int32_t particle, double now) { clocks_.push({now + rng_.exponential(1.0), particle}); }

std::int32_t TasepSimulator::step() {
    const Clock c = clocks_.top();
    clocks_.pop();
    state_.time = c.time;
    arm(c.particle, c.time);
    ++events_;
    auto& s = state_;
    const Coord from = s.particle_pos[static_cast<std::size_t>(c.particle)];
    if (from == s.K || s.occupied(from + 1)) return -1;
    const std::int32_t hole = s.id_at[slot(s, from + 1)];
    s.occupation(from + s.K) = 0;
    s.occupation(from + 1 + s.K) = 1;
    s.id_at[slot(s, from)] = hole;
    s.id_at[slot(s, from + 1)] = c.particle;
    s.particle_pos[static_cast<std::size_t>(c.particle)] = from + 1;
    s.hole_pos[static_cast<std::size_t>(hole)] = from;
    if (logging_) s.log.push_back({c.time, c.particle, hole});
    return c.particle;
}

void TasepSimulator::run_until(double t) {
    while (!clocks_.empty() && next_time() <= t) step();
    if (t > state_.time) state_.time = t;
}

bool TasepSimulator::run_until_jump(Coord from, double until) {
    while (!clocks_.empty() && next_time() <= until) {
        const std::int32_t p = step();
        if (p >= 0 && state_.particle_pos[static_cast<std::size_t>(p)] == from + 1) return true;
    }
    return false;
}

void run_until_reference_jump(TasepSimulator& sim, double burn_in, double max_wait) {
    sim.run_until(burn_in);
    if (!sim.run_until_jump(0, burn_in + max_wait))
        throw ResourceError("no jump across the reference bond within the waiting horizon");
    TasepState& s = sim.state();
    s.origin = s.time;
    s.particle_ref = s.id_at[slot(s, 1)];
    s.hole_ref = s.id_at[slot(s, 0)];
    s.labelled = true;
}

InterchangeTable interchange_times(TasepSimulator& sim, std::int64_t i_lo, std::int64_t i_hi, std::int64_t j_lo,
                                   std::int64_t j_hi, double horizon) {
    const TasepState& s = sim.state();
    if (!s.labelled) throw DomainError("interchange_times needs a re-rooted state");
    if (!sim.logging()) throw DomainError("interchange_times needs a logging simulator");
    if (i_lo > i_hi || j_lo > j_hi) throw DomainError("empty label rectangle");
    if (!(horizon >= 0)) throw DomainError("horizon must be non-negative");
    InterchangeTable t;
    t.i_lo = i_lo;
    t.i_hi = i_hi;
    t.j_lo = j_lo;
    t.j_hi = j_hi;
    t.reference_time = s.origin;
    t.G.setConstant(i_hi - i_lo + 1, j_hi - j_lo + 1, std::numeric_limits<double>::quiet_NaN());

    auto tracked = [&] {
        for (std::int64_t i = i_lo; i <= i_hi; ++i)
            if (!s.has_hole(i) || std::abs(s.hole(i)) > s.K - InterchangeTable::wall_buffer) return false;
        for (std::int64_t j = j_lo; j <= j_hi; ++j)
            if (!s.has_particle(j) || std::abs(s.particle(j)) > s.K - InterchangeTable::wall_buffer) return false;
        return true;
    };
    t.valid = tracked();
    if (!t.valid) return t;

    // Hole ids increase and particle ids decrease with the label.
    const std::int64_t h_lo = s.hole_ref + i_lo, h_hi = s.hole_ref + i_hi;
    const std::int64_t p_lo = s.particle_ref - j_hi, p_hi = s.particle_ref - j_lo;
    Eigen::Index missing = t.G.size();
    auto record = [&](const TasepState::Interchange& e) {
        if (e.hole < h_lo || e.hole > h_hi || e.particle < p_lo || e.particle > p_hi) return;
        double& g = t.G(e.hole - h_lo, s.particle_ref - e.particle - j_lo);
        if (std::isnan(g)) --missing;
        g = e.time - s.origin;
    };
    for (const auto& e : s.log) record(e);

    const double until = s.origin + horizon;
    std::size_t seen = s.log.size();
    while (missing > 0 && sim.next_time() <= until) {
        if (sim.step() < 0) continue;
        for (; seen < s.log.size(); ++seen) record(s.log[seen]);
    }
    t.valid = tracked();
    return t;
}

} // namespace lppd
