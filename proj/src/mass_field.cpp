#include "lppd/mass_field.hpp"

#include "lppd/env.hpp"
#include "lppd/rng.hpp"
#include "lppd/sweep.hpp"

#include <algorithm>
#include <vector>

namespace lppd {

double MassField::mass(Coord a, Coord b) const {
    if (a > b || a < lo - 1 || b > hi()) throw DomainError("mass interval outside field");
    return masses.segment(a + 1 - lo, b - a).sum();
}

void MassField::validate() const {
    if ((masses < 0.0).any()) throw DomainError("masses must be nonnegative");
    if (!(rho > 0.0)) throw DomainError("rho must be positive");
}

MassField iid_exponential_masses(double rho, std::uint64_t seed, Coord lo, Coord hi) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0,1)");
    if (lo > hi) throw DomainError("empty mass range");
    // Row 0 of an interior lattice doubles as the 1-D site stream.
    const WeightLattice lattice(seed, EnvironmentKind::interior);
    MassField f;
    f.lo = lo;
    f.rho = rho;
    f.masses.resize(hi - lo + 1);
    for (Coord i = lo; i <= hi; ++i) f.masses(i - lo) = lattice.weight(i, 0) / rho;
    return f;
}

namespace {

// One attempt with truncation K. Returns false if a maximizer on the window
// started at z = -K.
bool evolve_once(const MassField& initial, Coord n, Coord a, Coord b, std::uint64_t interior_seed, Coord K,
                 MassField& out) {
    const Coord lo = -K;
    const auto w = static_cast<std::size_t>(b - lo + 1);
    std::vector<double> val(w);
    std::vector<Coord> label(w);
    // Row 0 holds M(z), with M(0) = 0 and M(z) - M(z-1) = W_z.
    {
        double acc = 0.0;
        for (Coord z = 1; z <= b; ++z) {
            acc += initial.site(z);
            val[z - lo] = acc;
        }
        acc = 0.0;
        val[-lo] = 0.0;
        for (Coord z = 0; z > lo; --z) {
            acc += initial.site(z);
            val[z - 1 - lo] = -acc;
        }
        for (std::size_t k = 0; k < w; ++k) label[k] = lo + static_cast<Coord>(k);
    }
    const WeightLattice lattice(interior_seed, EnvironmentKind::interior);
    for (Coord y = 1; y <= n; ++y) {
        // Leftmost column: only the path rising from z = -K.
        val[0] = lattice.weight(lo, y) + val[0];
        for (std::size_t k = 1; k < w; ++k) {
            const double left = val[k - 1];
            const double down = val[k];
            const bool go_left = left > down;
            val[k] = lattice.weight(lo + static_cast<Coord>(k), y) + (go_left ? left : down);
            if (go_left) label[k] = label[k - 1];
        }
    }
    for (Coord x = a; x <= b; ++x)
        if (label[x - lo] == lo) return false;
    out.lo = a + 1;
    out.rho = initial.rho;
    out.masses.resize(b - a);
    for (Coord x = a + 1; x <= b; ++x) out.masses(x - a - 1) = val[x - lo] - val[x - 1 - lo];
    return true;
}

} // namespace

namespace {

Coord starting_truncation(Coord n, Coord a, const MassEvolutionOptions& opts) {
    const Coord k = opts.initial_truncation > 0 ? opts.initial_truncation : 8 * n;
    return std::max<Coord>(k, -a + 1);
}

} // namespace

MassEvolution evolve_mass(const MassField& initial, Coord n, Coord a, Coord b, std::uint64_t interior_seed,
                          const MassEvolutionOptions& opts) {
    if (n < 0) throw DomainError("number of steps must be nonnegative");
    if (a >= b) throw DomainError("mass window (a,b] must be non-empty");
    initial.validate();
    MassEvolution result;
    if (n == 0) {
        if (a < initial.lo - 1 || b > initial.hi()) throw DomainError("window outside the initial field");
        result.field.lo = a + 1;
        result.field.rho = initial.rho;
        result.field.masses = initial.masses.segment(a + 1 - initial.lo, b - a);
        return result;
    }
    Coord K = starting_truncation(n, a, opts);
    for (int attempt = 0; attempt <= opts.max_retries; ++attempt, K *= 2) {
        if (-K + 1 < initial.lo || b > initial.hi())
            throw ResourceError("initial mass field does not cover [-" + std::to_string(K) + ", " +
                                std::to_string(b) + "]");
        if (evolve_once(initial, n, a, b, interior_seed, K, result.field)) {
            result.truncation = K;
            result.retries = attempt;
            return result;
        }
    }
    throw ResourceError("mass-field maximizer stayed on the truncation boundary");
}

MassEvolution evolve_iid_mass(double rho, std::uint64_t mass_seed, std::uint64_t interior_seed, Coord n, Coord a,
                              Coord b, const MassEvolutionOptions& opts) {
    Coord K = starting_truncation(n, a, opts);
    for (int attempt = 0; attempt <= opts.max_retries; ++attempt, K *= 2) {
        const MassField initial = iid_exponential_masses(rho, mass_seed, std::min<Coord>(-K + 1, a + 1), b);
        try {
            MassEvolution r = evolve_mass(initial, n, a, b, interior_seed, {K, 0});
            r.retries = attempt;
            return r;
        } catch (const ResourceError&) {
        }
    }
    throw ResourceError("mass-field maximizer stayed on the truncation boundary");
}

} // namespace lppd
