#pragma once

#include "lppd/types.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace lppd {

/// Per-site masses W_i for sites i in [lo, lo + size). The mass of (a,b] is
/// the sum of W_{a+1..b}.
struct MassField {
    Coord lo = 0;
    Eigen::ArrayXd masses;
    double rho = 1.0;

    Coord hi() const { return lo + static_cast<Coord>(masses.size()) - 1; }
    double site(Coord i) const { return masses(i - lo); }
    /// M(a,b] for lo - 1 <= a <= b <= hi().
    double mass(Coord a, Coord b) const;
    void validate() const;
};

/// i.i.d. Exp(rho) masses on [lo, hi], a pure function of (seed, site).
MassField iid_exponential_masses(double rho, std::uint64_t seed, Coord lo, Coord hi);

struct MassEvolution {
    MassField field;           ///< masses M_n(x-1, x] for x in the requested window
    Coord truncation = 0;      ///< final K: starting points z >= -K were considered
    int retries = 0;
};

/// Time-n mass field on sites (a, b]: M_n(x-1,x] = Lbar_M(x,n) - Lbar_M(x-1,n)
/// with Lbar_M(x,n) = max_{z <= x} {M(z) + L_z(x,n)} and interior Exp(1)
/// weights W(x,y), y >= 1, drawn from `interior_seed`. The max is truncated to
/// z >= -K with K = 8n doubled while a maximizer sits on z = -K; `initial`
/// must cover [-K, b]. Throws ResourceError when it cannot.
struct MassEvolutionOptions {
    Coord initial_truncation = 0; ///< 0 means 8n
    int max_retries = 6;
};

MassEvolution evolve_mass(const MassField& initial, Coord n, Coord a, Coord b, std::uint64_t interior_seed,
                          const MassEvolutionOptions& opts = {});

/// evolve_mass on i.i.d. Exp(rho) input that is regenerated on a wider range
/// whenever the truncation grows.
MassEvolution evolve_iid_mass(double rho, std::uint64_t mass_seed, std::uint64_t interior_seed, Coord n, Coord a,
                              Coord b, const MassEvolutionOptions& opts = {});

} // namespace lppd
