#pragma once

#include "lppd/env.hpp"
#include "lppd/sweep.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace lppd {

// Weight sources are BasicEnvironment<Scalar> (bounded, materialized) or
// WeightLattice (unbounded, generated on the fly). Both expose weight(x, y).

template <typename Scalar>
void require_box(const BasicEnvironment<Scalar>& env, const Region& box) {
    if (!env.region().contains(box))
        throw DomainError("rectangle " + to_string(box.lower()) + "-" + to_string(box.upper()) +
                          " lies outside the environment region");
}
inline void require_box(const WeightLattice&, const Region&) {}

template <typename Scalar>
EnvironmentKind kind_of(const BasicEnvironment<Scalar>& env) { return env.kind(); }
inline EnvironmentKind kind_of(const WeightLattice& lattice) { return lattice.kind(); }

inline void require_ordered(const Point& x, const Point& y) {
    if (!leq(x, y)) throw DomainError("expected " + to_string(x) + " <= " + to_string(y) + " componentwise");
}

/// Forward sweep from x over the box [x, y], reading weights from `src`.
template <class Source, class Visitor>
void sweep_from(const Source& src, const Point& x, const Point& y, Visitor&& visit,
                PredecessorField* bits = nullptr) {
    require_ordered(x, y);
    require_box(src, Region::box(x, y));
    const Coord x0 = x.x, y0 = x.y;
    sweep(
        y.x - x.x + 1, y.y - x.y + 1,
        [&src, x0, y0](Coord i, Coord j) { return static_cast<double>(src.weight(x0 + i, y0 + j)); },
        visit, bits);
}

/// Start-exclusive last-passage time L(x,y).
template <class Source>
double last_passage(const Source& src, const Point& x, const Point& y) {
    double value = 0.0;
    const Coord last = (y.x - x.x) + (y.y - x.y);
    sweep_from(src, x, y, [&](Coord d, Coord, Coord hi, const double* v) {
        if (d == last) value = v[hi];
    });
    return value;
}

/// Full field L(x, x + (i,j)) for the box [x, y]; entry (i,j).
template <class Source>
Eigen::ArrayXXd last_passage_field(const Source& src, const Point& x, const Point& y) {
    require_ordered(x, y);
    Eigen::ArrayXXd field(y.x - x.x + 1, y.y - x.y + 1);
    sweep_from(src, x, y, [&](Coord d, Coord lo, Coord hi, const double* v) {
        for (Coord i = lo; i <= hi; ++i) field(i, d - i) = v[i];
    });
    return field;
}

/// Walks predecessor bits from local (i,j) back to the origin; returns the
/// up-right path in global coordinates (origin + local).
LatticePath backtrack(const PredecessorField& bits, const Point& origin, Point local_end);

/// Maximizing path from x to y; ties prefer the vertical predecessor.
template <class Source>
LatticePath geodesic(const Source& src, const Point& x, const Point& y) {
    PredecessorField bits;
    sweep_from(src, x, y, IgnoreDiagonals{}, &bits);
    return backtrack(bits, x, y - x);
}

/// Start-exclusive weight of a path, summed in the same order as the sweep so
/// that path_weight(geodesic(x,y)) == last_passage(x,y) bit for bit.
template <class Source>
double path_weight(const Source& src, const LatticePath& path) {
    double acc = 0.0;
    for (std::size_t k = 1; k < path.points.size(); ++k)
        acc = static_cast<double>(src.weight(path.points[k])) + acc;
    return acc;
}

template <class Source>
void require_boundary(const Source& src) {
    if (kind_of(src) != EnvironmentKind::boundary) throw DomainError("operation requires a boundary environment");
}

/// Boundary-model last-passage time from the origin.
template <class Source>
double lbar(const Source& benv, const Point& x) {
    require_boundary(benv);
    return last_passage(benv, Point{0, 0}, x);
}

/// Last boundary vertex of the boundary-model geodesic to x, as a signed exit.
template <class Source>
ExitPoint exit_point(const Source& benv, const Point& x) {
    require_boundary(benv);
    if (x.x < 1 || x.y < 1) throw DomainError("exit point needs x >= (1,1)");
    const LatticePath path = geodesic(benv, Point{0, 0}, x);
    for (auto it = path.points.rbegin(); it != path.points.rend(); ++it)
        if (it->x == 0 || it->y == 0) return ExitPoint::from_axis_point(*it);
    throw DomainError("geodesic never touched the boundary");
}

/// Boundary mass M(z) for z in [lo, hi]: cumulative axis weights, M(0) = 0,
/// z > 0 along the horizontal axis and z < 0 up the vertical one.
/// Entry k corresponds to z = lo + k.
template <class Source>
Eigen::ArrayXd boundary_mass(const Source& benv, Coord lo, Coord hi) {
    require_boundary(benv);
    if (lo > 0 || hi < 0) throw DomainError("boundary mass range must contain 0");
    require_box(benv, Region{0, 0, hi, -lo});
    Eigen::ArrayXd m(hi - lo + 1);
    m(-lo) = 0.0;
    for (Coord z = 1; z <= hi; ++z) m(z - lo) = m(z - 1 - lo) + static_cast<double>(benv.weight(z, 0));
    for (Coord z = -1; z >= lo; --z) m(z - lo) = m(z + 1 - lo) + static_cast<double>(benv.weight(0, -z));
    return m;
}

/// G(v, x) for v in the strict interior box [1, x.x] x [1, x.y]: maximal
/// start-inclusive weight of up-right paths from v to x using interior sites
/// only. Entry (i,j) is v = (1+i, 1+j).
template <class Source>
Eigen::ArrayXXd interior_to_point(const Source& src, const Point& x) {
    if (x.x < 1 || x.y < 1) throw DomainError("interior target needs x >= (1,1)");
    require_box(src, Region{1, 1, x.x, x.y});
    const Eigen::Index w = x.x, h = x.y;
    Eigen::ArrayXXd g(w, h);
    for (Eigen::Index j = h - 1; j >= 0; --j) {
        for (Eigen::Index i = w - 1; i >= 0; --i) {
            const double right = i + 1 < w ? g(i + 1, j) : neg_inf;
            const double up = j + 1 < h ? g(i, j + 1) : neg_inf;
            const double best = (i + 1 == w && j + 1 == h) ? 0.0 : (right > up ? right : up);
            g(i, j) = static_cast<double>(src.weight(1 + i, 1 + j)) + best;
        }
    }
    return g;
}

/// Where the term z of the variational formula enters the strict interior.
constexpr Point variational_entry(Coord z) { return {z > 1 ? z : 1, z < -1 ? -z : 1}; }

/// Terms M(z) + L_z(x) of the variational formula for z in [-x.y, x.x];
/// entry k is z = k - x.y. L_z is the best interior path entering at
/// variational_entry(z); the z = 0 term uses entry (1,1) with M(0) = 0.
template <class Source>
Eigen::ArrayXd variational_terms(const Source& benv, const Point& x) {
    require_boundary(benv);
    const Eigen::ArrayXXd g = interior_to_point(benv, x);
    const Eigen::ArrayXd m = boundary_mass(benv, -x.y, x.x);
    Eigen::ArrayXd terms(m.size());
    for (Coord z = -x.y; z <= x.x; ++z) {
        const Point e = variational_entry(z);
        terms(z + x.y) = m(z + x.y) + g(e.x - 1, e.y - 1);
    }
    return terms;
}

/// Single term M(z) + L_z(x); z outside [-x.y, x.x] is a domain error.
template <class Source>
double variational_term(const Source& benv, const Point& x, Coord z) {
    if (z < -x.y || z > x.x) throw DomainError("variational index z outside [-n, x]");
    return variational_terms(benv, x)(z + x.y);
}

/// Exit point as the argmax of the variational formula (z = 0 excluded; its
/// term is dominated by z = +-1).
template <class Source>
ExitPoint variational_exit(const Source& benv, const Point& x) {
    const Eigen::ArrayXd terms = variational_terms(benv, x);
    Coord best_z = 0;
    double best = neg_inf;
    for (Coord z = -x.y; z <= x.x; ++z) {
        if (z == 0) continue;
        if (terms(z + x.y) > best) {
            best = terms(z + x.y);
            best_z = z;
        }
    }
    return ExitPoint(best_z);
}

/// Z(x, n) for x = 1..x_max, from one row-by-row pass over [0, x_max] x [0, n]
/// that carries exit labels along maximizing predecessors. Uses the same
/// arithmetic and tie rule as geodesic(), so it agrees with exit_point().
template <class Source>
std::vector<Coord> exit_profile(const Source& benv, Coord n, Coord x_max) {
    require_boundary(benv);
    if (n < 1 || x_max < 1) throw DomainError("exit profile needs n >= 1 and x_max >= 1");
    require_box(benv, Region{0, 0, x_max, n});
    const auto w = static_cast<std::size_t>(x_max) + 1;
    std::vector<double> val(w);
    std::vector<Coord> label(w);
    val[0] = 0.0;
    label[0] = 0;
    for (Coord x = 1; x <= x_max; ++x) {
        val[x] = static_cast<double>(benv.weight(x, 0)) + val[x - 1];
        label[x] = x;
    }
    for (Coord y = 1; y <= n; ++y) {
        val[0] = static_cast<double>(benv.weight(0, y)) + val[0];
        label[0] = -y;
        for (Coord x = 1; x <= x_max; ++x) {
            const double left = val[x - 1];
            const double down = val[x];
            const bool go_left = left > down;
            val[x] = static_cast<double>(benv.weight(x, y)) + (go_left ? left : down);
            // An axis predecessor is itself the exit; otherwise inherit.
            if (go_left) label[x] = (x - 1 == 0) ? -y : label[x - 1];
            else if (y - 1 == 0) label[x] = x;
        }
    }
    return {label.begin() + 1, label.end()};
}

struct ExitCountOptions {
    Coord initial_width = 0; ///< 0 means 2n
    Coord max_width = Coord{1} << 20;
};

/// Number of distinct z in [-m, m] attained by Z(x, n), x >= 1. Scans the
/// monotone profile x -> Z(x,n), widening the box until some Z(x,n) > m.
std::uint64_t exit_interval_count(const WeightLattice& benv, Coord n, Coord m,
                                  const ExitCountOptions& opts = {});

template <typename Scalar>
std::uint64_t exit_interval_count(const BasicEnvironment<Scalar>& benv, Coord n, Coord m,
                                  const ExitCountOptions& opts = {}) {
    return exit_interval_count(benv.lattice(), n, m, opts);
}

/// Counts distinct values in [-m, m] of a non-decreasing profile; shared by
/// exit and crossing scans.
std::uint64_t count_in_window(const std::vector<Coord>& profile, Coord m);

} // namespace lppd
