#pragma once

#include "lppd/env.hpp"
#include "lppd/lpp.hpp"
#include "lppd/sweep.hpp"

#include <optional>

namespace lppd {

enum class TreeBoundary {
    /// Every path ends at the far corner of the box (finite-target surrogate).
    point_target,
    /// The box is closed off on its far side by a row and a column of i.i.d.
    /// Exp(1/2) weights meeting at a zero-weight corner. Inside the box the
    /// resulting tree has exactly the law of the semi-infinite geodesic tree
    /// in direction (1,1); paths stop when they reach that boundary.
    stationary,
};

/// Geodesics from every site of a box toward one far target: the finite-N
/// stand-in for the tree of semi-infinite geodesics. For up_right the target
/// side is the upper-right corner of the box, for down_left the lower-left.
class GeodesicTree {
public:
    template <class Source>
    static GeodesicTree build(const Source& src, Orientation orientation, const Region& box,
                              TreeBoundary boundary = TreeBoundary::point_target) {
        box.validate();
        GeodesicTree tree;
        tree.orientation_ = orientation;
        tree.boundary_ = boundary;
        tree.box_ = box;
        const bool up = orientation == Orientation::up_right;
        Region swept = box;
        if (boundary == TreeBoundary::stationary) {
            // The boundary row and column are fresh lattice sites just
            // outside the box; doubling an Exp(1) weight gives Exp(1/2).
            if (up) swept = Region{box.x_min, box.y_min, box.x_max + 1, box.y_max + 1};
            else swept = Region{box.x_min - 1, box.y_min - 1, box.x_max, box.y_max};
        }
        require_box(src, swept);
        tree.swept_ = swept;
        const bool stationary = boundary == TreeBoundary::stationary;
        // Reflecting through the target turns "best continuation toward t"
        // into "best predecessor from t", which the forward sweep provides.
        const Coord ox = up ? swept.x_max : swept.x_min;
        const Coord oy = up ? swept.y_max : swept.y_min;
        const Coord sx = up ? -1 : 1;
        const Coord sy = up ? -1 : 1;
        sweep(
            swept.width(), swept.height(),
            [&src, ox, oy, sx, sy, stationary](Coord i, Coord j) {
                const double w = static_cast<double>(src.weight(ox + sx * i, oy + sy * j));
                // edge is 0 inside, 1 on the boundary row or column, 2 at
                // the corner, mapped to weight factors 1, 2 and 0.
                const int edge = static_cast<int>(i == 0) + static_cast<int>(j == 0);
                const int factor = stationary ? 1 + edge - 3 * static_cast<int>(edge == 2) : 1;
                return w * static_cast<double>(factor);
            },
            IgnoreDiagonals{}, &tree.bits_);
        return tree;
    }

    Orientation orientation() const noexcept { return orientation_; }
    TreeBoundary boundary() const noexcept { return boundary_; }
    /// Sites whose outgoing edge is meaningful.
    const Region& box() const noexcept { return box_; }
    /// Region actually swept (box plus the stationary boundary, if any).
    const Region& swept() const noexcept { return swept_; }
    Point target() const noexcept {
        return orientation_ == Orientation::up_right ? swept_.upper() : swept_.lower();
    }
    /// True once a path has left the box: reached the target corner or, for
    /// the stationary boundary, the boundary row or column.
    bool terminal(const Point& v) const noexcept {
        if (boundary_ == TreeBoundary::point_target) return v == target();
        return !box_.contains(v);
    }

    /// True when the tree edge out of v is horizontal (+e1 for up_right, -e1
    /// for down_left). v must lie in the box and not be terminal.
    bool horizontal(const Point& v) const {
        if (orientation_ == Orientation::up_right) {
            const Point local = swept_.upper() - v;
            return bits_.from_left(local.x, local.y);
        }
        const Point local = v - swept_.lower();
        return bits_.from_left(local.x, local.y);
    }

    Point next(const Point& v) const {
        if (orientation_ == Orientation::up_right) return v + (horizontal(v) ? e1 : e2);
        return v - (horizontal(v) ? e1 : e2);
    }

    /// Path from v until it is terminal.
    LatticePath path(Point v) const;

    struct Meeting {
        bool met = false;
        /// The first common vertex if met, else the terminal vertex that
        /// stopped the walk.
        Point at;
    };

    /// First common vertex of the paths from a and b. With the point target
    /// they always meet; with the stationary boundary a path may leave the
    /// box first.
    Meeting meet(Point a, Point b) const;

    std::size_t memory_bytes() const noexcept { return bits_.memory_bytes(); }

private:
    Orientation orientation_ = Orientation::up_right;
    TreeBoundary boundary_ = TreeBoundary::point_target;
    Region box_;
    Region swept_;
    PredecessorField bits_;
};

struct CoalescenceRecord {
    Point start_a;
    Point start_b;
    Point c;
    Coord T = 0;           ///< second coordinate of c
    Coord N_used = 0;      ///< scale whose answer was confirmed at 2N
    bool stabilized = false;
    /// Set when c sat at or beyond the horizon at two consecutive scales both
    /// well past it; T is then only known to be >= horizon.
    bool censored = false;
};

struct CoalescenceOptions {
    Coord N0 = 0;       ///< initial scale; 0 means 16 * max start coordinate
    Coord cap = 0;      ///< largest scale tried; 0 means 16 * N0
    Coord horizon = 0;  ///< 0 disables censoring
    Orientation orientation = Orientation::up_right;
};

/// Geodesic from x toward the surrogate target (N,N).
template <class Source>
LatticePath semi_geodesic(const Source& src, const Point& x, Coord N) {
    return geodesic(src, x, Point{N, N});
}

/// First common vertex of the geodesics from a and b toward (N,N) (up_right)
/// or (-N,-N) (down_left).
Point coalescence_at_scale(const WeightLattice& lattice, const Point& a, const Point& b, Coord N,
                           Orientation orientation = Orientation::up_right);

/// Coalescence point with the doubling protocol: N is doubled until the
/// answer at N and 2N agree (stabilized), the horizon rule censors the
/// record, or 2N would exceed the cap (unstabilized, last c reported).
CoalescenceRecord coalescence_point(const WeightLattice& lattice, const Point& a, const Point& b,
                                    const CoalescenceOptions& opts = {});

template <typename Scalar>
CoalescenceRecord coalescence_point(const BasicEnvironment<Scalar>& env, const Point& a, const Point& b,
                                    const CoalescenceOptions& opts = {}) {
    return coalescence_point(env.lattice(), a, b, opts);
}

/// c((m,0),(0,m)); defaults N0 = 16m and cap = 256m.
CoalescenceRecord coalescence_time(const WeightLattice& lattice, Coord m, CoalescenceOptions opts = {});

/// T_m sampled exactly in law from a stationary-boundary tree on the box
/// [0, width] x [0, horizon - 1]. Meeting inside the box gives T < horizon
/// (stabilized); a path reaching row `horizon` first gives a censored record
/// with T = horizon as a lower bound; a path leaving through the right edge
/// leaves the record unstabilized. width 0 means 4 * (horizon + m).
CoalescenceRecord sample_coalescence_time(const WeightLattice& lattice, Coord m, Coord horizon, Coord width = 0);

/// Recomputes c at factor * N_used and reports whether it matches.
bool recheck(const WeightLattice& lattice, const CoalescenceRecord& record, Coord factor = 4,
             Orientation orientation = Orientation::up_right);

} // namespace lppd
