#pragma once

#include "lppd/coalescence.hpp"
#include "lppd/env.hpp"
#include "lppd/lpp.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lppd {

enum class Step : std::uint8_t { toward_e2 = 0, toward_e1 = 1 };

/// One outgoing unit edge per vertex of a window: a geodesic tree (down_left,
/// edges to v - e) or its dual (up_right, edges to v + e). Dual vertices
/// v* = v + (1/2,1/2) are stored by their integer index v.
class EdgeField {
public:
    EdgeField() = default;
    EdgeField(const Region& window, Orientation orientation);

    const Region& window() const noexcept { return window_; }
    Orientation orientation() const noexcept { return orientation_; }

    Step step(const Point& v) const { return static_cast<Step>(steps_(index(v))); }
    void set(const Point& v, Step s) { steps_(index(v)) = static_cast<std::uint8_t>(s); }

    Point next(const Point& v) const {
        const Point e = step(v) == Step::toward_e1 ? e1 : e2;
        return orientation_ == Orientation::up_right ? v + e : v - e;
    }

    /// Number of vertices whose edge is toward_e1.
    std::int64_t count_e1() const { return steps_.cast<std::int64_t>().sum(); }

    friend bool operator==(const EdgeField& a, const EdgeField& b) {
        return a.window_ == b.window_ && a.orientation_ == b.orientation_ && (a.steps_ == b.steps_).all();
    }

    /// Run-length encoding of the step bits in row-major order (y outer):
    /// the first run counts toward_e2 vertices, runs then alternate.
    std::vector<std::uint64_t> runs() const;
    nlohmann::json header() const;
    /// {"header": ..., "runs": [...]}
    nlohmann::json to_json() const;
    static EdgeField from_json(const nlohmann::json& j);

private:
    Eigen::Index index(const Point& v) const {
        if (!window_.contains(v)) throw DomainError("vertex " + to_string(v) + " outside edge field");
        return static_cast<Eigen::Index>((v.y - window_.y_min) * window_.width() + (v.x - window_.x_min));
    }

    Region window_;
    Orientation orientation_ = Orientation::down_left;
    Eigen::Array<std::uint8_t, Eigen::Dynamic, 1> steps_;
};

/// Down-left geodesic tree restricted to `window`. With the point target the
/// paths run to (-N,-N); the window must lie above it.
EdgeField downleft_tree(const WeightLattice& lattice, const Region& window, Coord N,
                        TreeBoundary boundary = TreeBoundary::point_target);

/// Dual of a down-left tree: the edge out of v* is +e1 when the primal edge
/// out of v + (1,1) goes left and +e2 when it goes down. The dual window is
/// the primal window shrunk by one on the upper-right.
EdgeField dual_tree(const EdgeField& tree);

/// Z(x, n) crossing: the first positive-axis vertex on the tree path from
/// (x, n); the step into it always comes from the open quadrant.
ExitPoint crossing_point(const EdgeField& tree, Coord x, Coord n);

/// crossing_point for x = 1..x_max.
std::vector<Coord> crossing_profile(const EdgeField& tree, Coord n, Coord x_max);

struct BusemannValue {
    Point x;
    Point y;
    double value = 0.0;
    Point c;                 ///< coalescence point the value was taken against
    bool stabilized = false;
};

/// B(x,y) = L(y,c) - L(x,c) against the up-right coalescence point of x, y.
BusemannValue busemann_up(const WeightLattice& lattice, const Point& x, const Point& y,
                          const CoalescenceOptions& opts = {});

/// B(x,y) = L(c,y) - L(c,x) against the down-left coalescence point of x, y.
BusemannValue busemann_down(const WeightLattice& lattice, const Point& x, const Point& y,
                            const CoalescenceOptions& opts = {});

/// Up-right Busemann difference taken against an explicit common point c.
double busemann_up_at(const WeightLattice& lattice, const Point& x, const Point& y, const Point& c);

struct PathwiseOptions {
    Coord window = 256;   ///< primal window is [0, window] x [0, n + 1]
    Coord N0 = 0;         ///< initial down-left target scale; 0 means window
    Coord cap = 0;        ///< 0 means 8 * N0
};

struct PathwiseRecord {
    bool lhs = false;          ///< dual coalescence time T*_m < n
    bool rhs = false;          ///< no crossing in [-m, m] at height n
    std::uint64_t crossing_count = 0;
    std::optional<Point> dual_c;  ///< dual coalescence index when it lies below row n
    Coord N_used = 0;
    bool stabilized = false;   ///< events identical at N_used and 2 N_used
    bool valid = true;         ///< no path left the window
};

/// Both sides of the non-crossing identity on one environment at one scale.
PathwiseRecord pathwise_events_at_scale(const WeightLattice& lattice, Coord m, Coord n, Coord window, Coord N);

/// pathwise_events_at_scale with target doubling until two scales agree.
PathwiseRecord pathwise_duality_event(const WeightLattice& lattice, Coord m, Coord n,
                                      const PathwiseOptions& opts = {});

} // namespace lppd
