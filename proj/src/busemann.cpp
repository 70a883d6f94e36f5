#include "lppd/busemann.hpp"

#include <algorithm>

namespace lppd {

EdgeField::EdgeField(const Region& window, Orientation orientation) : window_(window), orientation_(orientation) {
    const std::uint64_t area = window.area();
    if (area > max_materialized_sites) throw ResourceError("edge field window too large");
    steps_.setZero(static_cast<Eigen::Index>(area));
}

std::vector<std::uint64_t> EdgeField::runs() const {
    std::vector<std::uint64_t> out;
    std::uint8_t current = 0;
    std::uint64_t run = 0;
    for (Eigen::Index k = 0; k < steps_.size(); ++k) {
        if (steps_(k) != current) {
            out.push_back(run);
            run = 0;
            current = steps_(k);
        }
        ++run;
    }
    out.push_back(run);
    return out;
}

nlohmann::json EdgeField::header() const {
    return {{"window", lppd::to_json(window_)},
            {"orientation", orientation_ == Orientation::up_right ? "up_right" : "down_left"},
            {"order", "row_major"},
            {"first_run", "toward_e2"}};
}

nlohmann::json EdgeField::to_json() const { return {{"header", header()}, {"runs", runs()}}; }

EdgeField EdgeField::from_json(const nlohmann::json& j) {
    const auto& h = j.at("header");
    const std::string o = h.at("orientation").get<std::string>();
    if (o != "up_right" && o != "down_left") throw DomainError("unknown orientation '" + o + "'");
    EdgeField f(region_from_json(h.at("window")), o == "up_right" ? Orientation::up_right : Orientation::down_left);
    Eigen::Index k = 0;
    std::uint8_t current = 0;
    for (const auto& r : j.at("runs")) {
        const auto len = r.get<std::uint64_t>();
        if (k + static_cast<Eigen::Index>(len) > f.steps_.size()) throw DomainError("edge field runs overflow window");
        f.steps_.segment(k, static_cast<Eigen::Index>(len)).setConstant(current);
        k += static_cast<Eigen::Index>(len);
        current ^= 1U;
    }
    if (k != f.steps_.size()) throw DomainError("edge field runs do not cover the window");
    return f;
}

EdgeField downleft_tree(const WeightLattice& lattice, const Region& window, Coord N, TreeBoundary boundary) {
    window.validate();
    Region box = window;
    if (boundary == TreeBoundary::point_target) {
        if (-N >= std::min(window.x_min, window.y_min)) throw DomainError("target (-N,-N) must lie below the window");
        box = Region{-N, -N, window.x_max, window.y_max};
    }
    const GeodesicTree tree = GeodesicTree::build(lattice, Orientation::down_left, box, boundary);
    EdgeField field(window, Orientation::down_left);
    for (Coord y = window.y_min; y <= window.y_max; ++y)
        for (Coord x = window.x_min; x <= window.x_max; ++x)
            field.set({x, y}, tree.horizontal({x, y}) ? Step::toward_e1 : Step::toward_e2);
    return field;
}

EdgeField dual_tree(const EdgeField& tree) {
    if (tree.orientation() != Orientation::down_left) throw DomainError("dual_tree expects a down-left tree");
    const Region& w = tree.window();
    if (w.width() < 2 || w.height() < 2) throw DomainError("dual tree needs a one-vertex margin");
    const Region dual_window{w.x_min, w.y_min, w.x_max - 1, w.y_max - 1};
    EdgeField dual(dual_window, Orientation::up_right);
    for (Coord y = dual_window.y_min; y <= dual_window.y_max; ++y)
        for (Coord x = dual_window.x_min; x <= dual_window.x_max; ++x)
            dual.set({x, y}, tree.step(Point{x, y} + diag));
    return dual;
}

ExitPoint crossing_point(const EdgeField& tree, Coord x, Coord n) {
    if (tree.orientation() != Orientation::down_left) throw DomainError("crossing_point expects a down-left tree");
    if (x < 1 || n < 1) throw DomainError("crossing point needs (x,n) >= (1,1)");
    Point v{x, n};
    while (v.x >= 1 && v.y >= 1) v = tree.next(v);
    return ExitPoint::from_axis_point(v);
}

std::vector<Coord> crossing_profile(const EdgeField& tree, Coord n, Coord x_max) {
    std::vector<Coord> out;
    out.reserve(static_cast<std::size_t>(std::max<Coord>(x_max, 0)));
    for (Coord x = 1; x <= x_max; ++x) out.push_back(crossing_point(tree, x, n).value());
    return out;
}

namespace {

BusemannValue difference_against(const WeightLattice& lattice, const Point& x, const Point& y,
                                  const CoalescenceRecord& rec, bool up) {
    BusemannValue b{x, y, 0.0, rec.c, rec.stabilized};
    if (x == y) return b;
    if (up) {
        b.value = last_passage(lattice, y, rec.c) - last_passage(lattice, x, rec.c);
    } else {
        const Eigen::ArrayXXd f = last_passage_field(lattice, rec.c, cmax(x, y));
        const Point lx = x - rec.c, ly = y - rec.c;
        b.value = f(ly.x, ly.y) - f(lx.x, lx.y);
    }
    return b;
}

} // namespace

BusemannValue busemann_up(const WeightLattice& lattice, const Point& x, const Point& y,
                          const CoalescenceOptions& opts) {
    CoalescenceOptions o = opts;
    o.orientation = Orientation::up_right;
    return difference_against(lattice, x, y, coalescence_point(lattice, x, y, o), true);
}

BusemannValue busemann_down(const WeightLattice& lattice, const Point& x, const Point& y,
                            const CoalescenceOptions& opts) {
    CoalescenceOptions o = opts;
    o.orientation = Orientation::down_left;
    return difference_against(lattice, x, y, coalescence_point(lattice, x, y, o), false);
}

double busemann_up_at(const WeightLattice& lattice, const Point& x, const Point& y, const Point& c) {
    return last_passage(lattice, y, c) - last_passage(lattice, x, c);
}

PathwiseRecord pathwise_events_at_scale(const WeightLattice& lattice, Coord m, Coord n, Coord window, Coord N) {
    if (m < 1 || n <= m) throw DomainError("pathwise identity needs n > m >= 1");
    if (window <= m + 1) throw DomainError("window too small for m");
    PathwiseRecord rec;
    rec.N_used = N;
    const EdgeField tree = downleft_tree(lattice, Region{0, 0, window, n + 1}, N);
    const EdgeField dual = dual_tree(tree);
    const Region& dw = dual.window();

    // Dual paths from (m,0)* and (0,m)*, walked in lockstep by anti-diagonal
    // until they meet or one reaches row n.
    Point a{m, 0}, b{0, m};
    for (;;) {
        if (a == b) {
            rec.dual_c = a;
            rec.lhs = true;
            break;
        }
        Point& mover = a.sum() <= b.sum() ? a : b;
        const Point nxt = dual.next(mover);
        if (nxt.y >= n) break;
        if (!dw.contains(nxt)) {
            rec.valid = false;
            return rec;
        }
        mover = nxt;
    }

    // Crossing scan at height n, widening until a crossing passes z = m.
    Coord last = 0;
    std::vector<Coord> profile;
    for (Coord x = 1; x <= window; ++x) {
        last = crossing_point(tree, x, n).value();
        profile.push_back(last);
        if (last > m) break;
    }
    if (last <= m) {
        rec.valid = false;
        return rec;
    }
    rec.crossing_count = count_in_window(profile, m);
    rec.rhs = rec.crossing_count == 0;
    return rec;
}

PathwiseRecord pathwise_duality_event(const WeightLattice& lattice, Coord m, Coord n, const PathwiseOptions& opts) {
    Coord N = opts.N0 > 0 ? opts.N0 : opts.window;
    const Coord cap = opts.cap > 0 ? opts.cap : 8 * N;
    PathwiseRecord prev = pathwise_events_at_scale(lattice, m, n, opts.window, N);
    for (;;) {
        if (2 * N > cap) return prev;
        PathwiseRecord next = pathwise_events_at_scale(lattice, m, n, opts.window, 2 * N);
        if (prev.valid && next.valid && prev.lhs == next.lhs && prev.rhs == next.rhs &&
            prev.crossing_count == next.crossing_count) {
            prev.stabilized = true;
            return prev;
        }
        N *= 2;
        prev = next;
    }
}

} // namespace lppd
