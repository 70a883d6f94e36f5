#include "lppd/coalescence.hpp"

#include <algorithm>

namespace lppd {

LatticePath GeodesicTree::path(Point v) const {
    if (!box_.contains(v)) throw DomainError("start " + to_string(v) + " outside the tree box");
    LatticePath p;
    p.orientation = orientation_;
    p.points.push_back(v);
    while (!terminal(v)) {
        v = next(v);
        p.points.push_back(v);
    }
    return p;
}

GeodesicTree::Meeting GeodesicTree::meet(Point a, Point b) const {
    if (!box_.contains(a) || !box_.contains(b)) throw DomainError("start outside the tree box");
    // Walk in lockstep by anti-diagonal; the first equal pair is the first
    // common vertex because both paths cross every later diagonal once.
    const bool up = orientation_ == Orientation::up_right;
    while (a != b) {
        const bool move_a = up ? a.sum() <= b.sum() : a.sum() >= b.sum();
        Point& mover = move_a ? a : b;
        if (terminal(mover)) return {false, mover};
        mover = next(mover);
    }
    return {true, a};
}

Point coalescence_at_scale(const WeightLattice& lattice, const Point& a, const Point& b, Coord N,
                           Orientation orientation) {
    Region box;
    if (orientation == Orientation::up_right) {
        const Point lo = cmin(a, b);
        if (N < std::max({a.x, a.y, b.x, b.y})) throw DomainError("target scale below the start points");
        box = Region{lo.x, lo.y, N, N};
    } else {
        const Point hi = cmax(a, b);
        if (-N > std::min({a.x, a.y, b.x, b.y})) throw DomainError("target scale above the start points");
        box = Region{-N, -N, hi.x, hi.y};
    }
    if (box.area() > (std::uint64_t{1} << 36)) throw ResourceError("coalescence box too large");
    const GeodesicTree tree = GeodesicTree::build(lattice, orientation, box);
    return tree.meet(a, b).at;
}

CoalescenceRecord coalescence_point(const WeightLattice& lattice, const Point& a, const Point& b,
                                    const CoalescenceOptions& opts) {
    const bool up = opts.orientation == Orientation::up_right;
    const Coord reach = up ? std::max({a.x, a.y, b.x, b.y}) : -std::min({a.x, a.y, b.x, b.y});
    Coord N = opts.N0 > 0 ? opts.N0 : 16 * std::max<Coord>(reach, 1);
    if (N <= reach) throw DomainError("initial scale must exceed the start coordinates");
    const Coord cap = opts.cap > 0 ? opts.cap : 16 * N;

    CoalescenceRecord rec;
    rec.start_a = a;
    rec.start_b = b;
    if (a == b) {
        rec.c = a;
        rec.T = a.y;
        rec.N_used = N;
        rec.stabilized = true;
        return rec;
    }
    const Coord h = opts.horizon;
    Point prev = coalescence_at_scale(lattice, a, b, N, opts.orientation);
    for (;;) {
        rec.c = prev;
        rec.T = prev.y;
        rec.N_used = N;
        if (2 * N > cap) return rec;
        const Point next = coalescence_at_scale(lattice, a, b, 2 * N, opts.orientation);
        if (next == prev) {
            rec.stabilized = true;
            return rec;
        }
        if (up && h > 0 && prev.y >= h && next.y >= h && 2 * N >= 3 * h) {
            rec.censored = true;
            return rec;
        }
        N *= 2;
        prev = next;
    }
}

CoalescenceRecord coalescence_time(const WeightLattice& lattice, Coord m, CoalescenceOptions opts) {
    if (m < 1) throw DomainError("coalescence time needs m >= 1");
    if (opts.N0 == 0) opts.N0 = 16 * m;
    if (opts.cap == 0) opts.cap = 256 * m;
    opts.orientation = Orientation::up_right;
    return coalescence_point(lattice, Point{m, 0}, Point{0, m}, opts);
}

CoalescenceRecord sample_coalescence_time(const WeightLattice& lattice, Coord m, Coord horizon, Coord width) {
    if (m < 1) throw DomainError("coalescence time needs m >= 1");
    if (horizon <= m) throw DomainError("horizon must exceed m");
    if (width == 0) width = 4 * (horizon + m);
    if (width < m) throw DomainError("box narrower than the start points");
    const Region box{0, 0, width, horizon - 1};
    if (box.area() > (std::uint64_t{1} << 36)) throw ResourceError("coalescence box too large");
    const GeodesicTree tree = GeodesicTree::build(lattice, Orientation::up_right, box, TreeBoundary::stationary);
    const auto meeting = tree.meet(Point{m, 0}, Point{0, m});
    CoalescenceRecord rec;
    rec.start_a = Point{m, 0};
    rec.start_b = Point{0, m};
    rec.c = meeting.at;
    rec.T = meeting.at.y;
    rec.N_used = horizon;
    rec.stabilized = meeting.met || meeting.at.y >= horizon;
    rec.censored = !meeting.met && meeting.at.y >= horizon;
    return rec;
}

bool recheck(const WeightLattice& lattice, const CoalescenceRecord& record, Coord factor, Orientation orientation) {
    return coalescence_at_scale(lattice, record.start_a, record.start_b, factor * record.N_used, orientation) ==
           record.c;
}

} // namespace lppd
