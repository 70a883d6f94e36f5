#include "lppd/lpp.hpp"

#include <algorithm>

namespace lppd {

LatticePath backtrack(const PredecessorField& bits, const Point& origin, Point local_end) {
    if (local_end.x < 0 || local_end.y < 0 || local_end.x >= bits.width() || local_end.y >= bits.height())
        throw DomainError("backtrack start outside the swept box");
    LatticePath path;
    path.orientation = Orientation::up_right;
    path.points.reserve(static_cast<std::size_t>(local_end.sum()) + 1);
    Point p = local_end;
    path.points.push_back(origin + p);
    while (p.x != 0 || p.y != 0) {
        if (p.y == 0 || (p.x > 0 && bits.from_left(p.x, p.y))) --p.x;
        else --p.y;
        path.points.push_back(origin + p);
    }
    std::reverse(path.points.begin(), path.points.end());
    return path;
}

std::uint64_t count_in_window(const std::vector<Coord>& profile, Coord m) {
    std::uint64_t count = 0;
    bool have = false;
    Coord last = 0;
    for (std::size_t k = 0; k < profile.size(); ++k) {
        if (k > 0 && profile[k] < profile[k - 1]) throw DomainError("profile is not monotone");
        const Coord z = profile[k];
        if (z < -m || z > m) continue;
        if (!have || z != last) ++count;
        have = true;
        last = z;
    }
    return count;
}

std::uint64_t exit_interval_count(const WeightLattice& benv, Coord n, Coord m, const ExitCountOptions& opts) {
    if (m < 1 || m >= n) throw DomainError("exit interval count needs 1 <= m < n");
    Coord width = opts.initial_width > 0 ? opts.initial_width : 2 * n;
    for (;;) {
        const std::vector<Coord> profile = exit_profile(benv, n, width);
        if (profile.back() > m) return count_in_window(profile, m);
        if (width >= opts.max_width)
            throw ResourceError("exit scan reached width " + std::to_string(width) + " without passing z = " +
                                std::to_string(m));
        width = std::min(2 * width, opts.max_width);
    }
}

} // namespace lppd
