#include "lppd/types.hpp"

#include <limits>
#include <sstream>

namespace lppd {

std::ostream& operator<<(std::ostream& os, const Point& p) {
    return os << '(' << p.x << ',' << p.y << ')';
}

std::string to_string(const Point& p) {
    std::ostringstream os;
    os << p;
    return os.str();
}

void Region::validate() const {
    if (x_min > x_max || y_min > y_max)
        throw DomainError("empty region [" + std::to_string(x_min) + "," + std::to_string(x_max) +
                          "]x[" + std::to_string(y_min) + "," + std::to_string(y_max) + "]");
}

std::uint64_t Region::area() const {
    validate();
    const auto w = static_cast<std::uint64_t>(width());
    const auto h = static_cast<std::uint64_t>(height());
    if (h != 0 && w > std::numeric_limits<std::uint64_t>::max() / h)
        throw ResourceError("region area overflows");
    return w * h;
}

bool LatticePath::is_valid() const {
    const Point a = orientation == Orientation::up_right ? e1 : -e1;
    const Point b = orientation == Orientation::up_right ? e2 : -e2;
    for (std::size_t k = 1; k < points.size(); ++k) {
        const Point d = points[k] - points[k - 1];
        if (d != a && d != b) return false;
    }
    return true;
}

ExitPoint::ExitPoint(Coord z) : z_(z) {
    if (z == 0) throw DomainError("exit point value must be nonzero");
}

ExitPoint ExitPoint::from_axis_point(const Point& p) {
    if (p.y == 0 && p.x > 0) return ExitPoint(p.x);
    if (p.x == 0 && p.y > 0) return ExitPoint(-p.y);
    throw DomainError("point " + to_string(p) + " is not on a positive axis");
}

} // namespace lppd
