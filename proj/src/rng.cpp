#include "lppd/rng.hpp"

#include "lppd/types.hpp"

namespace lppd {

double sample_exp(double rate, double u) {
    if (!(rate > 0.0)) throw DomainError("exponential rate must be positive");
    if (!(u > 0.0 && u < 1.0)) throw DomainError("uniform variate must lie in (0,1)");
    return detail::neg_log_open_unit(u) / rate;
}

} // namespace lppd
