#include "lppd/stats.hpp"

#include <algorithm>
#include <cmath>

namespace lppd {

double dkw_radius(Eigen::Index n, double alpha) {
    if (n <= 0) throw DomainError("DKW radius needs a non-empty sample");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

double two_sample_radius(Eigen::Index n1, Eigen::Index n2, double alpha) {
    if (n1 <= 0 || n2 <= 0) throw DomainError("two-sample radius needs non-empty samples");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    const double a = static_cast<double>(n1), b = static_cast<double>(n2);
    return std::sqrt(std::log(2.0 / alpha) / 2.0 * (a + b) / (a * b));
}

EmpiricalDistribution::EmpiricalDistribution(Eigen::ArrayXd samples) : samples_(std::move(samples)) {
    if (samples_.isNaN().any()) throw DomainError("empirical distribution received NaN");
    std::sort(samples_.data(), samples_.data() + samples_.size());
}

double EmpiricalDistribution::cdf(double x) const {
    if (empty()) throw DomainError("ECDF of an empty sample");
    const double* b = samples_.data();
    const double* e = b + samples_.size();
    return static_cast<double>(std::upper_bound(b, e, x) - b) / static_cast<double>(samples_.size());
}

double EmpiricalDistribution::quantile(double p) const {
    if (empty()) throw DomainError("quantile of an empty sample");
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in (0,1]");
    const auto n = static_cast<double>(samples_.size());
    auto k = static_cast<Eigen::Index>(std::ceil(p * n)) - 1;
    k = std::clamp<Eigen::Index>(k, 0, samples_.size() - 1);
    return samples_(k);
}

double EmpiricalDistribution::mean() const {
    if (empty()) throw DomainError("mean of an empty sample");
    return samples_.mean();
}

double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    if (a.empty() || b.empty()) throw DomainError("KS distance needs non-empty samples");
    const Eigen::ArrayXd& x = a.samples();
    const Eigen::ArrayXd& y = b.samples();
    const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
    Eigen::Index i = 0, j = 0;
    double d = 0.0;
    // Walk the merged jump points; ties are consumed together.
    while (i < x.size() && j < y.size()) {
        const double t = std::min(x(i), y(j));
        while (i < x.size() && x(i) == t) ++i;
        while (j < y.size() && y(j) == t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_distance(const EmpiricalDistribution& a, const std::function<double(double)>& cdf) {
    if (a.empty()) throw DomainError("KS distance needs a non-empty sample");
    const Eigen::ArrayXd& x = a.samples();
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    Eigen::Index i = 0;
    while (i < x.size()) {
        const double t = x(i);
        const double below = static_cast<double>(i) / n;
        while (i < x.size() && x(i) == t) ++i;
        const double at = static_cast<double>(i) / n;
        const double f = std::isinf(t) && t > 0 ? 1.0 : cdf(t);
        d = std::max({d, std::abs(at - f), std::abs(f - below)});
    }
    return d;
}

double exponential_cdf(double rate, double x) {
    if (!(rate > 0.0)) throw DomainError("exponential rate must be positive");
    return x <= 0.0 ? 0.0 : -std::expm1(-rate * x);
}

} // namespace lppd
