#pragma once

#include "lppd/types.hpp"

#include <Eigen/Core>

#include <functional>

namespace lppd {

/// DKW radius: sup |F_n - F| <= radius with probability >= 1 - alpha.
double dkw_radius(Eigen::Index n, double alpha = 0.01);

/// Two-sample analogue: sqrt(ln(2/alpha)/2 * (n1 + n2)/(n1 n2)).
double two_sample_radius(Eigen::Index n1, Eigen::Index n2, double alpha = 0.01);

/// Sorted sample with right-continuous ECDF. +inf is allowed and stands for
/// a censored observation beyond every finite threshold; NaN is rejected.
class EmpiricalDistribution {
public:
    EmpiricalDistribution() = default;
    explicit EmpiricalDistribution(Eigen::ArrayXd samples);

    Eigen::Index size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.size() == 0; }
    const Eigen::ArrayXd& samples() const noexcept { return samples_; }

    /// Fraction of samples <= x.
    double cdf(double x) const;
    /// Fraction of samples > x.
    double survival(double x) const { return 1.0 - cdf(x); }
    /// Smallest sample s with cdf(s) >= p, p in (0,1].
    double quantile(double p) const;
    double median() const { return quantile(0.5); }
    double mean() const;
    double dkw(double alpha = 0.01) const { return dkw_radius(size(), alpha); }

private:
    Eigen::ArrayXd samples_;
};

/// sup_x |F_a(x) - F_b(x)|.
double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// sup_x |F_n(x) - F(x)| against a continuous CDF F (F(+inf) = 1).
double ks_distance(const EmpiricalDistribution& a, const std::function<double(double)>& cdf);

/// CDF of Exp(rate).
double exponential_cdf(double rate, double x);

} // namespace lppd
