#ifndef SENTINEL_STATS_HPP
#define SENTINEL_STATS_HPP

#include <cstddef>
#include <vector>

namespace sentinel::stats {

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // population variance
double std_dev(const std::vector<double>& v);

/// Pearson correlation; returns 0 when either series is constant.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

/**
 * Empirical percentile with linear interpolation between order statistics,
 * q in [0, 100]. Matches numpy's default ("linear") definition.
 */
double percentile(std::vector<double> v, double q);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value for Pearson r with n samples (t-distributed statistic).
double pearson_p_value(double r, std::size_t n);

/// Upper tail P(F >= f) for an F(d1, d2) statistic.
double f_sf(double f, double d1, double d2);

/// Numerically stable streaming mean/variance accumulator.
class Welford {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 0 ? m2_ / static_cast<double>(n_) : 0.0; }
    double std_dev() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace sentinel::stats

#endif
