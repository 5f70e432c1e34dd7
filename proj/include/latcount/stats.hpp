#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace latcount {

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double v) {
        double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Welford accumulator with Chan's parallel merge.
class RunningStats {
public:
    void push(double x);
    void merge(const RunningStats& other);

    std::int64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const;  // unbiased
    double stddev() const { return std::sqrt(variance()); }
    double std_error() const;

private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct KendallResult {
    double tau = 0.0;
    double p_value = 1.0;     // two-sided
    double p_increasing = 1.0;  // one-sided, alternative: positive trend
    int n = 0;
    bool exact = false;
};

// Kendall rank correlation of ys against their index order.  Exact
// permutation distribution for n <= 9, normal approximation above.
KendallResult kendall_trend(std::span<const double> ys);

// Ordinary least squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

// sup |F_n - F| for sorted samples against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf cdf);

// Asymptotic critical value of the one-sample KS statistic at level 1%.
inline double ks_critical_1pct(std::int64_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

}  // namespace latcount

#include <algorithm>

template <class Cdf>
double latcount::ks_statistic(std::vector<double> samples, Cdf cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double F = cdf(samples[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    return d;
}
