#include "latcount/stats.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace latcount {

void RunningStats::push(double x) {
    ++n_;
    double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    mean_ += delta * nb / n;
    m2_ += other.m2_ + delta * delta * na * nb / n;
    n_ += other.n_;
}

double RunningStats::variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::std_error() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

namespace {

int concordance(std::span<const double> ys) {
    int s = 0;
    for (std::size_t i = 0; i < ys.size(); ++i)
        for (std::size_t j = i + 1; j < ys.size(); ++j) {
            if (ys[j] > ys[i]) ++s;
            else if (ys[j] < ys[i]) --s;
        }
    return s;
}

}  // namespace

KendallResult kendall_trend(std::span<const double> ys) {
    KendallResult r;
    r.n = static_cast<int>(ys.size());
    if (r.n < 2) return r;
    const int pairs = r.n * (r.n - 1) / 2;
    const int S = concordance(ys);
    r.tau = static_cast<double>(S) / pairs;

    if (r.n <= 9) {
        // Enumerate all permutations of ranks.
        std::vector<double> perm(ys.size());
        std::iota(perm.begin(), perm.end(), 0.0);
        long total = 0, ge = 0, abs_ge = 0;
        do {
            int s = concordance(perm);
            ++total;
            if (s >= S) ++ge;
            if (std::abs(s) >= std::abs(S)) ++abs_ge;
        } while (std::next_permutation(perm.begin(), perm.end()));
        r.p_increasing = static_cast<double>(ge) / total;
        r.p_value = static_cast<double>(abs_ge) / total;
        r.exact = true;
    } else {
        const double n = r.n;
        const double var = n * (n - 1) * (2 * n + 5) / 18.0;
        const double z = (std::abs(S) > 0 ? (std::abs(S) - 1.0) : 0.0) / std::sqrt(var);
        boost::math::normal_distribution<> nd;
        r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(nd, z)));
        const double zs = (S - (S > 0 ? 1.0 : S < 0 ? -1.0 : 0.0)) / std::sqrt(var);
        r.p_increasing = boost::math::cdf(boost::math::complement(nd, zs));
    }
    return r;
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols_slope: need >= 2 paired points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols_slope: degenerate x");
    return sxy / sxx;
}

}  // namespace latcount
