#include "latcount/moment2d.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/constants/constants.hpp>

#include "latcount/numtheory.hpp"
#include "latcount/stats.hpp"

namespace latcount {

namespace {

std::int64_t n_cutoff(double c, double T) { return static_cast<std::int64_t>(std::floor(c * T + c / T)); }

}  // namespace

KyResult ky_second_norm(double c, double T, bool quadrature_check) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("ky_second_norm: c must be > 0");
    if (!(T >= 1.0) || !std::isfinite(T)) throw std::invalid_argument("ky_second_norm: T must be >= 1");
    KyResult r;
    r.c = c;
    r.T = T;
    if (T == 1.0) return r;

    r.area = 2.0 * c * std::log(T);
    r.overlap = 0.0;  // P lies in v2 > 1, -P in v2 < -1
    r.n_max = n_cutoff(c, T);
    const TotientTable phi = totient_sieve(std::max<std::int64_t>(r.n_max, 1));
    CompensatedSum sum, eps, qsum;
    for (std::int64_t n = 1; n <= r.n_max; ++n) {
        IntegralBreakdown b = full_integral(n, c, T);
        const double w = static_cast<double>(phi(n)) / static_cast<double>(n);
        sum.add(w * b.total);
        eps.add(w * b.epsilon_y4);
        if (quadrature_check) qsum.add(w * segment_quadrature(n, c, T));
        r.terms.push_back(b);
    }
    const double z2 = zeta(2.0);
    r.sum = sum.value();
    r.epsilon_y4 = eps.value();
    r.value = (r.area + r.overlap + 2.0 * r.sum) / z2;
    if (quadrature_check) r.quadrature_value = (r.area + r.overlap + 2.0 * qsum.value()) / z2;
    return r;
}

CenteredMoment centered_second_moment(double c, double T) {
    CenteredMoment m;
    const KyResult ky = ky_second_norm(c, T);
    if (T == 1.0) return m;
    m.ky = ky.value;
    m.mean_sq = std::pow(ky.area / zeta(2.0), 2);
    m.value = m.ky - m.mean_sq;
    m.ratio = m.value / std::log(T);
    return m;
}

PhiWeightedSum phi_weighted_sum(double c, double T) {
    if (!(c > 0.0)) throw std::invalid_argument("phi_weighted_sum: c must be > 0");
    if (!(T > 2.0 * c + 1.0)) throw std::invalid_argument("phi_weighted_sum: need T > 2c + 1");
    PhiWeightedSum s;
    s.n_lo = static_cast<std::int64_t>(std::ceil(2.0 * c));
    s.n_hi = n_cutoff(c, T);
    const double x = c * T + c / T;
    const TotientTable phi = totient_sieve(std::max(s.n_hi, s.n_lo));
    const double c4 = 4.0 * c * c;
    auto coeff = [&](std::int64_t n) { return static_cast<double>(phi(n)) / static_cast<double>(n); };
    auto f = [&](double t) { return c4 / t * std::log(T / t); };
    auto fp = [&](double t) { return -c4 * (std::log(T / t) + 1.0) / (t * t); };
    s.direct = direct_sum(coeff, s.n_lo, f, x);
    s.abel = abel_sum(coeff, s.n_lo, f, fp, x, AbelOptions{true}).value;

    const double z2 = zeta(2.0), L = std::log(T);
    s.leading = c4 / (2.0 * z2) * L * L;
    // sum_{n<=N} phi(n)/n^2 = (log N + gamma - zeta'(2)/zeta(2)) / zeta(2) + o(1); the log c
    // shift of N = cT cancels in the linear term, the head n < n_lo does not.
    const double log_glaisher = 0.24875447703378426;
    const double zeta_log_deriv =
        boost::math::constants::euler<double>() + std::log(2.0 * boost::math::constants::pi<double>()) - 12.0 * log_glaisher;
    const double gamma2 = boost::math::constants::euler<double>() - zeta_log_deriv;
    double head = 0.0;
    for (std::int64_t n = 1; n < s.n_lo; ++n) head += static_cast<double>(phi(n)) / static_cast<double>(n * n);
    s.two_term = c4 * ((L * L / 2.0 + gamma2 * L) / z2 - head * L);
    return s;
}

}  // namespace latcount
