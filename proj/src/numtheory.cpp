#include "latcount/numtheory.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include "latcount/stats.hpp"

namespace latcount {

TotientTable totient_sieve(std::int64_t N) {
    if (N < 1) throw std::invalid_argument("totient_sieve: N must be >= 1");
    TotientTable t;
    t.N = N;
    t.phi.assign(static_cast<std::size_t>(N) + 1, 0);
    std::vector<std::uint32_t> primes;
    t.phi[1] = 1;
    for (std::int64_t i = 2; i <= N; ++i) {
        if (t.phi[i] == 0) {
            t.phi[i] = static_cast<std::uint32_t>(i - 1);
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        for (std::uint32_t p : primes) {
            std::int64_t ip = i * p;
            if (ip > N) break;
            if (i % p == 0) {
                t.phi[ip] = t.phi[i] * p;
                break;
            }
            t.phi[ip] = t.phi[i] * (p - 1);
        }
    }
    return t;
}

double phi_ratio_range_sum(const TotientTable& table, std::int64_t lo, std::int64_t hi) {
    if (hi > table.N) throw std::out_of_range("phi_ratio_range_sum: table too small");
    CompensatedSum s;
    for (std::int64_t n = std::max<std::int64_t>(lo, 1); n <= hi; ++n)
        s.add(static_cast<double>(table.phi[n]) / static_cast<double>(n));
    return s.value();
}

double phi_ratio_partial_sum(const TotientTable& table, std::int64_t N) {
    return phi_ratio_range_sum(table, 1, N);
}

double phi_ratio_partial_sum(std::int64_t N) {
    if (N < 1) throw std::invalid_argument("phi_ratio_partial_sum: N must be >= 1");
    return phi_ratio_partial_sum(totient_sieve(N), N);
}

double walfisz_envelope(double N) {
    double L = std::log(N);
    return std::pow(L, 2.0 / 3.0) * std::pow(std::log(L), 4.0 / 3.0);
}

double zeta(double s) {
    if (!(s > 1.0)) throw std::domain_error("zeta: s must be > 1");
    // Euler-Maclaurin with head N and K Bernoulli corrections.
    constexpr int N = 12;
    constexpr int K = 12;
    CompensatedSum head;
    for (int n = N - 1; n >= 1; --n) head.add(std::pow(static_cast<double>(n), -s));
    const double Nd = N;
    double tail = std::pow(Nd, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(Nd, -s);
    // term_k = B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
    double rising = s;  // s(s+1)...(s+2k-2)
    double npow = std::pow(Nd, -s - 1.0);
    for (int k = 1; k <= K; ++k) {
        double b = boost::math::bernoulli_b2n<double>(k) / boost::math::factorial<double>(2 * k);
        tail += b * rising * npow;
        rising *= (s + 2 * k - 1) * (s + 2 * k);
        npow /= Nd * Nd;
    }
    head.add(tail);
    return head.value();
}

double direct_sum(const std::function<double(std::int64_t)>& coeff, std::int64_t s,
                  const std::function<double(double)>& f, double x) {
    CompensatedSum acc;
    const auto top = static_cast<std::int64_t>(std::floor(x));
    for (std::int64_t n = s; n <= top; ++n) acc.add(coeff(n) * f(static_cast<double>(n)));
    return acc.value();
}

AbelResult abel_sum(const std::function<double(std::int64_t)>& coeff, std::int64_t s,
                    const std::function<double(double)>& f,
                    const std::function<double(double)>& fprime, double x, AbelOptions opts) {
    AbelResult r;
    if (x < static_cast<double>(s)) return r;
    const auto top = static_cast<std::int64_t>(std::floor(x));

    CompensatedSum A, integral;
    for (std::int64_t k = s; k <= top; ++k) {
        A.add(coeff(k));
        // A(t) is constant on [k, min(k+1, x)]
        const double a = static_cast<double>(k);
        const double b = std::min(static_cast<double>(k + 1), x);
        if (b <= a) continue;
        double piece;
        if (opts.exact_antiderivative) {
            piece = f(b) - f(a);
        } else {
            piece = boost::math::quadrature::gauss<double, 20>::integrate(fprime, a, b);
        }
        integral.add(A.value() * piece);
    }
    r.boundary = A.value() * f(x);
    r.integral = integral.value();
    r.value = r.boundary - r.integral;
    return r;
}

}  // namespace latcount
