#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace latcount {

struct TotientTable {
    std::int64_t N = 0;
    std::vector<std::uint32_t> phi;  // phi[0] is unused

    std::int64_t operator()(std::int64_t n) const { return phi.at(static_cast<std::size_t>(n)); }
};

// Linear sieve, O(N).
TotientTable totient_sieve(std::int64_t N);

// sum_{n<=N} phi(n)/n
double phi_ratio_partial_sum(std::int64_t N);
double phi_ratio_partial_sum(const TotientTable& table, std::int64_t N);

// sum_{lo<=n<=hi} phi(n)/n, the partial sum recentred at lo
double phi_ratio_range_sum(const TotientTable& table, std::int64_t lo, std::int64_t hi);

// (log N)^{2/3} (log log N)^{4/3}; requires N > e
double walfisz_envelope(double N);

// Riemann zeta for real s > 1 (Euler-Maclaurin).
double zeta(double s);

struct AbelOptions {
    // When true the integral of A(t) f'(t) over each unit interval is taken as
    // A * (f(b) - f(a)); otherwise f' is integrated by Gauss-Legendre.
    bool exact_antiderivative = false;
};

struct AbelResult {
    double boundary = 0.0;  // A(x) f(x)
    double integral = 0.0;  // int_s^x A(t) f'(t) dt
    double value = 0.0;
};

// (sum_{s<=n<=x} c_n) f(x) - int_s^x (sum_{s<=n<=t} c_n) f'(t) dt
AbelResult abel_sum(const std::function<double(std::int64_t)>& coeff, std::int64_t s,
                    const std::function<double(double)>& f,
                    const std::function<double(double)>& fprime, double x,
                    AbelOptions opts = {});

double direct_sum(const std::function<double(std::int64_t)>& coeff, std::int64_t s,
                  const std::function<double(double)>& f, double x);

}  // namespace latcount
