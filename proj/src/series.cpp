#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "latcount/moment2d.hpp"

namespace latcount {

const char* to_string(SeriesKind k) {
    switch (k) {
        case SeriesKind::LogSqrtPlus: return "log-sqrt-plus";
        case SeriesKind::LogRatio: return "log-ratio";
        case SeriesKind::SqrtDifference: return "sqrt-difference";
        case SeriesKind::SqrtPlusLog: return "sqrt-plus-log";
        case SeriesKind::SqrtMinusLog: return "sqrt-minus-log";
        case SeriesKind::SquaredLog: return "squared-log";
    }
    return "?";
}

std::optional<SeriesKind> series_kind_from_string(const std::string& s) {
    for (SeriesKind k : {SeriesKind::LogSqrtPlus, SeriesKind::LogRatio, SeriesKind::SqrtDifference,
                         SeriesKind::SqrtPlusLog, SeriesKind::SqrtMinusLog, SeriesKind::SquaredLog})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

namespace {

using Real = boost::multiprecision::cpp_bin_float_50;
constexpr int kOrder = 160;

// Truncated power series in u = 4c^2/n^2.
struct Series {
    std::vector<Real> a = std::vector<Real>(kOrder, Real(0));

    Real& operator[](int k) { return a[static_cast<std::size_t>(k)]; }
    const Real& operator[](int k) const { return a[static_cast<std::size_t>(k)]; }

    friend Series operator+(Series x, const Series& y) {
        for (int k = 0; k < kOrder; ++k) x[k] += y[k];
        return x;
    }
    friend Series operator-(Series x, const Series& y) {
        for (int k = 0; k < kOrder; ++k) x[k] -= y[k];
        return x;
    }
    friend Series operator*(const Real& s, Series x) {
        for (auto& v : x.a) v *= s;
        return x;
    }
    friend Series operator*(const Series& x, const Series& y) {
        Series z;
        for (int i = 0; i < kOrder; ++i) {
            if (x[i] == 0) continue;
            for (int j = 0; i + j < kOrder; ++j) z[i + j] += x[i] * y[j];
        }
        return z;
    }
};

Series constant(const Real& v) {
    Series s;
    s[0] = v;
    return s;
}

// sqrt(1 + sign u)
Series sqrt_series(int sign) {
    Series s;
    Real b = 1;
    for (int k = 0; k < kOrder; ++k) {
        s[k] = (sign < 0 && k % 2 == 1) ? Real(-b) : b;
        b *= (Real(0.5) - k) / (k + 1);
    }
    return s;
}

// log p for p[0] = 1, via (log p)' = p'/p.
Series log_series(const Series& p) {
    Series d, h, q;
    for (int k = 0; k + 1 < kOrder; ++k) d[k] = (k + 1) * p[k + 1];
    for (int k = 0; k < kOrder; ++k) {
        Real v = d[k];
        for (int j = 1; j <= k; ++j) v -= p[j] * h[k - j];
        h[k] = v;
    }
    for (int k = 0; k + 1 < kOrder; ++k) q[k + 1] = h[k] / (k + 1);
    return q;
}

Real direct_value(SeriesKind kind, const Real& n, const Real& c) {
    using boost::multiprecision::log;
    using boost::multiprecision::sqrt;
    const Real rp = sqrt(n * n + 4 * c * c), rm = sqrt(n * n - 4 * c * c);
    switch (kind) {
        case SeriesKind::LogSqrtPlus: return n * log(rp - n);
        case SeriesKind::LogRatio: return n * log((rp - n) * (n + rm) / ((n + rp) * (n - rm)));
        case SeriesKind::SqrtDifference: return rp - rm;
        case SeriesKind::SqrtPlusLog: return rp * log((rp - n) / (n + rp));
        case SeriesKind::SqrtMinusLog: return rm * log((n + rm) / (n - rm));
        case SeriesKind::SquaredLog: {
            auto sq = [](const Real& v) { return v * v; };
            return n / 2 * (sq(log(rp - n)) + sq(log(rp + n)) - sq(log(n + rm)) - sq(log(n - rm)));
        }
    }
    return 0;
}

// Expression = n * E(u).  With S+- = sqrt(1 +- u) and G+- = -log((1 + S+-)/2):
//   log(r+ - n) = L1 + G+,  log(r+ + n) = L2 - G+,
//   log(n + r-) = L2 - G-,  log(n - r-) = L1 + G-,
// where L1 = log(2c^2/n) and L2 = log(2n).
Series expansion(SeriesKind kind, const Real& n, const Real& c) {
    using boost::multiprecision::log;
    const Series Sp = sqrt_series(+1), Sm = sqrt_series(-1);
    const Series one = constant(1);
    const Series Gp = Real(-1) * log_series(Real(0.5) * (one + Sp));
    const Series Gm = Real(-1) * log_series(Real(0.5) * (one + Sm));
    const Real L1 = log(2 * c * c / n), L2 = log(2 * n);
    const Series lpm = constant(L1) + Gp, lpp = constant(L2) - Gp;
    const Series lmp = constant(L2) - Gm, lmm = constant(L1) + Gm;
    switch (kind) {
        case SeriesKind::LogSqrtPlus: return lpm;
        case SeriesKind::LogRatio: return lpm - lpp + lmp - lmm;
        case SeriesKind::SqrtDifference: return Sp - Sm;
        case SeriesKind::SqrtPlusLog: return Sp * (lpm - lpp);
        case SeriesKind::SqrtMinusLog: return Sm * (lmp - lmm);
        case SeriesKind::SquaredLog: return Real(0.5) * (lpm * lpm + lpp * lpp - lmp * lmp - lmm * lmm);
    }
    return {};
}

}  // namespace

SeriesResult series_eval(const SeriesSpec& s) {
    if (s.n < 1 || !(s.c > 0.0)) throw std::invalid_argument("series_eval: need n >= 1 and c > 0");
    if (!(static_cast<double>(s.n) > 2.0 * s.c))
        throw std::domain_error("series_eval: branch condition n > 2c violated");
    const Real n = static_cast<double>(s.n), c = s.c;
    const Real u = 4 * c * c / (n * n);
    const Series E = expansion(s.kind, n, c);

    Real scale = 0;
    for (int k = 0; k < kOrder; ++k) scale = std::max(scale, Real(abs(E[k])));
    const Real zero_tol = Real(1e-40) * std::max(Real(1), scale);

    const int want = std::max(1, s.K);
    SeriesResult r;
    Real acc = 0, upow = 1;
    for (int k = 0; k < kOrder && r.terms < want; ++k, upow *= u) {
        if (abs(E[k]) <= zero_tol) continue;
        acc += E[k] * upow;
        ++r.terms;
    }
    if (r.terms < want) throw std::invalid_argument("series_eval: K exceeds the available expansion order");
    const Real direct = direct_value(s.kind, n, c);
    r.truncated = static_cast<double>(n * acc);
    r.direct = static_cast<double>(direct);
    r.abs_diff = static_cast<double>(abs(n * acc - direct));
    return r;
}

}  // namespace latcount
