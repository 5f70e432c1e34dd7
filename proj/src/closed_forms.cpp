#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "latcount/moment2d.hpp"
#include "moment2d_internal.hpp"

namespace latcount {

const char* to_string(Subregion a) {
    switch (a) {
        case Subregion::One: return "A_1";
        case Subregion::Y2: return "A_y2";
        case Subregion::Y3: return "A_y3";
        case Subregion::Y4: return "A_y4";
        case Subregion::Top: return "A_T";
    }
    return "?";
}

namespace {

using std::log;
using std::sqrt;

void check_args(std::int64_t n, double c, double T) {
    if (n < 1) throw std::invalid_argument("closed form: n must be >= 1");
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("closed form: c must be > 0");
    if (!(T > 1.0) || !std::isfinite(T)) throw std::invalid_argument("closed form: T must be > 1");
}

struct Exact {
    double A1, AT, Ay2, Ay3, Ay4;
};

// Each subregion integral is int (H_hi(y) - H_lo(y)) over y-ranges, where
// H' = (1/y) * (value at the curve bounding the x-range).
Exact exact_all(double n, double c, double T) {
    const double rp = sqrt(n * n + 4 * c * c);
    const bool big = n > 2 * c;
    const double rm = n >= 2 * c ? sqrt(n * n - 4 * c * c) : 0.0;
    const double ys = (n + rp) / (2 * c);
    const double yu = T * (rp - n) / (2 * c);
    const double yh = n * T / (2 * c);
    const double yplus = (n + rm) / (2 * c);
    const double yd = T * (n - rm) / (2 * c);
    const double T2 = T * T;

    using H = std::function<double(double)>;
    const H h1C1 = [=](double y) { return -c / y; };
    const H h1C2 = [=](double y) { return c / y; };
    const H h1C3 = [=](double y) { return n * log(y) - c * y; };
    const H h1C4 = [=](double y) { return (n / T) * log(y) - c * y / T2; };
    const H h1C5 = [=](double y) { return (n / T) * log(y) + c * y / T2; };
    const double k21 = -rm + n * log(n + rm);
    const H h2C1 = [=](double y) { return k21 * log(y); };
    const H h2C2 = [=](double y) { return (-rp + n * log(n + rp)) * log(y); };
    const H h2C3 = [=](double y) {
        const double l = log(2 * c * y);
        return -2 * c * y + n * log(y) + n / 2 * l * l;
    };
    const H h2C4 = [=](double y) {
        const double l = log(2 * c * y / T);
        return -2 * c * y / T + n * log(y) + n / 2 * l * l;
    };
    const H hNlog = [=](double y) { return n * log(n) * log(y); };
    const H h3C1 = [=](double y) { return (rm + n * log(n - rm)) * log(y); };
    const H& h3C4 = h2C4;
    const H h4C1 = [=](double y) { return (rp + n * log(rp - n)) * log(y); };
    const H h4C5 = [=](double y) {
        const double l = log(2 * c * y / T);
        return n * log(y) + 2 * c * y / T + n / 2 * l * l;
    };

    auto seg = [&](const H& hi, const H& lo, double a, double b, double scale = 1.0) {
        a = std::max(a, 1.0);
        b = std::min(b, T);
        if (b <= a) return 0.0;
        return scale * ((hi(b) - hi(a)) - (lo(b) - lo(a)));
    };

    Exact e{};
    const double ylo1 = big ? yplus : 1.0;
    e.A1 = seg(h1C1, h1C3, ylo1, ys) + seg(h1C1, h1C2, std::max(ylo1, ys), T);
    const double ytop = big ? std::min(T, yd) : T;
    e.AT = seg(h1C5, h1C4, 1.0, std::min(yu, ytop), T) + seg(h1C1, h1C4, std::max(1.0, yu), ytop, T);
    if (!big) {
        std::vector<double> bps{1.0, T};
        for (double b : {ys, yh})
            if (b > 1.0 && b < T) bps.push_back(b);
        std::sort(bps.begin(), bps.end());
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
            const double m = 0.5 * (bps[i] + bps[i + 1]);
            s += seg(m < yh ? hNlog : h2C4, m < ys ? h2C3 : h2C2, bps[i], bps[i + 1]);
        }
        e.Ay2 = s;
        e.Ay3 = seg(hNlog, h3C4, 1.0, yh);
    } else {
        e.Ay2 = seg(h2C1, h2C3, yplus, ys) + seg(h2C1, h2C2, std::max(yplus, ys), T);
        e.Ay3 = seg(h3C1, h3C4, 1.0, yd);
    }
    e.Ay4 = seg(h4C1, h4C5, 1.0, yu);
    return e;
}

double sq(double v) { return v * v; }

// Published closed forms; nullopt where the expression leaves the reals.
std::optional<double> printed(Subregion a, double n, double c, double T) {
    const double rp = sqrt(n * n + 4 * c * c);
    const bool small = n <= 2 * c;
    const double rm = small ? 0.0 : sqrt(n * n - 4 * c * c);
    switch (a) {
        case Subregion::One:
        case Subregion::Top:
            if (small) return -2 * c / T + rp + n * log((rp - n) / (2 * c));
            return -2 * c / T + rp - rm + n * log((rp - n) / (n - rm));
        case Subregion::Y2:
            if (n < 2 * c) return std::nullopt;
            return (n * log(n + rm) - rm - n) * log((n + rp) / (n + rm)) - n / 2 * sq(log(n + rp)) +
                   n / 2 * sq(log(n + rm)) + (rp - rm) +
                   (n * log((n + rm) / (n + rp)) + rp - rm) * (log(T) - log((n + rp) / (2 * c)));
        case Subregion::Y3:
            if (small) return std::nullopt;
            return (n * log(n - rm) + rm - n) * log(T * (n - rm) / (2 * c)) - n / 2 * sq(log(n - rm)) + n - rm +
                   n / 2 * sq(log(2 * c / T)) - 2 * c / T;
        case Subregion::Y4:
            return (n * log(rp - n) + rp - n) * log(T * (rp - n) / (2 * c)) + n - rp - n / 2 * sq(log(rp - n)) +
                   2 * c / T + n / 2 * sq(log(2 * c / T));
    }
    return std::nullopt;
}

}  // namespace

ClosedForm closed_form_A(Subregion a, std::int64_t n, double c, double T) {
    check_args(n, c, T);
    const double nd = static_cast<double>(n);
    const Exact e = exact_all(nd, c, T);
    ClosedForm out;
    switch (a) {
        case Subregion::One: out.value = e.A1; break;
        case Subregion::Top: out.value = e.AT; break;
        case Subregion::Y2: out.value = e.Ay2; break;
        case Subregion::Y3: out.value = e.Ay3; break;
        case Subregion::Y4: out.value = e.Ay4; break;
    }
    if (a == Subregion::One || a == Subregion::Top) out.valid = nd <= c * (T * T + 1) / T;
    if (a == Subregion::Y4) out.valid = nd <= c * (T * T - 1) / T;
    out.printed = printed(a, nd, c, T);
    return out;
}

IntegralBreakdown full_integral(std::int64_t n, double c, double T) {
    check_args(n, c, T);
    const double nd = static_cast<double>(n);
    if (nd > c * T + c / T) throw std::invalid_argument("full_integral: n = " + std::to_string(n) + " exceeds cT + c/T");
    const Exact e = exact_all(nd, c, T);
    IntegralBreakdown b;
    b.n = n;
    b.c = c;
    b.T = T;
    b.A1 = e.A1;
    b.Ay2 = e.Ay2;
    b.Ay3 = e.Ay3;
    b.Ay4 = e.Ay4;
    b.AT = e.AT;
    b.valid_A1_AT = nd <= c * (T * T + 1) / T;
    b.valid_Ay4 = nd <= c * (T * T - 1) / T;
    // Above c(T^2-1)/T the exact A_{y4} vanishes; the published value is the
    // epsilon deducted from the sum.
    if (!b.valid_Ay4) b.epsilon_y4 = printed(Subregion::Y4, nd, c, T).value_or(0.0);
    b.total = b.AT + b.Ay4 - b.Ay3 + b.Ay2 - b.A1;
    return b;
}

namespace {

using boost::math::quadrature::gauss_kronrod;

double integrate(const std::function<double(double)>& f, std::vector<double> bps, double tol) {
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        if (!(bps[i + 1] > bps[i])) continue;
        s += gauss_kronrod<double, 15>::integrate(f, bps[i], bps[i + 1], 12, tol);
    }
    return s;
}

std::vector<double> clip(std::initializer_list<double> pts, double lo, double hi) {
    std::vector<double> out{lo, hi};
    for (double p : pts)
        if (std::isfinite(p) && p > lo && p < hi) out.push_back(p);
    return out;
}

// int_{1}^{T} int_{-c/y}^{c/y} g(x, y) dx dy with the curves where the
// segment structure changes supplied as breakpoints.
double region_quadrature(const std::function<double(double, double)>& g, double n, double c, double T,
                         double tol) {
    const double rp = sqrt(n * n + 4 * c * c);
    const double rm = n >= 2 * c ? sqrt(n * n - 4 * c * c) : NAN;
    const double T2 = T * T;
    const std::vector<double> ybps =
        clip({(n + rp) / (2 * c), T * (rp - n) / (2 * c), n * T / (2 * c), (n + rm) / (2 * c), (n - rm) / (2 * c),
              T * (n - rm) / (2 * c), T * (n + rm) / (2 * c), T * (n + rp) / (2 * c), (rp - n) / (2 * c),
              n / (2 * c), n / c, T * n / c, n * T / (c * (T + 1)), n * T / (c * (T - 1)),
              n * T * (T - 1) / (c * (T2 + 1)), n * T * (T - 1) / (c * (T2 - 1)), T * n * (std::sqrt(2.0) - 1) / (2 * c)},
             1.0, T);
    auto inner = [&](double y) {
        const double w = c / y;
        auto fx = [&](double x) { return g(x, y); };
        return integrate(fx,
                         clip({0.0, n - c * y, n + c * y, (T * n - c * y) / T2, (T * n + c * y) / T2,
                               n * n / (4 * y * c)},
                              -w, w),
                         tol * 0.1);
    };
    return integrate(inner, ybps, tol);
}

}  // namespace

double subregion_quadrature(Subregion a, std::int64_t n, double c, double T, double tol) {
    check_args(n, c, T);
    const double nd = static_cast<double>(n);
    auto g = [&](double x, double y) -> double {
        switch (a) {
            case Subregion::One: return std::abs(x - nd) <= c * y ? 1.0 / y : 0.0;
            case Subregion::Top: return std::abs(x * T - nd) * T <= c * y ? T / y : 0.0;
            default: break;
        }
        const Roots r = roots_y(n, x, y, c);
        std::optional<double> v;
        if (a == Subregion::Y2 && r.y2 && (x <= 0.0 || r.y3)) v = r.y2;
        if (a == Subregion::Y3 && x > 0.0) v = r.y3;
        if (a == Subregion::Y4 && x > 0.0) v = r.y4;
        if (v && *v > 1.0 && *v < T) return *v / y;
        return 0.0;
    };
    return region_quadrature(g, nd, c, T, tol);
}

double segment_quadrature(std::int64_t n, double c, double T, double tol) {
    check_args(n, c, T);
    auto g = [&](double x, double y) { return detail::segment_length_unchecked(n, x, y, T, c); };
    return region_quadrature(g, static_cast<double>(n), c, T, tol);
}

}  // namespace latcount
