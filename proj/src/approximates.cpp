#include "latcount/approximates.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "latcount/numtheory.hpp"

namespace latcount {

namespace {

// visit(q, p, err, err_norm) for every approximate with q <= qmax.
template <class F>
void scan(const Eigen::VectorXd& x, double c, std::int64_t qmax, bool coprime, F&& visit) {
    const int dx = static_cast<int>(x.size());
    if (dx < 1) throw std::invalid_argument("approximates: x must be nonempty");
    if (!x.allFinite()) throw std::invalid_argument("approximates: non-finite x");
    if (!(c > 0.0)) throw std::invalid_argument("approximates: c must be > 0");

    IntVec lo(dx), hi(dx), p(dx);
    Eigen::VectorXd err(dx);
    for (std::int64_t q = 1; q <= qmax; ++q) {
        const double qd = static_cast<double>(q);
        const double bound = c * std::pow(qd, -1.0 / dx);
        for (int i = 0; i < dx; ++i) {
            const double centre = qd * x(i);
            lo(i) = static_cast<std::int64_t>(std::floor(centre - bound)) - 1;
            hi(i) = static_cast<std::int64_t>(std::ceil(centre + bound)) + 1;
        }
        p = lo;
        while (true) {
            double n2 = 0.0;
            for (int i = 0; i < dx; ++i) {
                err(i) = std::fma(qd, x(i), -static_cast<double>(p(i)));
                n2 += err(i) * err(i);
            }
            const double nrm = std::sqrt(n2);
            if (nrm < bound) {
                bool ok = true;
                if (coprime) {
                    std::int64_t g = q;
                    for (int i = 0; i < dx; ++i) g = std::gcd(g, p(i) < 0 ? -p(i) : p(i));
                    ok = g == 1;
                }
                if (ok) visit(q, p, err, nrm);
            }
            int i = dx - 1;
            while (i >= 0 && p(i) == hi(i)) {
                p(i) = lo(i);
                --i;
            }
            if (i < 0) break;
            ++p(i);
        }
    }
}

std::int64_t q_max(double T) {
    if (!(T >= 1.0)) return 0;
    if (T > 9.0e15) throw std::invalid_argument("approximates: T too large");
    return static_cast<std::int64_t>(std::floor(T));
}

}  // namespace

std::vector<ApproximatePair> enumerate_approximates(const Eigen::VectorXd& x, double c, double T, bool coprime) {
    std::vector<ApproximatePair> out;
    scan(x, c, q_max(T), coprime, [&](std::int64_t q, const IntVec& p, const Eigen::VectorXd& err, double nrm) {
        ApproximatePair a;
        a.p = p;
        a.q = q;
        a.err = err;
        a.err_norm = nrm;
        if (nrm > 0.0) a.dir = err / nrm;
        out.push_back(std::move(a));
    });
    return out;
}

SpiralCounts spiralling_counts(const Eigen::VectorXd& x, double c, double T, const SphericalCap& cap, bool coprime) {
    if (cap.d_sphere() != x.size() - 1) throw std::invalid_argument("spiralling_counts: cap must live on S^{d_x - 1}");
    SpiralCounts s;
    scan(x, c, q_max(T), coprime, [&](std::int64_t, const IntVec&, const Eigen::VectorXd& err, double nrm) {
        if (nrm == 0.0) {
            ++s.exact;
            return;
        }
        ++s.total;
        if (cap.contains(err / nrm)) ++s.in_cap;
    });
    if (s.total > 0) s.ratio = static_cast<double>(s.in_cap) / static_cast<double>(s.total);
    return s;
}

double approximate_count_target(int dx, double c, double T, bool coprime) {
    double t = std::pow(c, dx) * unit_ball_volume(dx) * std::log(T);
    if (coprime) t /= zeta(dx + 1.0);
    return t;
}

CountingSeries counting_series(const Eigen::VectorXd& x, double c, const std::vector<double>& T_grid, bool coprime) {
    if (T_grid.empty()) throw std::invalid_argument("counting_series: empty T grid");
    for (std::size_t i = 1; i < T_grid.size(); ++i)
        if (!(T_grid[i] > T_grid[i - 1])) throw std::invalid_argument("counting_series: T grid must be increasing");

    CountingSeries s;
    const int dx = static_cast<int>(x.size());
    std::vector<std::int64_t> per_q_bucket(T_grid.size(), 0);
    // bucket index of q: first grid point with q <= T
    std::size_t bucket = 0;
    scan(x, c, q_max(T_grid.back()), coprime, [&](std::int64_t q, const IntVec&, const Eigen::VectorXd&, double nrm) {
        while (bucket < T_grid.size() && static_cast<double>(q) > T_grid[bucket]) ++bucket;
        if (bucket < T_grid.size()) ++per_q_bucket[bucket];
        if (nrm == 0.0) ++s.exact_approximates;
    });
    std::int64_t running = 0;
    for (std::size_t i = 0; i < T_grid.size(); ++i) {
        running += per_q_bucket[i];
        CountRow r;
        r.T = T_grid[i];
        r.count = running;
        r.target = approximate_count_target(dx, c, r.T, coprime);
        r.residual = static_cast<double>(r.count) - r.target;
        s.rows.push_back(r);
    }
    s.degenerate = s.exact_approximates > 0;
    return s;
}

}  // namespace latcount
