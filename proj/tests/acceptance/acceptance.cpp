// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line each; exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "latcount/approximates.hpp"
#include "latcount/geometry.hpp"
#include "latcount/haar_mc.hpp"
#include "latcount/harness.hpp"
#include "latcount/lattice.hpp"
#include "latcount/moment2d.hpp"
#include "latcount/numtheory.hpp"
#include "latcount/stats.hpp"
#include "oracles.hpp"

using namespace latcount;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Shared by criteria 1-3.
const SiegelRun& siegel_run() {
    static const SiegelRun run = [] {
        McOptions o;
        o.n_samples = 100000;
        o.seed = 1;
        return mc_siegel_run(Region{PRegion(2, 10.0, 1.0)}, o);
    }();
    return run;
}

Outcome siegel_mean() {
    const auto t0 = std::chrono::steady_clock::now();
    const SiegelRun& run = siegel_run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const MomentEstimate m = mean_estimate(run, Region{PRegion(2, 10.0, 1.0)}, false);
    return {std::abs(*m.z) <= 3.0 && secs < 60.0,
            fmt("mean %.5f +- %.5f vs %.6f (z = %.2f), %lld samples in %.1fs, acceptance %.4f", m.estimate,
                m.std_error, *m.target, *m.z, static_cast<long long>(m.n_samples), secs, m.acceptance_rate)};
}

Outcome primitive_mean() {
    const MomentEstimate m = mean_estimate(siegel_run(), Region{PRegion(2, 10.0, 1.0)}, true);
    return {std::abs(*m.z) <= 3.0,
            fmt("primitive mean %.5f +- %.5f vs %.6f (z = %.2f)", m.estimate, m.std_error, *m.target, *m.z)};
}

Outcome kleinbock_yu() {
    const MomentEstimate m = second_moment_estimate(siegel_run(), Region{PRegion(2, 10.0, 1.0)}, true);
    const bool mc_ok = std::abs(*m.z) <= 3.0;
    double worst = 0.0;
    for (std::int64_t n = 1; n <= 10; ++n)
        for (Subregion a : {Subregion::One, Subregion::Y2, Subregion::Y3, Subregion::Y4, Subregion::Top}) {
            const double cf = closed_form_A(a, n, 1.0, 10.0).value;
            const double q = subregion_quadrature(a, n, 1.0, 10.0);
            worst = std::max(worst, std::abs(cf - q) / std::max(std::abs(q), 1e-8));
        }
    return {mc_ok && worst <= 1e-4,
            fmt("MC %.5f +- %.5f vs closed form %.6f (z = %.2f); worst subregion relative error %.2e over 50 integrals",
                m.estimate, m.std_error, *m.target, *m.z, worst)};
}

Outcome segment_oracle() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0, 1);
    const double cs[] = {0.5, 1.0, 2.0}, Ts[] = {5.0, 10.0, 50.0};
    double worst = 0.0;
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
        SegmentQuery q;
        q.c = cs[rng() % 3];
        q.T = Ts[rng() % 3];
        const auto nmax = static_cast<std::int64_t>(q.c * q.T + q.c / q.T) + 2;
        q.n = (1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(nmax))) * (rng() % 2 ? 1 : -1);
        q.y = std::max(std::exp(U(rng) * std::log(q.T)), 1.0 + 1e-9);
        q.x = (2 * U(rng) - 1) * q.c / q.y;
        const double got = segment_length(q);
        const double want = oracle::segment_length_scan(q.n, q.x, q.y, q.T, q.c);
        const double err = std::abs(got - want);
        worst = std::max(worst, err);
        if (err > std::max(1e-5, 1e-4 * want)) ++bad;
    }
    return {bad == 0, fmt("10000 queries, max abs error %.2e, %d outside tolerance", worst, bad)};
}

Outcome power_series() {
    bool ok = true;
    std::string d;
    for (SeriesKind k : {SeriesKind::LogSqrtPlus, SeriesKind::LogRatio, SeriesKind::SqrtDifference,
                         SeriesKind::SqrtPlusLog, SeriesKind::SqrtMinusLog, SeriesKind::SquaredLog}) {
        const double e10 = series_eval({k, 10, 1.0, 4}).abs_diff;
        double prev = e10;
        bool mono = true;
        for (std::int64_t n : {20, 50, 100}) {
            const double e = series_eval({k, n, 1.0, 4}).abs_diff;
            mono = mono && e <= prev;
            prev = e;
        }
        ok = ok && e10 < 1e-3 && mono;
        d += fmt("%s %.1e%s; ", to_string(k), e10, mono ? "" : " (not monotone)");
    }
    return {ok, d};
}

Outcome centred_moment() {
    std::vector<double> ratios;
    std::string d;
    for (double T : {10.0, 100.0, 1000.0, 10000.0}) {
        ratios.push_back(*centered_second_moment(1.0, T).ratio);
        d += fmt("%.4f ", ratios.back());
    }
    const KendallResult k = kendall_trend(ratios);
    return {k.p_value > 0.05, fmt("ratios %s; tau = %.2f, two-sided p = %.3f, one-sided p = %.3f", d.c_str(), k.tau,
                                  k.p_value, k.p_increasing)};
}

Outcome walfisz() {
    const std::int64_t N = 10000000;
    const TotientTable t = totient_sieve(N);
    const double z2 = zeta(2.0);
    CompensatedSum s;
    double worst = 0.0;
    std::int64_t at = 0;
    for (std::int64_t n = 1; n <= N; ++n) {
        s.add(static_cast<double>(t(n)) / static_cast<double>(n));
        if (n < 3) continue;
        const double r = std::abs(s.value() - static_cast<double>(n) / z2) / (10.0 * walfisz_envelope(static_cast<double>(n)));
        if (r > worst) {
            worst = r;
            at = n;
        }
    }
    return {worst <= 1.0, fmt("max |R(N)| / (10 envelope) = %.3f at N = %lld over 3 <= N <= 1e7", worst,
                              static_cast<long long>(at))};
}

Outcome abel() {
    const PhiWeightedSum s = phi_weighted_sum(1.0, 1e4);
    const double T = 1e4, x = T + 1 / T;
    const TotientTable t = totient_sieve(static_cast<std::int64_t>(x));
    auto coeff = [&](std::int64_t n) { return static_cast<double>(t(n)) / static_cast<double>(n); };
    auto f = [&](double u) { return std::log(T / u) / u; };
    auto fp = [&](double u) { return -(std::log(T / u) + 1.0) / (u * u); };
    const double direct = direct_sum(coeff, 1, f, x);
    const double quad = abel_sum(coeff, 1, f, fp, x).value;
    const double exact = abel_sum(coeff, 1, f, fp, x, AbelOptions{true}).value;
    const double worst = std::max({std::abs(quad - direct), std::abs(exact - direct), std::abs(s.abel - s.direct)});
    return {worst < 1e-9, fmt("direct %.10f, Abel %.10f (quadrature) / %.10f (antiderivative); max difference %.1e",
                              direct, quad, exact, worst)};
}

Outcome counting_asymptotic() {
    SweepConfig c;
    c.kind = SweepKind::Count;
    c.primitive = true;
    c.normalize = Normalize::Density;
    c.T_grid = {1e2, 1e3, 1e4, 1e5, 1e6};
    c.replications = 500;
    c.seed = 1;
    const ExperimentSeries s = run_sweep(c);
    const double mean = s.rows.back().statistic, target = 2.0 / zeta(2.0);
    const double rel = std::abs(mean / target - 1.0);
    const EnvelopeFit fit = fit_envelope(s.rows, {EnvelopeKind::Backbone});
    std::string dec;
    for (const auto& d : fit.decades) dec += fmt("%.3f ", d.C);
    return {rel <= 0.05 && fit.pass, fmt("mean density %.5f vs %.6f (%.2f%%); backbone C per decade %sfit %s", mean,
                                         target, 100 * rel, dec.c_str(), fit.pass ? "passes" : "fails")};
}

Outcome spiralling() {
    SweepConfig c;
    c.kind = SweepKind::Spiral;
    c.d = 3;
    c.T_grid = {1e5};
    c.replications = 500;
    c.seed = 1;
    const ExperimentSeries s = run_sweep(c);
    const double r = s.rows[0].statistic;
    return {std::abs(r - 0.5) <= 0.02 && s.rows[0].used == 500,
            fmt("mean hemisphere ratio %.5f over %lld x", r, static_cast<long long>(s.rows[0].used))};
}

Outcome linear_forms_affine() {
    struct Case { int m, n; bool affine; };
    bool ok = true;
    std::string d;
    for (const Case k : {Case{1, 1, false}, Case{2, 1, false}, Case{1, 2, false}, Case{1, 1, true}}) {
        SweepConfig c;
        c.lattice = LatticeKind::LinearForms;
        c.m = k.m;
        c.n = k.n;
        c.affine = k.affine;
        c.T_grid = {1e5};
        c.replications = 200;
        c.seed = 1;
        const ExperimentSeries s = run_sweep(c);
        const double rel = s.rows[0].statistic / s.rows[0].target - 1.0;
        ok = ok && std::abs(rel) <= 0.10;
        d += fmt("%s(%d,%d) %.2f vs %.2f (%+.1f%%); ", k.affine ? "affine" : "M", k.m, k.n, s.rows[0].statistic,
                 s.rows[0].target, 100 * rel);
    }
    // Z^2 + xi: the xi-average of the squared disc count is the lattice pair sum
    const LatticeBasis z(Eigen::Matrix2d::Identity());
    const double R = 2.5;
    const int g = 200;
    CompensatedSum acc;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            int cnt = 0;
            for_each_in_ball(z.with_shift(Eigen::Vector2d((i + 0.5) / g, (j + 0.5) / g)), Eigen::Vector2d::Zero(), R,
                             [&](const LatticePoint&) { ++cnt; });
            acc.add(static_cast<double>(cnt) * cnt);
        }
    const double grid_avg = acc.value() / (g * g), pair = disc_pair_sum(z, R);
    const bool toy_ok = std::abs(grid_avg / pair - 1.0) < 5e-3;
    // averaged over Haar lattices the pair sum is vol^2 + vol
    Rng rng(1);
    RunningStats ps;
    for (int i = 0; i < 4000; ++i) ps.push(disc_pair_sum(LatticeBasis(sample_haar_x2(rng).basis), R));
    const double vol = std::acos(-1.0) * R * R, want = affine_second_moment(vol);
    const double z_haar = (ps.mean() - want) / ps.std_error();
    ok = ok && toy_ok && std::abs(z_haar) <= 3.0;
    d += fmt("Z^2+xi pair sum %.4f vs grid %.4f; Haar-averaged pair sum %.3f +- %.3f vs vol^2+vol %.3f (z = %.2f)",
             pair, grid_avg, ps.mean(), ps.std_error(), want, z_haar);
    return {ok, d};
}

Outcome exact_identities() {
    int instances = 0, broken = 0;
    const LatticeBasis z(Eigen::Matrix2d::Identity());
    for (int N = 1; N <= 3; ++N) {
        ++instances;
        if (!slab_count_identity(z, 10.0, 1.0, N).holds()) ++broken;
    }
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> U(0, 1);
    for (int i = 0; i < 40; ++i) {
        const int d = 2 + i % 3;
        Eigen::VectorXd x(d - 1);
        for (int k = 0; k < d - 1; ++k) x(k) = U(rng);
        ++instances;
        if (!slab_count_identity(dani_lattice(x), 2 + 10 * U(rng), 0.3 + 2 * U(rng), 1 + i % 4).holds()) ++broken;
    }
    double overlap = 0.0;
    for (int d = 2; d <= 6; ++d)
        for (double T : {1.0, 2.0, 1e3})
            for (double c : {0.1, 1.0, 10.0}) overlap = std::max(overlap, p_region_symmetric_overlap(PRegion(d, T, c)));
    return {broken == 0 && overlap == 0.0,
            fmt("slab identity exact on %d/%d instances; max P cap -P area %.1f", instances - broken, instances, overlap)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"Siegel mean", siegel_mean},
        {"primitive Siegel mean", primitive_mean},
        {"Kleinbock-Yu second moment", kleinbock_yu},
        {"segment length oracle", segment_oracle},
        {"power series", power_series},
        {"centred second moment O(log T)", centred_moment},
        {"Walfisz partial sums", walfisz},
        {"Abel summation", abel},
        {"primitive counting asymptotic", counting_asymptotic},
        {"spiralling hemisphere ratio", spiralling},
        {"linear forms and affine counts", linear_forms_affine},
        {"exact identities", exact_identities},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        std::printf("[%s] criterion %zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
