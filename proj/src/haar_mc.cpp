#include "latcount/haar_mc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "latcount/moment2d.hpp"
#include "latcount/numtheory.hpp"

namespace latcount {

using std::numbers::pi;

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    eng_.seed(seq);
}

HaarSample sample_haar_x2(Rng& rng) {
    constexpr double v0 = 0.86602540378443864676;  // sqrt(3)/2
    HaarSample s;
    s.proposals = 0;
    while (true) {
        ++s.proposals;
        // v has density v0 / v^2 on [v0, inf)
        const double v = v0 / (1.0 - rng.uniform());
        const double u = rng.uniform() - 0.5;
        if (u * u + v * v >= 1.0) {
            s.u = u;
            s.v = v;
            break;
        }
    }
    s.theta = 2.0 * pi * rng.uniform();
    const double sv = std::sqrt(s.v);
    Eigen::Matrix2d A;
    A << 1.0 / sv, s.u / sv, 0.0, sv;
    Eigen::Matrix2d R;
    R << std::cos(s.theta), -std::sin(s.theta), std::sin(s.theta), std::cos(s.theta);
    s.basis = R * A;
    return s;
}

double haar_v_cdf(double v) {
    constexpr double v0 = 0.86602540378443864676;
    if (v <= v0) return 0.0;
    if (v >= 1.0) return 1.0 - 3.0 / (pi * v);
    // int_{v0}^{v} (1 - 2 sqrt(1 - t^2)) / t^2 dt, normalized by 3/pi
    const double F = -1.0 / v + 2.0 * std::sqrt(1.0 - v * v) / v + 2.0 * std::asin(v) - 2.0 * pi / 3.0;
    return 3.0 / pi * F;
}

std::int64_t siegel_value(const LatticeBasis& b, const Region& r, bool primitive) {
    return count_points(b, r, primitive);
}

SiegelRun mc_siegel_run(const Region& region, const McOptions& opts) {
    if (opts.n_samples < 100) throw std::invalid_argument("haar-mc: need at least 100 samples");
    if (region_dim(region) != 2) throw std::invalid_argument("haar-mc: the sampler covers X_2 only");
    const int threads = std::max(1, opts.threads);

    Eigen::Matrix2d extra;
    extra << std::cos(opts.extra_rotation), -std::sin(opts.extra_rotation), std::sin(opts.extra_rotation),
        std::cos(opts.extra_rotation);

    std::vector<SiegelRun> parts(static_cast<std::size_t>(threads));
    auto work = [&](int w) {
        SiegelRun& part = parts[static_cast<std::size_t>(w)];
        std::int64_t n = opts.n_samples / threads + (w < opts.n_samples % threads ? 1 : 0);
        Rng rng(opts.seed, static_cast<std::uint64_t>(w));
        for (std::int64_t i = 0; i < n; ++i) {
            HaarSample s = sample_haar_x2(rng);
            part.proposals += s.proposals;
            const LatticeBasis b(extra * s.basis);
            const PointCounts c = count_points(b, region);
            const double f = static_cast<double>(c.full), p = static_cast<double>(c.primitive);
            part.full.push(f);
            part.primitive.push(p);
            part.full_sq.push(f * f);
            part.primitive_sq.push(p * p);
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }

    SiegelRun run;
    for (const auto& part : parts) {
        run.full.merge(part.full);
        run.primitive.merge(part.primitive);
        run.full_sq.merge(part.full_sq);
        run.primitive_sq.merge(part.primitive_sq);
        run.proposals += part.proposals;
    }
    run.n_samples = run.full.count();
    run.seed = opts.seed;
    return run;
}

namespace {

void attach_target(MomentEstimate& e, std::optional<double> target) {
    e.target = target;
    if (!target) return;
    if (e.std_error > 0.0) e.z = (e.estimate - *target) / e.std_error;
    else e.z = e.estimate == *target ? 0.0 : std::copysign(INFINITY, e.estimate - *target);
}

MomentEstimate base(const SiegelRun& run, bool primitive) {
    MomentEstimate e;
    const RunningStats& s = primitive ? run.primitive : run.full;
    const RunningStats& sq = primitive ? run.primitive_sq : run.full_sq;
    e.mean = s.mean();
    e.second_moment = sq.mean();
    e.n_samples = run.n_samples;
    e.seed = run.seed;
    e.acceptance_rate = run.proposals > 0 ? static_cast<double>(run.n_samples) / run.proposals : 0.0;
    return e;
}

}  // namespace

MomentEstimate mean_estimate(const SiegelRun& run, const Region& region, bool primitive) {
    MomentEstimate e = base(run, primitive);
    const RunningStats& s = primitive ? run.primitive : run.full;
    e.estimate = s.mean();
    e.std_error = s.std_error();
    const double vol = region_volume(region);
    attach_target(e, primitive ? vol / zeta(2.0) : vol);
    return e;
}

MomentEstimate second_moment_estimate(const SiegelRun& run, const Region& region, bool primitive) {
    MomentEstimate e = base(run, primitive);
    const RunningStats& sq = primitive ? run.primitive_sq : run.full_sq;
    e.estimate = sq.mean();
    e.std_error = sq.std_error();
    std::optional<double> target;
    if (primitive) {
        if (const auto* p = std::get_if<PRegion>(&region); p && p->d == 2 && !p->cap) {
            target = p->T > 1.0 ? ky_second_norm(p->c, p->T).value : 0.0;
        }
    }
    attach_target(e, target);
    return e;
}

MomentEstimate mc_mean(const Region& region, bool primitive, const McOptions& opts) {
    return mean_estimate(mc_siegel_run(region, opts), region, primitive);
}

MomentEstimate mc_second_moment(const Region& region, bool primitive, const McOptions& opts) {
    return second_moment_estimate(mc_siegel_run(region, opts), region, primitive);
}

double rogers_second_moment_bound(int d, double vol) {
    if (d < 3) throw std::invalid_argument("rogers_second_moment_bound: d must be >= 3");
    if (vol < 0.0) throw std::invalid_argument("rogers_second_moment_bound: negative volume");
    const double z = zeta(0.5 * d);
    return vol * vol + 2.0 * z * z * vol;
}

double primitive_second_moment_d3(int d, double vol, double sym_overlap_vol) {
    if (d < 3) throw std::invalid_argument("primitive_second_moment_d3: d must be >= 3");
    if (vol < 0.0 || sym_overlap_vol < 0.0 || sym_overlap_vol > vol)
        throw std::invalid_argument("primitive_second_moment_d3: need 0 <= overlap <= vol");
    const double z = zeta(static_cast<double>(d));
    const double m = vol / z;
    return m * m + m + sym_overlap_vol / z;
}

double affine_second_moment(double vol) {
    if (vol < 0.0) throw std::invalid_argument("affine_second_moment: negative volume");
    return vol * vol + vol;
}

double disc_overlap_area(double R, double t) {
    t = std::abs(t);
    if (t >= 2.0 * R) return 0.0;
    return 2.0 * R * R * std::acos(t / (2.0 * R)) - 0.5 * t * std::sqrt(4.0 * R * R - t * t);
}

double disc_pair_sum(const LatticeBasis& b, double R) {
    if (b.dim() != 2) throw std::invalid_argument("disc_pair_sum: planar lattices only");
    CompensatedSum s;
    for_each_in_ball(b.with_shift(std::nullopt), Eigen::Vector2d::Zero(), 2.0 * R,
                     [&](const LatticePoint& p) { s.add(disc_overlap_area(R, p.coords.norm())); });
    return s.value();
}

}  // namespace latcount
