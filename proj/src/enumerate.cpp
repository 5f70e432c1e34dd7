// Lattice point enumeration in the counting regions.
//
// The height range of the region is cut into dyadic slabs.  Each slab is
// contained in an axis-aligned box; scaling the box to [-1,1]^d turns the
// lattice into D*B and the box into a subset of the ball of radius sqrt(d).
// The scaled basis is LLL-reduced and the ball is searched with a
// Fincke-Pohst recursion on its QR factor.  Candidates are mapped back to the
// original coefficients, their coordinates are recomputed from the original
// basis in extended precision, and the region predicate decides.

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "latcount/lattice.hpp"
#include "reduce_internal.hpp"

namespace latcount {
namespace detail {

namespace {

struct GramSchmidt {
    LMat mu;   // mu(i, j) for j < i
    LVec bn2;  // |b*_i|^2
    LMat bs;   // b*_i as columns
};

void gram_schmidt(const LMat& B, GramSchmidt& g) {
    const auto d = B.cols();
    g.mu = LMat::Zero(d, d);
    g.bn2 = LVec::Zero(d);
    g.bs = B;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            g.mu(i, j) = B.col(i).dot(g.bs.col(j)) / g.bn2(j);
            g.bs.col(i) -= g.mu(i, j) * g.bs.col(j);
        }
        g.bn2(i) = g.bs.col(i).squaredNorm();
        if (!(g.bn2(i) > 0)) throw std::runtime_error("reduce: degenerate basis");
    }
}

std::int64_t round_to_int(LReal x) {
    if (!(std::abs(x) < 9.0e18L)) throw std::runtime_error("reduce: coefficient overflow");
    return static_cast<std::int64_t>(std::llround(x));
}

void lagrange(const LMat& B0, LMat& B, IntMat& U) {
    for (int iter = 0; iter < 100000; ++iter) {
        if (B.col(0).squaredNorm() > B.col(1).squaredNorm()) {
            B.col(0).swap(B.col(1));
            U.col(0).swap(U.col(1));
        }
        const std::int64_t r = round_to_int(B.col(0).dot(B.col(1)) / B.col(0).squaredNorm());
        if (r == 0) return;
        U.col(1) -= r * U.col(0);
        B.col(1) = B0 * U.col(1).cast<LReal>();
    }
    throw std::runtime_error("reduce: Lagrange reduction did not terminate");
}

void lll(const LMat& B0, LMat& B, IntMat& U, LReal delta) {
    const auto d = B.cols();
    GramSchmidt g;
    gram_schmidt(B, g);
    Eigen::Index k = 1;
    for (long iter = 0; k < d; ++iter) {
        if (iter > 1000000) throw std::runtime_error("reduce: LLL did not terminate");
        for (Eigen::Index j = k - 1; j >= 0; --j) {
            const LReal mu = B.col(k).dot(g.bs.col(j)) / g.bn2(j);
            const std::int64_t r = round_to_int(mu);
            if (r != 0) {
                U.col(k) -= r * U.col(j);
                B.col(k) = B0 * U.col(k).cast<LReal>();
            }
        }
        gram_schmidt(B, g);
        const LReal m = g.mu(k, k - 1);
        if (g.bn2(k) >= (delta - m * m) * g.bn2(k - 1)) {
            ++k;
        } else {
            B.col(k).swap(B.col(k - 1));
            U.col(k).swap(U.col(k - 1));
            gram_schmidt(B, g);
            k = std::max<Eigen::Index>(1, k - 1);
        }
    }
}

}  // namespace

void reduce_columns(const LMat& B0, LMat& B, IntMat& U) {
    const auto d = B0.cols();
    U = IntMat::Identity(d, d);
    B = B0;
    if (d == 1) return;
    if (d == 2) lagrange(B0, B, U);
    else lll(B0, B, U, 0.99L);
}

namespace {

// Integer solutions of |S k - t|^2 <= R2 via the QR factor of S.
class EllipsoidSearch {
public:
    EllipsoidSearch(const LMat& S, const LVec& t, LReal R2) : d_(S.cols()), R2_(R2) {
        // modified Gram-Schmidt: S = Q R
        LMat Q = S;
        R_ = LMat::Zero(d_, d_);
        for (Eigen::Index i = 0; i < d_; ++i) {
            for (Eigen::Index j = 0; j < i; ++j) {
                R_(j, i) = Q.col(j).dot(Q.col(i));
                Q.col(i) -= R_(j, i) * Q.col(j);
            }
            R_(i, i) = Q.col(i).norm();
            if (!(R_(i, i) > 0)) throw std::runtime_error("enumerate: degenerate basis");
            Q.col(i) /= R_(i, i);
        }
        y_ = Q.transpose() * t;
        k_.assign(static_cast<std::size_t>(d_), 0);
    }

    template <class F>
    void run(F&& on_point, std::int64_t& budget) {
        recurse(d_ - 1, 0.0L, on_point, budget);
    }

private:
    template <class F>
    void recurse(Eigen::Index i, LReal dist, F& on_point, std::int64_t& budget) {
        LReal shift = y_(i);
        for (Eigen::Index l = i + 1; l < d_; ++l) shift -= R_(i, l) * static_cast<LReal>(k_[l]);
        const LReal centre = shift / R_(i, i);
        const LReal room = R2_ - dist;
        if (room < 0) return;
        const LReal w = std::sqrt(room) / std::abs(R_(i, i));
        const LReal lo = std::ceil(centre - w), hi = std::floor(centre + w);
        if (!(hi - lo < 1e15L)) throw std::runtime_error("enumerate: search box too large");
        for (LReal kk = lo; kk <= hi; kk += 1) {
            if (--budget < 0) throw std::runtime_error("enumerate: candidate budget exhausted");
            k_[i] = static_cast<std::int64_t>(kk);
            const LReal e = R_(i, i) * kk - shift;
            const LReal nd = dist + e * e;
            if (nd > R2_) continue;
            if (i == 0) on_point(k_);
            else recurse(i - 1, nd, on_point, budget);
        }
        k_[i] = 0;
    }

    Eigen::Index d_;
    LReal R2_;
    LMat R_;
    LVec y_;
    std::vector<std::int64_t> k_;
};

constexpr std::int64_t kCandidateBudget = 2'000'000'000;

struct Slab {
    LVec centre, half;
    double lo, hi;  // height window; infinite ends on the outer slabs
};

std::vector<double> dyadic_edges(double T) {
    std::vector<double> e;
    if (!(T > 1.0)) return e;
    e.push_back(1.0);
    for (double h = 2.0; h < T; h *= 2.0) e.push_back(h);
    e.push_back(T);
    return e;
}

std::vector<Slab> plan_slabs(const Region& region, double tol) {
    std::vector<Slab> slabs;
    const int d = region_dim(region);
    std::visit([&](const auto& r) {
        if (r.empty()) return;
        const auto edges = dyadic_edges(r.T);
        for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
            const double lo = edges[j], hi = edges[j + 1];
            Slab s;
            s.centre = LVec::Zero(d);
            s.half = LVec::Zero(d);
            if constexpr (std::is_same_v<std::decay_t<decltype(r)>, PRegion>) {
                const double rad = std::pow(r.c * (1.0 + tol) / lo, 1.0 / (r.d - 1));
                s.half.head(d - 1).setConstant(rad);
                s.centre(d - 1) = 0.5L * (static_cast<LReal>(lo) + hi);
                s.half(d - 1) = 0.5L * (static_cast<LReal>(hi) - lo) + 1e-9L * hi;
            } else {
                const double rad = std::pow(r.c * (1.0 + tol) / std::pow(lo, r.n), 1.0 / r.m);
                s.half.head(r.m).setConstant(rad);
                s.half.tail(r.n).setConstant(hi * (1.0 + 1e-9));
            }
            s.half *= 1.0L + 1e-7L;
            s.lo = j == 0 ? -std::numeric_limits<double>::infinity() : lo;
            s.hi = j + 2 == edges.size() ? std::numeric_limits<double>::infinity() : hi;
            slabs.push_back(std::move(s));
        }
    }, region);
    return slabs;
}

// Enumerates integer k (original coefficients) with B k + xi in the scaled
// box centre +- half, up to the sqrt(d) ball slack.
template <class F>
void search_box(const LatticeBasis& b, const LVec& centre, const LVec& half, LReal R2, F&& on_coeffs,
                std::int64_t& budget, EnumerationStats* stats) {
    const int d = b.dim();
    const LMat B0 = b.columns().cast<LReal>();
    LVec inv = half.cwiseInverse();
    const LMat S0 = inv.asDiagonal() * B0;
    LVec t = centre;
    if (b.shift()) t -= b.shift()->cast<LReal>();
    t = inv.asDiagonal() * t;

    LMat S;
    IntMat U;
    reduce_columns(S0, S, U);
    EllipsoidSearch search(S, t, R2);
    IntVec kr(d), k(d);
    search.run([&](const std::vector<std::int64_t>& kk) {
        if (stats) ++stats->candidates;
        for (int i = 0; i < d; ++i) kr(i) = kk[static_cast<std::size_t>(i)];
        k = U * kr;
        on_coeffs(k);
    }, budget);
}

}  // namespace
}  // namespace detail

void for_each_point(const LatticeBasis& b, const Region& r, bool primitive_only,
                    const std::function<void(const LatticePoint&)>& visit, EnumerationStats* stats) {
    using namespace detail;
    const int d = b.dim();
    if (region_dim(r) != d) throw std::invalid_argument("enumerate_points: region and lattice dimensions differ");
    if (primitive_only && b.affine()) throw std::invalid_argument("enumerate_points: primitivity is undefined for affine lattices");

    const auto slabs = plan_slabs(r, kMembershipTol);
    const LReal R2 = static_cast<LReal>(d) * (1.0L + 1e-9L);
    std::int64_t budget = kCandidateBudget;
    LatticePoint p;
    for (const auto& s : slabs) {
        if (stats) ++stats->slabs;
        search_box(b, s.centre, s.half, R2, [&](const IntVec& k) {
            if (!b.affine() && k.isZero()) return;
            p.coords = b.point(k);
            const double h = std::visit([&](const auto& g) { return g.height(p.coords); }, r);
            const bool in_slab = std::holds_alternative<PRegion>(r) ? (h > s.lo && h <= s.hi)
                                                                   : (h >= s.lo && h < s.hi);
            if (!in_slab || !region_contains(r, p.coords, kMembershipTol)) return;
            p.primitive = !b.affine() && is_primitive(k);
            if (primitive_only && !p.primitive) return;
            p.coeffs = k;
            if (stats) ++stats->accepted;
            visit(p);
        }, budget, stats);
    }
}

std::vector<LatticePoint> enumerate_points(const LatticeBasis& b, const Region& r, bool primitive_only,
                                           EnumerationStats* stats) {
    std::vector<LatticePoint> out;
    for_each_point(b, r, primitive_only, [&](const LatticePoint& p) { out.push_back(p); }, stats);
    return out;
}

PointCounts count_points(const LatticeBasis& b, const Region& r) {
    PointCounts c;
    for_each_point(b, r, false, [&](const LatticePoint& p) {
        ++c.full;
        if (p.primitive) ++c.primitive;
    });
    return c;
}

std::int64_t count_points(const LatticeBasis& b, const Region& r, bool primitive_only) {
    std::int64_t n = 0;
    for_each_point(b, r, primitive_only, [&](const LatticePoint&) { ++n; });
    return n;
}

void for_each_in_ball(const LatticeBasis& b, const Eigen::VectorXd& centre, double radius,
                      const std::function<void(const LatticePoint&)>& visit) {
    using namespace detail;
    if (centre.size() != b.dim()) throw std::invalid_argument("for_each_in_ball: dimension mismatch");
    if (!(radius >= 0.0)) throw std::invalid_argument("for_each_in_ball: negative radius");
    if (radius == 0.0) radius = std::numeric_limits<double>::min();
    const int d = b.dim();
    LVec half = LVec::Constant(d, static_cast<LReal>(radius) * (1.0L + 1e-9L));
    std::int64_t budget = kCandidateBudget;
    LatticePoint p;
    search_box(b, centre.cast<LReal>(), half, 1.0L + 1e-9L, [&](const IntVec& k) {
        p.coords = b.point(k);
        if ((p.coords - centre).norm() > radius) return;
        p.coeffs = k;
        p.primitive = !b.affine() && !k.isZero() && is_primitive(k);
        visit(p);
    }, budget, nullptr);
}

}  // namespace latcount
