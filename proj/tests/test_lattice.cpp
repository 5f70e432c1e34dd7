#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "latcount/lattice.hpp"
#include "latcount/numtheory.hpp"
#include "oracles.hpp"

using namespace latcount;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) r(i++) = x;
    return r;
}
IntVec ivec(std::initializer_list<std::int64_t> v) {
    IntVec r(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (auto x : v) r(i++) = x;
    return r;
}
// Does the lattice contain v?  Solve B k = v - xi and round.
bool contains(const LatticeBasis& b, const Eigen::VectorXd& v) {
    Eigen::VectorXd w = v;
    if (b.shift()) w -= *b.shift();
    const Eigen::VectorXd k = b.columns().lu().solve(w);
    return (k - k.array().round().matrix()).cwiseAbs().maxCoeff() < 1e-9;
}
Eigen::VectorXd random_x(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> U(0, 1);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = U(rng);
    return x;
}
}  // namespace

TEST_CASE("Dani lattices") {
    const LatticeBasis z = dani_lattice(vec({0.0}));
    CHECK(z.columns().isApprox(Eigen::Matrix2d::Identity()));
    CHECK(contains(dani_lattice(vec({0.5})), vec({0.5, 1})));
    const LatticeBasis b3 = dani_lattice(vec({0.3, 0.7}));
    CHECK(contains(b3, vec({0.3, -0.3, 1})));
    CHECK(b3.det() == doctest::Approx(1.0).epsilon(1e-12));
    const Eigen::VectorXd p = b3.point(ivec({-1, -1, 1}));
    CHECK(p.isApprox(vec({0.3 - 1, 0.7 - 1, 1})));
}

TEST_CASE("linear-forms lattices") {
    const LatticeBasis z = linear_forms_lattice(Eigen::MatrixXd::Zero(2, 3));
    CHECK(z.columns().isApprox(Eigen::MatrixXd::Identity(5, 5)));
    Eigen::MatrixXd M(1, 1);
    M << 0.25;
    CHECK(contains(linear_forms_lattice(M), vec({0.25, 1})));
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        const Eigen::MatrixXd R = Eigen::MatrixXd::Random(2, 3) * 100;
        CHECK(linear_forms_lattice(R).det() == 1.0);
    }
    CHECK_THROWS(LatticeBasis(Eigen::Matrix2d::Identity() * 2));
}

TEST_CASE("diagonal flows") {
    const LatticeBasis z = dani_lattice(vec({0.0}));
    const LatticeBasis same = apply_flow(DiagonalFlow::spiralling(2, 0.0), z);
    CHECK(same.columns().isApprox(z.columns()));
    const LatticeBasis g = apply_flow(DiagonalFlow::spiralling(2, std::log(2.0)), z);
    CHECK(g.columns()(0, 0) == doctest::Approx(2.0));
    CHECK(g.columns()(1, 1) == doctest::Approx(0.5));
    CHECK(g.columns()(0, 1) == 0.0);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int i = 0; i < 50; ++i) {
        const double t = U(rng);
        for (const DiagonalFlow f : {DiagonalFlow::spiralling(4, t), DiagonalFlow::linear_forms(2, 3, t)}) {
            CHECK(std::abs(f.diagonal().prod() - 1.0) < 1e-12);
            const LatticeBasis b = f.kind == FlowKind::Spiralling ? dani_lattice(random_x(rng, 3))
                                                                  : linear_forms_lattice(Eigen::MatrixXd::Random(2, 3));
            CHECK(std::abs(apply_flow(f, b).det() - b.det()) < 1e-12);
        }
    }
    CHECK_THROWS(apply_flow(DiagonalFlow::spiralling(3, 1.0), z));
}

TEST_CASE("basis reduction") {
    const LatticeBasis id(Eigen::Matrix2d::Identity());
    const ReducedBasis r0 = reduce_basis(id);
    CHECK(r0.basis.columns().cwiseAbs().isApprox(Eigen::Matrix2d::Identity()));

    Eigen::Matrix2d shear;
    shear << 1, 1e6, 0, 1;
    const ReducedBasis r = reduce_basis(LatticeBasis(shear));
    CHECK(r.basis.columns().cwiseAbs().isApprox(Eigen::Matrix2d::Identity()));

    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> I(-3, 3);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + trial % 3;
        // well-conditioned real G, skewed by a random unimodular U0
        Eigen::MatrixXd G = Eigen::MatrixXd::Identity(d, d) + 0.3 * Eigen::MatrixXd::Random(d, d);
        G /= std::pow(std::abs(G.determinant()), 1.0 / d);
        IntMat U0 = IntMat::Identity(d, d);
        for (int s = 0; s < 12; ++s) {
            const int a = s % d, b = (s + 1 + trial) % d;
            if (a == b) continue;
            U0.col(a) += I(rng) * U0.col(b);
        }
        const LatticeBasis b(G * U0.cast<double>());
        const ReducedBasis rb = reduce_basis(b);
        CHECK(std::abs(std::abs(rb.U.cast<double>().determinant()) - 1.0) < 1e-9);
        CHECK((b.columns() * rb.U.cast<double>()).isApprox(rb.basis.columns(), 1e-9));
        // reduced columns are no longer than G's up to a modest factor
        auto defect = [](const Eigen::MatrixXd& B) { return B.colwise().norm().prod(); };
        CHECK(defect(rb.basis.columns()) <= 2.0 * defect(G) + 1e-9);
        CHECK(defect(rb.basis.columns()) <= defect(b.columns()) + 1e-9);
        // same point set on a coefficient box, tested in the G frame
        const Eigen::MatrixXd W = G.inverse() * rb.basis.columns();
        CHECK((W - W.array().round().matrix()).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(std::abs(std::abs(W.array().round().matrix().determinant()) - 1.0) < 1e-9);
        IntVec k = IntVec::Constant(d, -2);
        while (true) {
            CHECK(contains(LatticeBasis(G), rb.basis.point(k)));
            int i = 0;
            while (i < d && k(i) == 2) k(i++) = -2;
            if (i == d) break;
            ++k(i);
        }
    }
}

TEST_CASE("primitive vectors") {
    CHECK_FALSE(is_primitive(ivec({2, 4})));
    CHECK(is_primitive(ivec({0, 1})));
    CHECK(is_primitive(ivec({6, 10, 15})));
    CHECK(is_primitive(ivec({-1, 0, 0})));
    CHECK_THROWS(is_primitive(ivec({0, 0})));
}

TEST_CASE("enumeration on Z^2") {
    const LatticeBasis z(Eigen::Matrix2d::Identity());
    const Region r = PRegion(2, 10.0, 1.0);
    const auto pts = enumerate_points(z, r, false);
    REQUIRE(pts.size() == 9);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].coords(0) == 0.0);
        CHECK(pts[i].coords(1) == static_cast<double>(i + 2));
        CHECK_FALSE(pts[i].primitive);
    }
    CHECK(enumerate_points(z, r, true).empty());
    const PointCounts pc = count_points(z, r);
    CHECK(pc.full == 9);
    CHECK(pc.primitive == 0);
    CHECK(count_points(z, Region{PRegion(2, 1.0, 1.0)}, false) == 0);
    CHECK(count_points(dani_lattice(vec({0.377})), Region{PRegion(2, 1.0 + 1e-12, 5.0)}, false) == 0);
}

TEST_CASE("enumeration points reconstruct from coefficients") {
    std::mt19937_64 rng(3);
    const LatticeBasis b = dani_lattice(random_x(rng, 2));
    for (const auto& p : enumerate_points(b, Region{PRegion(3, 200.0, 1.0)}, false)) {
        CHECK((b.point(p.coeffs) - p.coords).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(p.primitive == is_primitive(p.coeffs));
    }
}

TEST_CASE("enumeration agrees with brute force") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0, 1);
    for (int trial = 0; trial < 30; ++trial) {
        const double c = 0.3 + 2 * U(rng), T = 2 + 15 * U(rng);
        // Dani lattices, d = 2 and 3, possibly capped
        const LatticeBasis b2 = dani_lattice(random_x(rng, 1));
        std::optional<SphericalCap> cap0;
        if (trial % 3 == 0) cap0 = SphericalCap::points(true, false);
        const Region p2 = PRegion(2, T, c, cap0);
        CHECK(count_points(b2, p2, false) == oracle::brute_force_count(b2, p2, false));
        CHECK(count_points(b2, p2, true) == oracle::brute_force_count(b2, p2, true));

        const LatticeBasis b3 = dani_lattice(random_x(rng, 2));
        const Region p3 = PRegion(3, std::min(T, 8.0), c);
        CHECK(count_points(b3, p3, false) == oracle::brute_force_count(b3, p3, false));
        CHECK(count_points(b3, p3, true) == oracle::brute_force_count(b3, p3, true));

        // linear forms and affine lattices on R-regions
        const LatticeBasis lf = linear_forms_lattice(Eigen::MatrixXd::Random(1, 1));
        const Region rr = RRegion(1, 1, T, c);
        CHECK(count_points(lf, rr, false) == oracle::brute_force_count(lf, rr, false));
        const LatticeBasis af = lf.with_shift(lf.columns() * Eigen::Vector2d(U(rng), U(rng)));
        CHECK(count_points(af, rr, false) == oracle::brute_force_count(af, rr, false));
        const LatticeBasis lf21 = linear_forms_lattice(Eigen::MatrixXd::Random(2, 1));
        const Region r21 = RRegion(2, 1, std::min(T, 6.0), c);
        CHECK(count_points(lf21, r21, false) == oracle::brute_force_count(lf21, r21, false));
        CHECK(count_points(lf21, r21, true) == oracle::brute_force_count(lf21, r21, true));
    }
}

TEST_CASE("affine lattices reject primitivity") {
    const LatticeBasis af(Eigen::Matrix2d::Identity(), Eigen::Vector2d(0.3, 0.1));
    CHECK_THROWS(count_points(af, Region{RRegion(1, 1, 5.0, 1.0)}, true));
    CHECK(count_points(af, Region{RRegion(1, 1, 5.0, 1.0)}).primitive == 0);
}

TEST_CASE("flow equivariance of counts") {
    // g_s^k L cap P_{T,c} corresponds to L cap {|x|y <= c, e^{ks} < y <= e^{ks} T}.
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> U(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        const LatticeBasis b = dani_lattice(random_x(rng, 1));
        const double c = 0.5 + U(rng), t = 3 * U(rng), T = 5 + 50 * U(rng);
        const double s = std::exp(t);
        const auto moved = enumerate_points(apply_flow(DiagonalFlow::spiralling(2, t), b), Region{PRegion(2, T, c)}, false);
        const auto upper = count_points(b, Region{PRegion(2, s * T, c)}, false);
        const auto lower = count_points(b, Region{PRegion(2, s, c)}, false);
        CHECK(static_cast<std::int64_t>(moved.size()) == upper - lower);
        for (const auto& p : moved) {
            const Eigen::VectorXd pre = b.point(p.coeffs);
            CHECK(pre(1) == doctest::Approx(p.coords(1) * s).epsilon(1e-9));
        }
    }
}

TEST_CASE("slab identity") {
    const LatticeBasis z(Eigen::Matrix2d::Identity());
    const SlabIdentity one = slab_count_identity(z, 10.0, 1.0, 1);
    CHECK(one.per_slab.size() == 1);
    CHECK(one.total == one.slab_sum);
    const SlabIdentity two = slab_count_identity(z, 10.0, 1.0, 2);
    CHECK(two.total == 99);
    CHECK(two.holds());
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> U(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + trial % 2;
        const SlabIdentity s = slab_count_identity(dani_lattice(random_x(rng, d - 1)), 3 + 20 * U(rng), 0.5 + U(rng), 3);
        CHECK(s.holds());
        CHECK(s.total > 0);
    }
}

TEST_CASE("primitive to full ratio tends to 1/zeta(2)") {
    std::mt19937_64 rng(606);
    std::int64_t full = 0, prim = 0;
    for (int i = 0; i < 500; ++i) {
        const PointCounts pc = count_points(dani_lattice(random_x(rng, 1)), Region{PRegion(2, 1e6, 1.0)});
        full += pc.full;
        prim += pc.primitive;
    }
    const double ratio = static_cast<double>(prim) / static_cast<double>(full);
    CHECK(std::abs(ratio * zeta(2.0) - 1.0) < 0.02);
}

TEST_CASE("ball enumeration") {
    const LatticeBasis z(Eigen::Matrix2d::Identity());
    int n = 0;
    for_each_in_ball(z, Eigen::Vector2d::Zero(), 2.0, [&](const LatticePoint&) { ++n; });
    CHECK(n == 13);
}
