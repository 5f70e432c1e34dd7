#include "latcount/lattice.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "reduce_internal.hpp"

namespace latcount {

LatticeBasis::LatticeBasis(Eigen::MatrixXd columns, std::optional<Eigen::VectorXd> shift)
    : B_(std::move(columns)), xi_(std::move(shift)) {
    if (B_.rows() != B_.cols() || B_.rows() < 1) throw std::invalid_argument("LatticeBasis: need a square matrix");
    if (!B_.allFinite()) throw std::invalid_argument("LatticeBasis: non-finite entries");
    const double det = B_.determinant();
    if (!(std::abs(std::abs(det) - 1.0) <= 1e-9))
        throw std::invalid_argument("LatticeBasis: |det| must be 1 (got " + std::to_string(det) + ")");
    if (xi_) {
        if (xi_->size() != B_.rows()) throw std::invalid_argument("LatticeBasis: shift has wrong dimension");
        if (!xi_->allFinite()) throw std::invalid_argument("LatticeBasis: non-finite shift");
    }
}

Eigen::VectorXd LatticeBasis::point(const IntVec& k) const {
    if (k.size() != dim()) throw std::invalid_argument("LatticeBasis::point: dimension mismatch");
    Eigen::VectorXd v(dim());
    for (int i = 0; i < dim(); ++i) {
        long double acc = xi_ ? static_cast<long double>((*xi_)(i)) : 0.0L;
        for (int j = 0; j < dim(); ++j)
            acc = std::fma(static_cast<long double>(B_(i, j)), static_cast<long double>(k(j)), acc);
        v(i) = static_cast<double>(acc);
    }
    return v;
}

LatticeBasis LatticeBasis::with_shift(std::optional<Eigen::VectorXd> xi) const {
    return LatticeBasis(B_, std::move(xi));
}

DiagonalFlow DiagonalFlow::spiralling(int d, double t) {
    if (d < 2) throw std::invalid_argument("DiagonalFlow: d must be >= 2");
    DiagonalFlow f;
    f.kind = FlowKind::Spiralling;
    f.d = d;
    f.t = t;
    return f;
}

DiagonalFlow DiagonalFlow::linear_forms(int m, int n, double t) {
    if (m < 1 || n < 1) throw std::invalid_argument("DiagonalFlow: m, n must be >= 1");
    DiagonalFlow f;
    f.kind = FlowKind::LinearForms;
    f.m = m;
    f.n = n;
    f.t = t;
    return f;
}

Eigen::VectorXd DiagonalFlow::diagonal() const {
    Eigen::VectorXd g(dim());
    if (kind == FlowKind::Spiralling) {
        g.head(d - 1).setConstant(std::exp(t));
        g(d - 1) = std::exp(-(d - 1) * t);
    } else {
        g.head(m).setConstant(std::exp(static_cast<double>(n) / m * t));
        g.tail(n).setConstant(std::exp(-t));
    }
    return g;
}

LatticeBasis dani_lattice(const Eigen::VectorXd& x) {
    if (!x.allFinite()) throw std::invalid_argument("dani_lattice: non-finite x");
    const int d = static_cast<int>(x.size()) + 1;
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(d, d);
    B.col(d - 1).head(d - 1) = x;
    return LatticeBasis(B);
}

LatticeBasis linear_forms_lattice(const Eigen::MatrixXd& M) {
    if (!M.allFinite()) throw std::invalid_argument("linear_forms_lattice: non-finite M");
    const auto m = M.rows(), n = M.cols();
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(m + n, m + n);
    B.topRightCorner(m, n) = M;
    return LatticeBasis(B);
}

LatticeBasis apply_flow(const DiagonalFlow& f, const LatticeBasis& b) {
    if (f.dim() != b.dim()) throw std::invalid_argument("apply_flow: dimension mismatch");
    const Eigen::VectorXd g = f.diagonal();
    std::optional<Eigen::VectorXd> xi;
    if (b.shift()) xi = g.cwiseProduct(*b.shift());
    Eigen::MatrixXd B = g.asDiagonal() * b.columns();
    return LatticeBasis(std::move(B), std::move(xi));
}

ReducedBasis reduce_basis(const LatticeBasis& b) {
    detail::LMat B0 = b.columns().cast<detail::LReal>();
    detail::LMat B;
    IntMat U;
    detail::reduce_columns(B0, B, U);
    Eigen::MatrixXd Bd = (b.columns().cast<detail::LReal>() * U.cast<detail::LReal>()).cast<double>();
    return ReducedBasis{LatticeBasis(std::move(Bd), b.shift()), std::move(U)};
}

bool is_primitive(const IntVec& k) {
    std::int64_t g = 0;
    for (Eigen::Index i = 0; i < k.size(); ++i) g = std::gcd(g, k(i) < 0 ? -k(i) : k(i));
    if (g == 0) throw std::invalid_argument("is_primitive: zero vector");
    return g == 1;
}

SlabIdentity slab_count_identity(const LatticeBasis& b, double T, double c, int N) {
    const int d = b.dim();
    if (d < 2) throw std::invalid_argument("slab_count_identity: d must be >= 2");
    if (N < 1) throw std::invalid_argument("slab_count_identity: N must be >= 1");
    const PRegion base(d, T, c);
    const double s = std::log(T) / (d - 1);
    SlabIdentity out;
    for (int k = 0; k < N; ++k) {
        const LatticeBasis gk = apply_flow(DiagonalFlow::spiralling(d, k * s), b);
        const std::int64_t n = count_points(gk, Region{base}, false);
        out.per_slab.push_back(n);
        out.slab_sum += n;
    }
    out.total = count_points(b, Region{PRegion(d, std::pow(T, N), c)}, false);
    return out;
}

}  // namespace latcount
