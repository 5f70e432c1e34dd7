#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "latcount/geometry.hpp"

namespace latcount {

using IntVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using IntMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Columns generate the lattice; an optional shift xi makes it affine.
class LatticeBasis {
public:
    explicit LatticeBasis(Eigen::MatrixXd columns, std::optional<Eigen::VectorXd> shift = std::nullopt);

    int dim() const { return static_cast<int>(B_.cols()); }
    const Eigen::MatrixXd& columns() const { return B_; }
    const std::optional<Eigen::VectorXd>& shift() const { return xi_; }
    bool affine() const { return xi_.has_value(); }
    double det() const { return B_.determinant(); }

    // B k (+ xi), accumulated with fused multiply-adds in extended precision.
    Eigen::VectorXd point(const IntVec& k) const;

    LatticeBasis with_shift(std::optional<Eigen::VectorXd> xi) const;

private:
    Eigen::MatrixXd B_;
    std::optional<Eigen::VectorXd> xi_;
};

struct LatticePoint {
    Eigen::VectorXd coords;
    IntVec coeffs;
    bool primitive = false;  // always false for affine lattices
};

enum class FlowKind { Spiralling, LinearForms };

struct DiagonalFlow {
    FlowKind kind = FlowKind::Spiralling;
    int d = 2;        // spiralling: ambient dimension
    int m = 1, n = 1;  // linear forms: block sizes
    double t = 0.0;

    static DiagonalFlow spiralling(int d, double t);
    static DiagonalFlow linear_forms(int m, int n, double t);

    int dim() const { return kind == FlowKind::Spiralling ? d : m + n; }
    Eigen::VectorXd diagonal() const;
};

// {(qx - p, q)}: columns e_1..e_{d-1} and (x, 1)
LatticeBasis dani_lattice(const Eigen::VectorXd& x);
// {(Mq - p, q)}: block basis [[I_m, M], [0, I_n]]
LatticeBasis linear_forms_lattice(const Eigen::MatrixXd& M);

LatticeBasis apply_flow(const DiagonalFlow& f, const LatticeBasis& b);

struct ReducedBasis {
    LatticeBasis basis;  // = original columns * U
    IntMat U;            // unimodular
};

// Lagrange for d = 2, LLL (delta = 0.99) otherwise.
ReducedBasis reduce_basis(const LatticeBasis& b);

bool is_primitive(const IntVec& k);

struct EnumerationStats {
    std::int64_t candidates = 0;  // points visited by the box recursion
    std::int64_t accepted = 0;
    int slabs = 0;
};

// Relative tolerance applied to the region predicate during enumeration.
inline constexpr double kMembershipTol = 1e-12;

// Calls visit(point) for every lattice point (or primitive point, or point of
// the affine lattice) inside the region, slab by slab in increasing height.
void for_each_point(const LatticeBasis& b, const Region& r, bool primitive_only,
                    const std::function<void(const LatticePoint&)>& visit,
                    EnumerationStats* stats = nullptr);

std::vector<LatticePoint> enumerate_points(const LatticeBasis& b, const Region& r, bool primitive_only,
                                           EnumerationStats* stats = nullptr);

struct PointCounts {
    std::int64_t full = 0;
    std::int64_t primitive = 0;
};

// Counts full and primitive points in one pass (primitive stays 0 when affine).
PointCounts count_points(const LatticeBasis& b, const Region& r);
std::int64_t count_points(const LatticeBasis& b, const Region& r, bool primitive_only);

// Points of the (affine) lattice in the closed ball |v - centre| <= radius.
void for_each_in_ball(const LatticeBasis& b, const Eigen::VectorXd& centre, double radius,
                      const std::function<void(const LatticePoint&)>& visit);

struct SlabIdentity {
    std::vector<std::int64_t> per_slab;  // #(g_s^k L cap P_{T,c}), k = 0..N-1
    std::int64_t slab_sum = 0;
    std::int64_t total = 0;              // #(L cap P_{T^N,c})
    bool holds() const { return slab_sum == total; }
};

SlabIdentity slab_count_identity(const LatticeBasis& b, double T, double c, int N);

}  // namespace latcount
