#pragma once

#include <optional>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "json.hpp"

namespace latcount {

// Volume of the unit k-ball (B_0 = 1, B_1 = 2, B_2 = pi).
double unit_ball_volume(int k);
// Surface measure of S^{n-1} in R^n (C_1 = 2 counts the two points of S^0).
double sphere_surface(int n);

// A closed polar cap {u : <u, axis> >= cos(angle)} on S^{d_sphere}, or its
// open complement.  For d_sphere = 0 the cap is a subset of {-1, +1}.
class SphericalCap {
public:
    static SphericalCap full(int d_sphere);
    static SphericalCap empty(int d_sphere);
    static SphericalCap polar(const Eigen::VectorXd& axis, double angle);
    static SphericalCap hemisphere(int d_sphere);  // axis e_1, angle pi/2
    static SphericalCap points(bool plus, bool minus);

    int d_sphere() const { return dim_; }
    bool is_full() const;
    bool is_empty() const;
    const Eigen::VectorXd& axis() const { return axis_; }
    double angle() const { return angle_; }
    bool strict() const { return strict_; }
    bool has_plus() const { return plus_; }
    bool has_minus() const { return minus_; }

    // Membership of a unit vector of length d_sphere + 1.
    bool contains(const Eigen::VectorXd& u) const;
    // Membership of the direction of a nonzero vector; the zero vector has no
    // direction and belongs only to the full sphere.
    bool contains_direction(const Eigen::VectorXd& v) const;

    SphericalCap complement() const;
    double measure() const;

    nlohmann::json to_json() const;
    static SphericalCap from_json(const nlohmann::json& j);

private:
    int dim_ = 0;
    Eigen::VectorXd axis_;
    double angle_ = 0.0;
    double cos_thr_ = 1.0;
    bool strict_ = false;
    bool plus_ = false, minus_ = false;
};

double cap_measure(const SphericalCap& a);

// {(v1, v2) in R^{d-1} x R : |v1|^{d-1} v2 <= c, 1 < v2 <= T}, optionally
// restricted to directions v1/|v1| in a cap on S^{d-2}.  T = 1 is the empty
// region.
struct PRegion {
    int d = 2;
    double T = 1.0;
    double c = 1.0;
    std::optional<SphericalCap> cap;

    PRegion() = default;
    PRegion(int d, double T, double c, std::optional<SphericalCap> cap = std::nullopt);

    int norm_exponent() const { return d - 1; }
    bool empty() const { return T <= 1.0 || (cap && cap->is_empty()); }
    // tol widens the non-strict bounds and tightens v2 > 1 (relative).
    bool contains(const Eigen::VectorXd& v, double tol = 0.0) const;
    double height(const Eigen::VectorXd& v) const { return v(d - 1); }
};

// {(x, y) in R^m x R^n : |x|^m |y|^n <= c, 1 <= |y| < T}.
struct RRegion {
    int m = 1;
    int n = 1;
    double T = 1.0;
    double c = 1.0;

    RRegion() = default;
    RRegion(int m, int n, double T, double c);

    int dim() const { return m + n; }
    bool empty() const { return T <= 1.0; }
    bool contains(const Eigen::VectorXd& v, double tol = 0.0) const;
    double height(const Eigen::VectorXd& v) const { return v.tail(n).norm(); }
};

using Region = std::variant<PRegion, RRegion>;

int region_dim(const Region& r);
double p_region_volume(const PRegion& r);
double r_region_volume(const RRegion& r);
double region_volume(const Region& r);
bool region_contains(const Region& r, const Eigen::VectorXd& v, double tol = 0.0);
std::string describe(const Region& r);

// Area of P intersected with -P; always zero since v2 > 1 on P.
double p_region_symmetric_overlap(const PRegion& r);

// theta_x: err / |err|
Eigen::VectorXd direction(const Eigen::VectorXd& error_vector);

nlohmann::json region_to_json(const Region& r);
Region region_from_json(const nlohmann::json& j);

}  // namespace latcount
