#include "latcount/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

namespace latcount {

using std::numbers::pi;

double unit_ball_volume(int k) {
    if (k < 0) throw std::invalid_argument("unit_ball_volume: negative dimension");
    return std::pow(pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

double sphere_surface(int n) {
    if (n < 1) throw std::invalid_argument("sphere_surface: n must be >= 1");
    return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

// ---------------------------------------------------------------- caps

SphericalCap SphericalCap::polar(const Eigen::VectorXd& axis, double angle) {
    if (axis.size() < 2) throw std::invalid_argument("SphericalCap::polar: use points() on S^0");
    if (!(angle >= 0.0 && angle <= pi)) throw std::invalid_argument("SphericalCap::polar: angle outside [0, pi]");
    const double nrm = axis.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw std::invalid_argument("SphericalCap::polar: bad axis");
    SphericalCap c;
    c.dim_ = static_cast<int>(axis.size()) - 1;
    c.axis_ = axis / nrm;
    c.angle_ = angle;
    c.cos_thr_ = std::cos(angle);
    return c;
}

SphericalCap SphericalCap::points(bool plus, bool minus) {
    SphericalCap c;
    c.dim_ = 0;
    c.axis_ = Eigen::VectorXd::Ones(1);
    c.plus_ = plus;
    c.minus_ = minus;
    return c;
}

SphericalCap SphericalCap::full(int d_sphere) {
    if (d_sphere < 0) throw std::invalid_argument("SphericalCap: negative sphere dimension");
    if (d_sphere == 0) return points(true, true);
    return polar(Eigen::VectorXd::Unit(d_sphere + 1, 0), pi);
}

SphericalCap SphericalCap::empty(int d_sphere) { return full(d_sphere).complement(); }

SphericalCap SphericalCap::hemisphere(int d_sphere) {
    if (d_sphere == 0) return points(true, false);
    return polar(Eigen::VectorXd::Unit(d_sphere + 1, 0), pi / 2);
}

bool SphericalCap::is_full() const {
    if (dim_ == 0) return plus_ && minus_;
    return !strict_ && angle_ >= pi;
}

bool SphericalCap::is_empty() const {
    if (dim_ == 0) return !plus_ && !minus_;
    return strict_ && angle_ <= 0.0;
}

bool SphericalCap::contains(const Eigen::VectorXd& u) const {
    if (u.size() != dim_ + 1) throw std::invalid_argument("SphericalCap::contains: dimension mismatch");
    if (dim_ == 0) return u(0) > 0 ? plus_ : (u(0) < 0 ? minus_ : false);
    if (is_full()) return true;
    if (is_empty()) return false;
    const double dot = u.dot(axis_);
    return strict_ ? dot > cos_thr_ : dot >= cos_thr_;
}

bool SphericalCap::contains_direction(const Eigen::VectorXd& v) const {
    const double nrm = v.norm();
    if (nrm == 0.0) return is_full();
    return contains(v / nrm);
}

SphericalCap SphericalCap::complement() const {
    SphericalCap c = *this;
    if (dim_ == 0) {
        c.plus_ = !plus_;
        c.minus_ = !minus_;
        return c;
    }
    // Negating both the axis and the threshold keeps <u, -a> > -t the exact
    // negation of <u, a> >= t in floating point.
    c.axis_ = -axis_;
    c.cos_thr_ = -cos_thr_;
    c.angle_ = pi - angle_;
    c.strict_ = !strict_;
    return c;
}

double SphericalCap::measure() const {
    if (dim_ == 0) return 0.5 * ((plus_ ? 1 : 0) + (minus_ ? 1 : 0));
    if (is_full()) return 1.0;
    if (is_empty()) return 0.0;
    const double t = cos_thr_;
    const double x = std::max(0.0, 1.0 - t * t);
    const double h = 0.5 * boost::math::ibeta(0.5 * dim_, 0.5, x);
    return t >= 0.0 ? h : 1.0 - h;
}

double cap_measure(const SphericalCap& a) { return a.measure(); }

nlohmann::json SphericalCap::to_json() const {
    nlohmann::json j;
    j["dim"] = dim_;
    if (dim_ == 0) {
        auto s = nlohmann::json::array();
        if (plus_) s.push_back(1);
        if (minus_) s.push_back(-1);
        j["subset"] = s;
    } else {
        j["axis"] = std::vector<double>(axis_.data(), axis_.data() + axis_.size());
        j["angle"] = angle_;
        if (strict_) j["strict"] = true;
    }
    return j;
}

SphericalCap SphericalCap::from_json(const nlohmann::json& j) {
    const int dim = j.at("dim").get<int>();
    if (dim == 0) {
        bool plus = false, minus = false;
        for (const auto& s : j.at("subset")) {
            const int v = s.get<int>();
            if (v == 1) plus = true;
            else if (v == -1) minus = true;
            else throw std::invalid_argument("cap.subset: entries must be +1 or -1");
        }
        return points(plus, minus);
    }
    Eigen::VectorXd axis = Eigen::VectorXd::Unit(dim + 1, 0);
    if (j.contains("axis")) {
        auto a = j.at("axis").get<std::vector<double>>();
        if (static_cast<int>(a.size()) != dim + 1) throw std::invalid_argument("cap.axis: length must be dim+1");
        axis = Eigen::Map<Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
    }
    SphericalCap c = polar(axis, j.at("angle").get<double>());
    if (j.value("strict", false)) {
        // strict caps only arise as complements
        c = polar(-c.axis_, pi - c.angle_).complement();
    }
    return c;
}

// ---------------------------------------------------------------- regions

namespace {

void check_common(double T, double c) {
    if (!std::isfinite(T) || T < 1.0) throw std::invalid_argument("region: T must be finite and >= 1");
    if (!std::isfinite(c) || !(c > 0.0)) throw std::invalid_argument("region: c must be finite and > 0");
}

}  // namespace

PRegion::PRegion(int d_, double T_, double c_, std::optional<SphericalCap> cap_)
    : d(d_), T(T_), c(c_), cap(std::move(cap_)) {
    if (d < 2) throw std::invalid_argument("PRegion: d must be >= 2");
    check_common(T, c);
    if (cap && cap->d_sphere() != d - 2) throw std::invalid_argument("PRegion: cap must live on S^{d-2}");
}

bool PRegion::contains(const Eigen::VectorXd& v, double tol) const {
    if (v.size() != d) throw std::invalid_argument("PRegion::contains: dimension mismatch");
    const double v2 = v(d - 1);
    if (!(v2 > 1.0 + tol) || !(v2 <= T * (1.0 + tol))) return false;
    const auto v1 = v.head(d - 1);
    const double r = v1.norm();
    if (std::pow(r, d - 1) * v2 > c * (1.0 + tol)) return false;
    if (cap && !cap->contains_direction(v1)) return false;
    return true;
}

RRegion::RRegion(int m_, int n_, double T_, double c_) : m(m_), n(n_), T(T_), c(c_) {
    if (m < 1 || n < 1) throw std::invalid_argument("RRegion: m and n must be >= 1");
    check_common(T, c);
}

bool RRegion::contains(const Eigen::VectorXd& v, double tol) const {
    if (v.size() != m + n) throw std::invalid_argument("RRegion::contains: dimension mismatch");
    const double ny = v.tail(n).norm();
    if (!(ny >= 1.0 - tol) || !(ny < T * (1.0 - tol))) return false;
    const double nx = v.head(m).norm();
    return std::pow(nx, m) * std::pow(ny, n) <= c * (1.0 + tol);
}

int region_dim(const Region& r) {
    return std::visit([](const auto& g) {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, PRegion>) return g.d;
        else return g.m + g.n;
    }, r);
}

double p_region_volume(const PRegion& r) {
    double v = r.c * unit_ball_volume(r.d - 1) * std::log(r.T);
    if (r.cap) v *= r.cap->measure();
    return v;
}

double r_region_volume(const RRegion& r) {
    return r.c * unit_ball_volume(r.m) * sphere_surface(r.n) * std::log(r.T);
}

double region_volume(const Region& r) {
    return std::visit([](const auto& g) {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, PRegion>) return p_region_volume(g);
        else return r_region_volume(g);
    }, r);
}

bool region_contains(const Region& r, const Eigen::VectorXd& v, double tol) {
    return std::visit([&](const auto& g) { return g.contains(v, tol); }, r);
}

std::string describe(const Region& r) {
    std::ostringstream os;
    os.precision(10);
    std::visit([&](const auto& g) {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, PRegion>) {
            os << "P(d=" << g.d << ",T=" << g.T << ",c=" << g.c;
            if (g.cap) os << ",cap=" << g.cap->measure();
            os << ")";
        } else {
            os << "R(m=" << g.m << ",n=" << g.n << ",T=" << g.T << ",c=" << g.c << ")";
        }
    }, r);
    return os.str();
}

double p_region_symmetric_overlap(const PRegion& r) {
    // heights of P lie in (1, T], heights of -P in [-T, -1)
    const double overlap = std::min(r.T, -1.0) - std::max(1.0, -r.T);
    return overlap > 0.0 ? overlap : 0.0;
}

Eigen::VectorXd direction(const Eigen::VectorXd& error_vector) {
    const double nrm = error_vector.norm();
    if (nrm == 0.0) throw std::domain_error("direction: zero error vector has no direction");
    return error_vector / nrm;
}

nlohmann::json region_to_json(const Region& r) {
    nlohmann::json j;
    std::visit([&](const auto& g) {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, PRegion>) {
            j["kind"] = "P";
            j["d"] = g.d;
            if (g.cap) j["cap"] = g.cap->to_json();
        } else {
            j["kind"] = "R";
            j["m"] = g.m;
            j["n"] = g.n;
        }
        j["T"] = g.T;
        j["c"] = g.c;
    }, r);
    return j;
}

Region region_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "P") {
        std::optional<SphericalCap> cap;
        if (j.contains("cap") && !j.at("cap").is_null()) cap = SphericalCap::from_json(j.at("cap"));
        return PRegion(j.at("d").get<int>(), j.at("T").get<double>(), j.at("c").get<double>(), cap);
    }
    if (kind == "R")
        return RRegion(j.at("m").get<int>(), j.at("n").get<int>(), j.at("T").get<double>(), j.at("c").get<double>());
    throw std::invalid_argument("region.kind: expected \"P\" or \"R\", got \"" + kind + "\"");
}

}  // namespace latcount
