#include <cmath>
#include <stdexcept>
#include <string>

#include "latcount/moment2d.hpp"
#include "moment2d_internal.hpp"

namespace latcount {

namespace {

// Roots of a Y^2 + b Y + k = 0 without cancellation; nullopt when complex.
std::optional<std::pair<double, double>> quadratic(double a, double b, double k) {
    const double D = b * b - 4.0 * a * k;
    if (D < 0.0) return std::nullopt;
    const double q = -0.5 * (b + std::copysign(std::sqrt(D), b));
    if (q == 0.0) return std::pair{0.0, 0.0};
    return std::pair{q / a, k / q};  // (large root for sign of b, other root)
}

}  // namespace

Roots roots_y(std::int64_t n, double x, double y, double c) {
    Roots r;
    const double nd = static_cast<double>(n);
    if (x == 0.0) {
        r.y1 = -c * y / nd;
        r.y2 = c * y / nd;
        return r;
    }
    // x Y^2 - n Y - c y = 0 gives y1, y4; x Y^2 - n Y + c y = 0 gives y2, y3.
    // The root with the + sign in (n +- sqrt(D)) / (2x) is q/x when n > 0.
    auto assign = [&](double k, std::optional<double>& minus, std::optional<double>& plus) {
        auto roots = quadratic(x, -nd, k);
        if (!roots) return;
        if (nd > 0.0) {
            plus = roots->first;
            minus = roots->second;
        } else {
            minus = roots->first;
            plus = roots->second;
        }
    };
    assign(-c * y, r.y1, r.y4);
    assign(c * y, r.y2, r.y3);
    return r;
}

void validate(const SegmentQuery& q) {
    if (q.n == 0) throw std::invalid_argument("segment: n must be nonzero");
    if (!(q.c > 0.0) || !std::isfinite(q.c)) throw std::invalid_argument("segment: c must be > 0");
    if (!(q.T > 1.0) || !std::isfinite(q.T)) throw std::invalid_argument("segment: T must be > 1");
    if (!std::isfinite(q.x) || !(q.y > 1.0) || q.y > q.T * (1.0 + 1e-12) ||
        std::abs(q.x) * q.y > q.c * (1.0 + 1e-12))
        throw std::invalid_argument("segment: (x, y) = (" + std::to_string(q.x) + ", " + std::to_string(q.y) +
                                    ") lies outside P_{T,c}");
}

namespace detail {

std::vector<YInterval> segment_intervals_unchecked(std::int64_t n, double x, double y, double T, double c) {
    // |x Y^2 - n Y| <= c y is invariant under (n, x) -> (-n, -x)
    if (n < 0) {
        n = -n;
        x = -x;
    }
    struct Raw {
        double lo, hi;
        Endpoint lo_kind, hi_kind;
    };
    Raw raw[2];
    int count = 0;
    const Roots r = roots_y(n, x, y, c);
    if (x > 0.0) {
        if (r.y2) {
            raw[count++] = {0.0, *r.y2, Endpoint::Floor, Endpoint::Y2};
            raw[count++] = {*r.y3, *r.y4, Endpoint::Y3, Endpoint::Y4};
        } else {
            raw[count++] = {0.0, *r.y4, Endpoint::Floor, Endpoint::Y4};
        }
    } else {
        raw[count++] = {0.0, *r.y2, Endpoint::Floor, Endpoint::Y2};
    }

    std::vector<YInterval> out;
    for (int i = 0; i < count; ++i) {
        YInterval iv{raw[i].lo, raw[i].hi, raw[i].lo_kind, raw[i].hi_kind};
        if (iv.lo <= 1.0) {
            iv.lo = 1.0;
            iv.lo_kind = Endpoint::Floor;
        }
        if (iv.hi >= T) {
            iv.hi = T;
            iv.hi_kind = Endpoint::Ceiling;
        }
        if (iv.hi > iv.lo) out.push_back(iv);
    }
    return out;
}

double segment_length_unchecked(std::int64_t n, double x, double y, double T, double c) {
    double len = 0.0;
    for (const auto& iv : segment_intervals_unchecked(n, x, y, T, c)) len += iv.hi - iv.lo;
    return len / y;
}

}  // namespace detail

std::vector<YInterval> segment_intervals(const SegmentQuery& q) {
    validate(q);
    return detail::segment_intervals_unchecked(q.n, q.x, q.y, q.T, q.c);
}

IntersectionProfile classify_intersection(const SegmentQuery& q) {
    IntersectionProfile p;
    for (const auto& iv : segment_intervals(q)) {
        for (Endpoint e : {iv.lo_kind, iv.hi_kind}) {
            switch (e) {
                case Endpoint::Floor: p.hits_floor = true; break;
                case Endpoint::Ceiling: p.hits_ceiling = true; break;
                case Endpoint::Y2: p.has_y2 = true; break;
                case Endpoint::Y3: p.has_y3 = true; break;
                case Endpoint::Y4: p.has_y4 = true; break;
            }
        }
    }
    const unsigned key = (p.hits_floor ? 1u : 0u) | (p.hits_ceiling ? 2u : 0u) | (p.has_y2 ? 4u : 0u) |
                         (p.has_y3 ? 8u : 0u) | (p.has_y4 ? 16u : 0u);
    switch (key) {
        case 1 | 2: p.case_id = 1; break;
        case 1 | 4: p.case_id = 2; break;
        case 1 | 16: p.case_id = 3; break;
        case 8 | 2: p.case_id = 4; break;
        case 8 | 16: p.case_id = 5; break;
        case 1 | 4 | 8 | 16: p.case_id = 6; break;
        case 1 | 2 | 4 | 8: p.case_id = 7; break;
        case 0: p.case_id = 8; break;
        default: throw std::logic_error("classify_intersection: unexpected endpoint pattern " + std::to_string(key));
    }
    return p;
}

double segment_length(const SegmentQuery& q) {
    validate(q);
    return detail::segment_length_unchecked(q.n, q.x, q.y, q.T, q.c);
}

}  // namespace latcount
