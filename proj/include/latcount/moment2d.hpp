#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace latcount {

// The line n/(x^2+y^2) (-y, x) + t (x, y) meets |X| Y = c where
// |x Y^2 - n Y| = c y.  Roots are reported in Y.
struct Roots {
    std::optional<double> y1, y2, y3, y4;
};

Roots roots_y(std::int64_t n, double x, double y, double c);

struct SegmentQuery {
    std::int64_t n = 1;
    double x = 0.0, y = 1.0, T = 1.0, c = 1.0;
};

// Throws std::invalid_argument unless n != 0, T > 1, c > 0 and (x, y) in P_{T,c}.
void validate(const SegmentQuery& q);

struct IntersectionProfile {
    int case_id = 8;
    bool has_y2 = false, has_y3 = false, has_y4 = false;  // root is an endpoint inside (1, T)
    bool hits_floor = false, hits_ceiling = false;
};

// Endpoints of the Y-intervals, clipped to [1, T].
enum class Endpoint { Floor, Ceiling, Y2, Y3, Y4 };

struct YInterval {
    double lo, hi;
    Endpoint lo_kind, hi_kind;
};

std::vector<YInterval> segment_intervals(const SegmentQuery& q);
IntersectionProfile classify_intersection(const SegmentQuery& q);
// Measure of the t-set; the Y-length divided by y.
double segment_length(const SegmentQuery& q);

// Subregions of P_{T,c} on which the named value is a segment endpoint.
enum class Subregion { One, Y2, Y3, Y4, Top };
const char* to_string(Subregion a);

struct ClosedForm {
    double value = 0.0;             // exact antiderivative evaluation
    bool valid = true;              // n inside the published validity range
    std::optional<double> printed;  // published closed form, where it exists as a real number
};

ClosedForm closed_form_A(Subregion a, std::int64_t n, double c, double T);

struct IntegralBreakdown {
    std::int64_t n = 0;
    double c = 0.0, T = 0.0;
    double A1 = 0.0, Ay2 = 0.0, Ay3 = 0.0, Ay4 = 0.0, AT = 0.0;
    bool valid_A1_AT = true;  // n <= c (T^2 + 1) / T
    bool valid_Ay4 = true;    // n <= c (T^2 - 1) / T
    // Published A_{y4} value excluded when valid_Ay4 is false.
    double epsilon_y4 = 0.0;
    double total = 0.0;  // A_T + A_{y4} - A_{y3} + A_{y2} - A_1
};

IntegralBreakdown full_integral(std::int64_t n, double c, double T);

// Quadrature oracles (nested adaptive Gauss-Kronrod with explicit break curves).
double subregion_quadrature(Subregion a, std::int64_t n, double c, double T, double tol = 1e-10);
double segment_quadrature(std::int64_t n, double c, double T, double tol = 1e-10);

struct KyResult {
    double c = 0.0, T = 0.0;
    double value = 0.0;
    double area = 0.0;     // 2 c log T
    double overlap = 0.0;  // area(P cap -P)
    double sum = 0.0;      // sum_n phi(n)/n total(n)
    std::int64_t n_max = 0;
    double epsilon_y4 = 0.0;
    std::vector<IntegralBreakdown> terms;
    std::optional<double> quadrature_value;
};

KyResult ky_second_norm(double c, double T, bool quadrature_check = false);

struct CenteredMoment {
    double value = 0.0;
    double ky = 0.0;
    double mean_sq = 0.0;                // (area / zeta(2))^2
    std::optional<double> ratio;         // value / log T
};

CenteredMoment centered_second_moment(double c, double T);

enum class SeriesKind {
    LogSqrtPlus,     // n log(sqrt(n^2+4c^2) - n)
    LogRatio,        // n log((r+ - n)(n + r-) / ((n + r+)(n - r-)))
    SqrtDifference,  // r+ - r-
    SqrtPlusLog,     // r+ log((r+ - n)/(n + r+))
    SqrtMinusLog,    // r- log((n + r-)/(n - r-))
    SquaredLog,      // n/2 (log^2(r+ - n) + log^2(r+ + n) - log^2(n + r-) - log^2(n - r-))
};
const char* to_string(SeriesKind k);
std::optional<SeriesKind> series_kind_from_string(const std::string& s);

struct SeriesSpec {
    SeriesKind kind = SeriesKind::LogSqrtPlus;
    std::int64_t n = 10;
    double c = 1.0;
    int K = 4;  // nonzero terms kept, counting the leading one; K <= 1 keeps the leading term
};

struct SeriesResult {
    double truncated = 0.0;
    double direct = 0.0;
    double abs_diff = 0.0;
    int terms = 0;
};

SeriesResult series_eval(const SeriesSpec& s);

struct PhiWeightedSum {
    std::int64_t n_lo = 0, n_hi = 0;
    double direct = 0.0;
    double abel = 0.0;
    double leading = 0.0;   // 4c^2/(2 zeta(2)) log^2 T
    double two_term = 0.0;  // leading plus the linear-in-log T correction
};

// sum_{ceil(2c) <= n <= cT + c/T} (phi(n)/n) (4c^2/n) log(T/n)
PhiWeightedSum phi_weighted_sum(double c, double T);

}  // namespace latcount
