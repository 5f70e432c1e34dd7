#include <cmath>
#include <sstream>

#include "doctest.h"
#include "latcount/approximates.hpp"
#include "latcount/harness.hpp"
#include "latcount/lattice.hpp"
#include "latcount/numtheory.hpp"
#include "latcount/stats.hpp"

using namespace latcount;
using nlohmann::json;

namespace {

SweepConfig count_config() {
    SweepConfig c;
    c.kind = SweepKind::Count;
    c.primitive = true;
    c.T_grid = {10.0, 100.0, 1000.0, 10000.0};
    c.replications = 3;
    c.seed = 5;
    return c;
}

std::string field_of(const json& j) {
    try {
        validate(sweep_config_from_json(j));
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

std::vector<SeriesRow> rows_from(const std::vector<double>& T, const std::vector<double>& residual) {
    std::vector<SeriesRow> rows;
    for (std::size_t i = 0; i < T.size(); ++i) rows.push_back({T[i], residual[i], 0.0, residual[i], 1});
    return rows;
}

}  // namespace

TEST_CASE("primitive count sweep targets 2c log T / zeta(2)") {
    const ExperimentSeries s = run_sweep(count_config());
    REQUIRE(s.rows.size() == 4);
    REQUIRE(s.replications.size() == 3);
    for (const auto& r : s.rows) {
        CHECK(r.target == doctest::Approx(2 * std::log(r.T) / zeta(2.0)).epsilon(1e-14));
        CHECK(r.residual == r.statistic - r.target);
        CHECK(r.used == 3);
    }
    for (std::size_t i = 1; i < s.rows.size(); ++i) CHECK(s.rows[i].T > s.rows[i - 1].T);
    // every replication is a direct count for its recorded draw
    for (std::size_t k = 0; k < 3; ++k) {
        const auto& xj = s.metadata["draws"][k]["x"];
        Eigen::VectorXd x(1);
        x(0) = xj[0].get<double>();
        for (const auto& r : s.replications[k])
            CHECK(r.statistic == static_cast<double>(count_points(dani_lattice(x), Region{PRegion(2, r.T, 1.0)}, true)));
    }
}

TEST_CASE("single-row grid equals a direct count") {
    SweepConfig c;
    c.kind = SweepKind::Count;
    Eigen::VectorXd x(2);
    x << 0.31830988, 0.5772157;
    c.d = 3;
    c.x = x;
    c.T_grid = {500.0};
    const ExperimentSeries s = run_sweep(c);
    REQUIRE(s.rows.size() == 1);
    CHECK(s.rows[0].statistic == static_cast<double>(count_points(dani_lattice(x), Region{PRegion(3, 500.0, 1.0)}, false)));
}

TEST_CASE("linear-forms and affine sweeps") {
    SweepConfig c;
    c.lattice = LatticeKind::LinearForms;
    c.m = 2;
    c.n = 1;
    c.T_grid = {10.0, 100.0};
    c.affine = true;
    c.seed = 3;
    const ExperimentSeries s = run_sweep(c);
    CHECK(s.rows[1].target == doctest::Approx(std::acos(-1.0) * 2 * std::log(100.0)));
    CHECK(s.metadata["draws"][0].contains("u"));
    CHECK(s.metadata["draws"][0]["M"].size() == 2);
}

TEST_CASE("hemisphere spiral sweep targets one half") {
    SweepConfig c;
    c.kind = SweepKind::Spiral;
    c.T_grid = {100.0, 1000.0, 10000.0};
    c.replications = 4;
    const ExperimentSeries s = run_sweep(c);
    for (const auto& r : s.rows) {
        CHECK(r.target == 0.5);
        CHECK(r.statistic >= 0.0);
        CHECK(r.statistic <= 1.0);
    }
    SweepConfig a = c;
    a.kind = SweepKind::Approx;
    a.primitive = true;
    const ExperimentSeries sa = run_sweep(a);
    for (const auto& r : sa.rows) CHECK(r.target == doctest::Approx(approximate_count_target(1, 1.0, r.T, true)));
}

TEST_CASE("density normalization divides by log T") {
    SweepConfig a = count_config();
    SweepConfig b = a;
    b.normalize = Normalize::Density;
    const ExperimentSeries sa = run_sweep(a), sb = run_sweep(b);
    for (std::size_t i = 0; i < sa.rows.size(); ++i) {
        const double L = std::log(sa.rows[i].T);
        CHECK(sb.rows[i].statistic == doctest::Approx(sa.rows[i].statistic / L));
        CHECK(sb.rows[i].target == doctest::Approx(sa.rows[i].target / L));
    }
}

TEST_CASE("sweeps are deterministic and thread-count independent") {
    SweepConfig c = count_config();
    c.replications = 6;
    const std::string a = render_report(run_sweep(c), ReportFormat::Csv);
    const std::string b = render_report(run_sweep(c), ReportFormat::Csv);
    CHECK(a == b);
    c.threads = 3;
    CHECK(render_report(run_sweep(c), ReportFormat::Csv) == a);
    c.seed = 6;
    CHECK(render_report(run_sweep(c), ReportFormat::Csv) != a);
}

TEST_CASE("config errors name the offending field") {
    const json ok = sweep_config_to_json(count_config());
    CHECK(field_of(ok).empty());
    auto with = [&](const char* k, json v) {
        json j = ok;
        j[k] = v;
        return field_of(j);
    };
    CHECK(with("c", -1.0) == "c");
    CHECK(with("T_grid", json::array({10.0, 5.0})) == "T_grid");
    CHECK(with("T_grid", json::array({0.5})) == "T_grid");
    CHECK(with("kind", "histogram") == "kind");
    CHECK(with("replications", 0) == "replications");
    CHECK(with("x", json::array({0.1, 0.2})) == "x");
    CHECK(with("bogus", 1) == "bogus");
    CHECK(with("affine", true) == "primitive");
    CHECK(with("d", "three") == "d");
    json sp = ok;
    sp["kind"] = "spiral";
    sp["lattice"] = "linear-forms";
    CHECK(field_of(sp) == "lattice");
}

TEST_CASE("configs and reports round-trip") {
    SweepConfig c = count_config();
    Eigen::VectorXd x(1);
    x << 0.123;
    c.x = x;
    c.normalize = Normalize::Density;
    const json j = sweep_config_to_json(c);
    CHECK(sweep_config_to_json(sweep_config_from_json(j)) == j);
    const ExperimentSeries s = run_sweep(c);
    const json rep = json::parse(render_report(s, ReportFormat::Json));
    CHECK(sweep_config_to_json(sweep_config_from_json(rep["metadata"]["config"])) == j);
    CHECK(rep["rows"].size() == s.rows.size());
    CHECK(rep["replications"].size() == 3);
}

TEST_CASE("CSV report shape") {
    const ExperimentSeries s = run_sweep(count_config());
    const std::string csv = render_report(s, ReportFormat::Csv);
    std::istringstream in(csv);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == s.rows.size() + 1);
    CHECK(lines[0] == "T,statistic,target,residual,envelope,slack");
    ExperimentSeries empty;
    CHECK_THROWS(render_report(empty, ReportFormat::Csv));
    CHECK_THROWS(emit_report(s, ReportFormat::Csv, "/nonexistent-dir/x.csv"));
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("envelope fits") {
    const std::vector<double> T{1e2, 1e3, 1e4, 1e5, 1e6};
    const EnvelopeSpec g;
    const EnvelopeFit zero = fit_envelope(rows_from(T, {0, 0, 0, 0, 0}), g);
    CHECK(zero.C == 0.0);
    CHECK(zero.pass);

    std::vector<double> res;
    for (double t : T) res.push_back(*envelope(g, t));
    const EnvelopeFit exact = fit_envelope(rows_from(T, res), g);
    CHECK(exact.C == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(exact.pass);
    for (const auto& s : exact.slack) CHECK(std::abs(*s) < 1e-12);

    // growing residual relative to the envelope fails
    std::vector<double> grow;
    for (std::size_t i = 0; i < T.size(); ++i) grow.push_back(res[i] * (1 + i));
    CHECK_FALSE(fit_envelope(rows_from(T, grow), g).pass);

    // rows too small for the iterated logarithms are excluded
    const EnvelopeFit ex = fit_envelope(rows_from({10.0, 1e2, 1e3, 1e4}, {1, 1, 1, 1}), g);
    REQUIRE(ex.excluded.size() == 1);
    CHECK(ex.excluded[0] == 0);
    CHECK_FALSE(ex.slack[0].has_value());

    CHECK_THROWS(fit_envelope(rows_from({1e2, 1e3, 1e4}, {1, 1, 1}), g));
    CHECK(*envelope({EnvelopeKind::Backbone}, 1e4) == doctest::Approx(1 / std::sqrt(std::log(1e4))));
}

TEST_CASE("fitted constant does not increase with epsilon") {
    const std::vector<double> T{1e7, 1e8, 1e9, 1e10, 1e12};
    const std::vector<double> res{0.3, -0.2, 0.25, 0.1, -0.05};
    double prev = INFINITY;
    for (double eps : {0.01, 0.1, 0.5, 1.0, 2.0}) {
        const double C = fit_envelope(rows_from(T, res), {EnvelopeKind::Gaposhkin, eps}).C;
        CHECK(C <= prev);
        prev = C;
    }
}

TEST_CASE("custom Psi admissibility") {
    CHECK(std::isfinite(psi_admissibility_integral({EnvelopeKind::Custom, 0.1, 1.0, 2.0})));
    CHECK(std::isfinite(psi_admissibility_integral({EnvelopeKind::Custom, 0.1, 2.0, 0.0})));
    CHECK_THROWS_AS(psi_admissibility_integral({EnvelopeKind::Custom, 0.1, 1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(fit_envelope(rows_from({1e5, 1e6, 1e7, 1e8}, {1, 1, 1, 1}), {EnvelopeKind::Custom, 0.1, 0.5, 3.0}),
                    ConfigError);
}

TEST_CASE("averaged residuals shrink like R^{-1/2}") {
    // the hemisphere ratio is unbiased under x -> 1 - x, so only noise remains
    std::vector<double> logR, logrms;
    for (int R : {10, 100, 1000}) {
        CompensatedSum sq;
        const int seeds = 20;
        for (int s = 0; s < seeds; ++s) {
            SweepConfig c;
            c.kind = SweepKind::Spiral;
            c.T_grid = {1000.0};
            c.replications = R;
            c.seed = 1000 + static_cast<std::uint64_t>(s);
            const double r = run_sweep(c).rows[0].residual;
            sq.add(r * r);
        }
        logR.push_back(std::log(R));
        logrms.push_back(0.5 * std::log(sq.value() / seeds));
    }
    const double slope = ols_slope(logR, logrms);
    CHECK(std::abs(slope + 0.5) <= 0.15);
}
