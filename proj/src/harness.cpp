#include "latcount/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "latcount/approximates.hpp"
#include "latcount/haar_mc.hpp"
#include "latcount/lattice.hpp"
#include "latcount/numtheory.hpp"

namespace latcount {

using nlohmann::json;

namespace {

const char* kind_name(SweepKind k) {
    switch (k) {
        case SweepKind::Count: return "count";
        case SweepKind::Spiral: return "spiral";
        case SweepKind::Approx: return "approx";
    }
    return "?";
}

template <class T>
T get_as(const json& j, const std::string& field) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(field, "wrong type (got " + std::string(j.type_name()) + ")");
    }
}

int get_int(const json& j, const std::string& field) {
    if (!j.is_number_integer()) throw ConfigError(field, "expected an integer");
    return j.get<int>();
}

double get_number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "expected a number");
    return j.get<double>();
}

Eigen::VectorXd get_vector(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a nonempty array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = get_number(j[i], field);
    return v;
}

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

}  // namespace

SweepConfig sweep_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
    SweepConfig cfg;
    for (const auto& [key, val] : j.items()) {
        if (key == "kind") {
            const auto s = get_as<std::string>(val, key);
            if (s == "count") cfg.kind = SweepKind::Count;
            else if (s == "spiral") cfg.kind = SweepKind::Spiral;
            else if (s == "approx") cfg.kind = SweepKind::Approx;
            else throw ConfigError(key, "unknown kind '" + s + "' (count, spiral, approx)");
        } else if (key == "lattice") {
            const auto s = get_as<std::string>(val, key);
            if (s == "dani") cfg.lattice = LatticeKind::Dani;
            else if (s == "linear-forms") cfg.lattice = LatticeKind::LinearForms;
            else throw ConfigError(key, "unknown lattice '" + s + "' (dani, linear-forms)");
        } else if (key == "affine") {
            cfg.affine = get_as<bool>(val, key);
        } else if (key == "d") {
            cfg.d = get_int(val, key);
        } else if (key == "m") {
            cfg.m = get_int(val, key);
        } else if (key == "n") {
            cfg.n = get_int(val, key);
        } else if (key == "c") {
            cfg.c = get_number(val, key);
        } else if (key == "cap") {
            try {
                cfg.cap = SphericalCap::from_json(val);
            } catch (const std::exception& e) {
                throw ConfigError(key, e.what());
            }
        } else if (key == "primitive") {
            cfg.primitive = get_as<bool>(val, key);
        } else if (key == "normalize") {
            const auto s = get_as<std::string>(val, key);
            if (s == "none") cfg.normalize = Normalize::None;
            else if (s == "density") cfg.normalize = Normalize::Density;
            else throw ConfigError(key, "unknown normalization '" + s + "' (none, density)");
        } else if (key == "T_grid") {
            const Eigen::VectorXd g = get_vector(val, key);
            cfg.T_grid.assign(g.data(), g.data() + g.size());
        } else if (key == "replications") {
            cfg.replications = get_int(val, key);
        } else if (key == "seed") {
            if (!val.is_number_unsigned() && !(val.is_number_integer() && val.get<std::int64_t>() >= 0))
                throw ConfigError(key, "expected a nonnegative integer");
            cfg.seed = val.get<std::uint64_t>();
        } else if (key == "threads") {
            cfg.threads = get_int(val, key);
        } else if (key == "x") {
            cfg.x = get_vector(val, key);
        } else if (key == "M") {
            if (!val.is_array() || val.empty()) throw ConfigError(key, "expected an array of rows");
            const std::size_t rows = val.size(), cols = val[0].is_array() ? val[0].size() : 0;
            Eigen::MatrixXd M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
            for (std::size_t r = 0; r < rows; ++r) {
                const Eigen::VectorXd row = get_vector(val[r], key);
                if (static_cast<std::size_t>(row.size()) != cols) throw ConfigError(key, "ragged rows");
                M.row(static_cast<Eigen::Index>(r)) = row.transpose();
            }
            cfg.M = M;
        } else {
            throw ConfigError(key, "unknown field");
        }
    }
    validate(cfg);
    return cfg;
}

json sweep_config_to_json(const SweepConfig& cfg) {
    json j;
    j["kind"] = kind_name(cfg.kind);
    j["lattice"] = cfg.lattice == LatticeKind::Dani ? "dani" : "linear-forms";
    j["affine"] = cfg.affine;
    j["d"] = cfg.d;
    j["m"] = cfg.m;
    j["n"] = cfg.n;
    j["c"] = cfg.c;
    if (cfg.cap) j["cap"] = cfg.cap->to_json();
    j["primitive"] = cfg.primitive;
    j["normalize"] = cfg.normalize == Normalize::Density ? "density" : "none";
    j["T_grid"] = cfg.T_grid;
    j["replications"] = cfg.replications;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    if (cfg.x) j["x"] = vector_json(*cfg.x);
    if (cfg.M) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < cfg.M->rows(); ++r) rows.push_back(vector_json(cfg.M->row(r).transpose()));
        j["M"] = rows;
    }
    return j;
}

void validate(const SweepConfig& cfg) {
    if (!(cfg.c > 0.0) || !std::isfinite(cfg.c)) throw ConfigError("c", "must be a positive finite number");
    if (cfg.T_grid.empty()) throw ConfigError("T_grid", "must be nonempty");
    for (std::size_t i = 0; i < cfg.T_grid.size(); ++i) {
        const double T = cfg.T_grid[i];
        if (!(T >= 1.0) || !std::isfinite(T)) throw ConfigError("T_grid", "entries must be finite and >= 1");
        if (i > 0 && !(T > cfg.T_grid[i - 1])) throw ConfigError("T_grid", "must be strictly increasing");
        if (cfg.normalize == Normalize::Density && !(T > 1.0))
            throw ConfigError("T_grid", "density normalization needs T > 1");
    }
    if (cfg.replications < 1) throw ConfigError("replications", "must be >= 1");
    if (cfg.threads < 1) throw ConfigError("threads", "must be >= 1");
    if (cfg.lattice == LatticeKind::Dani && cfg.d < 2) throw ConfigError("d", "must be >= 2");
    if (cfg.lattice == LatticeKind::LinearForms && (cfg.m < 1 || cfg.n < 1))
        throw ConfigError(cfg.m < 1 ? "m" : "n", "must be >= 1");
    if (cfg.kind != SweepKind::Count) {
        if (cfg.lattice != LatticeKind::Dani) throw ConfigError("lattice", "spiral and approx sweeps use dani");
        if (cfg.affine) throw ConfigError("affine", "only count sweeps support affine lattices");
        if (cfg.normalize == Normalize::Density && cfg.kind == SweepKind::Spiral)
            throw ConfigError("normalize", "spiral ratios are not normalized");
    }
    if (cfg.affine && cfg.primitive) throw ConfigError("primitive", "undefined for affine lattices");
    if (cfg.x) {
        if (cfg.lattice != LatticeKind::Dani) throw ConfigError("x", "only used by dani lattices");
        if (cfg.x->size() != cfg.d - 1) throw ConfigError("x", "length must be d - 1");
        if (!cfg.x->allFinite()) throw ConfigError("x", "non-finite entry");
    }
    if (cfg.M) {
        if (cfg.lattice != LatticeKind::LinearForms) throw ConfigError("M", "only used by linear-forms lattices");
        if (cfg.M->rows() != cfg.m || cfg.M->cols() != cfg.n) throw ConfigError("M", "shape must be m x n");
        if (!cfg.M->allFinite()) throw ConfigError("M", "non-finite entry");
    }
    if (cfg.cap) {
        if (cfg.lattice != LatticeKind::Dani) throw ConfigError("cap", "caps apply to dani sweeps");
        if (cfg.cap->d_sphere() != cfg.d - 2) throw ConfigError("cap", "must live on S^{d-2}");
        if (cfg.kind == SweepKind::Approx) throw ConfigError("cap", "approx sweeps take no cap");
    }
}

namespace {

struct Draw {
    std::optional<Eigen::VectorXd> x;
    std::optional<Eigen::MatrixXd> M;
    std::optional<Eigen::VectorXd> u;
};

Draw draw(const SweepConfig& cfg, int rep) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(rep));
    Draw d;
    if (cfg.lattice == LatticeKind::Dani) {
        if (cfg.x) d.x = *cfg.x;
        else {
            Eigen::VectorXd x(cfg.d - 1);
            for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform();
            d.x = x;
        }
    } else {
        if (cfg.M) d.M = *cfg.M;
        else {
            Eigen::MatrixXd M(cfg.m, cfg.n);
            for (Eigen::Index r = 0; r < M.rows(); ++r)
                for (Eigen::Index c = 0; c < M.cols(); ++c) M(r, c) = rng.uniform();
            d.M = M;
        }
    }
    if (cfg.affine) {
        const int dim = cfg.lattice == LatticeKind::Dani ? cfg.d : cfg.m + cfg.n;
        Eigen::VectorXd u(dim);
        for (Eigen::Index i = 0; i < dim; ++i) u(i) = rng.uniform();
        d.u = u;
    }
    return d;
}

Region region_at(const SweepConfig& cfg, double T) {
    if (cfg.lattice == LatticeKind::Dani) return PRegion(cfg.d, T, cfg.c, cfg.cap);
    return RRegion(cfg.m, cfg.n, T, cfg.c);
}

std::vector<SeriesRow> count_rows(const SweepConfig& cfg, const Draw& d) {
    LatticeBasis b = cfg.lattice == LatticeKind::Dani ? dani_lattice(*d.x) : linear_forms_lattice(*d.M);
    if (d.u) b = b.with_shift(Eigen::VectorXd(b.columns() * *d.u));
    const auto& grid = cfg.T_grid;
    const Region top = region_at(cfg, grid.back());
    std::vector<std::int64_t> hits(grid.size(), 0);
    const bool is_p = cfg.lattice == LatticeKind::Dani;
    for_each_point(b, top, cfg.primitive, [&](const LatticePoint& p) {
        const double h = is_p ? std::get<PRegion>(top).height(p.coords) : std::get<RRegion>(top).height(p.coords);
        // first grid value whose region contains the point, with the enumeration tolerance
        std::size_t i = 0;
        while (i + 1 < grid.size() &&
               !(is_p ? h <= grid[i] * (1.0 + kMembershipTol) : h < grid[i] * (1.0 - kMembershipTol)))
            ++i;
        ++hits[i];
    });
    std::vector<SeriesRow> rows;
    std::int64_t running = 0;
    const int dim = region_dim(top);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        running += hits[i];
        SeriesRow r;
        r.T = grid[i];
        r.statistic = static_cast<double>(running);
        r.target = region_volume(region_at(cfg, grid[i]));
        if (cfg.primitive) r.target /= zeta(static_cast<double>(dim));
        rows.push_back(r);
    }
    return rows;
}

std::vector<SeriesRow> approximate_rows(const SweepConfig& cfg, const Draw& d) {
    const auto& grid = cfg.T_grid;
    const auto pairs = enumerate_approximates(*d.x, cfg.c, grid.back(), cfg.primitive);
    const SphericalCap cap = cfg.cap.value_or(SphericalCap::hemisphere(cfg.dx() - 1));
    std::vector<SeriesRow> rows;
    std::size_t k = 0;
    std::int64_t all = 0, total = 0, in_cap = 0;
    for (double T : grid) {
        for (; k < pairs.size() && static_cast<double>(pairs[k].q) <= T; ++k) {
            ++all;
            if (pairs[k].exact()) continue;
            ++total;
            if (cap.contains(pairs[k].dir)) ++in_cap;
        }
        SeriesRow r;
        r.T = T;
        if (cfg.kind == SweepKind::Spiral) {
            r.statistic = total > 0 ? static_cast<double>(in_cap) / static_cast<double>(total)
                                    : std::numeric_limits<double>::quiet_NaN();
            r.target = cap.measure();
        } else {
            r.statistic = static_cast<double>(all);
            r.target = approximate_count_target(cfg.dx(), cfg.c, T, cfg.primitive);
        }
        rows.push_back(r);
    }
    return rows;
}

json draw_json(const Draw& d) {
    json j = json::object();
    if (d.x) j["x"] = vector_json(*d.x);
    if (d.M) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < d.M->rows(); ++r) rows.push_back(vector_json(d.M->row(r).transpose()));
        j["M"] = rows;
    }
    if (d.u) j["u"] = vector_json(*d.u);
    return j;
}

}  // namespace

ExperimentSeries run_sweep(const SweepConfig& cfg) {
    validate(cfg);
    const auto R = static_cast<std::size_t>(cfg.replications);
    ExperimentSeries s;
    s.replications.resize(R);
    std::vector<Draw> draws(R);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < R;) {
            try {
                draws[i] = draw(cfg, static_cast<int>(i));
                s.replications[i] =
                    cfg.kind == SweepKind::Count ? count_rows(cfg, draws[i]) : approximate_rows(cfg, draws[i]);
                if (cfg.normalize == Normalize::Density) {
                    for (auto& r : s.replications[i]) {
                        const double L = std::log(r.T);
                        r.statistic /= L;
                        r.target /= L;
                    }
                }
                for (auto& r : s.replications[i]) {
                    r.residual = r.statistic - r.target;
                    r.used = std::isfinite(r.statistic) ? 1 : 0;
                }
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int nthreads = std::min<int>(cfg.threads, static_cast<int>(R));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    // replication order is fixed, so the average does not depend on scheduling
    for (std::size_t i = 0; i < cfg.T_grid.size(); ++i) {
        SeriesRow row;
        row.T = cfg.T_grid[i];
        row.target = s.replications[0][i].target;
        CompensatedSum sum;
        for (const auto& rep : s.replications) {
            if (!rep[i].used) continue;
            sum.add(rep[i].statistic);
            ++row.used;
        }
        row.statistic = row.used > 0 ? sum.value() / static_cast<double>(row.used)
                                     : std::numeric_limits<double>::quiet_NaN();
        row.residual = row.statistic - row.target;
        s.rows.push_back(row);
    }

    s.metadata["config"] = sweep_config_to_json(cfg);
    s.metadata["region"] = cfg.kind == SweepKind::Count ? describe(region_at(cfg, cfg.T_grid.back())) : "approximates";
    json dj = json::array();
    for (const auto& d : draws) dj.push_back(draw_json(d));
    s.metadata["draws"] = dj;
    return s;
}

std::optional<double> envelope(const EnvelopeSpec& spec, double T) {
    if (!(T > 1.0)) return std::nullopt;
    const double L = std::log(T);
    switch (spec.kind) {
        case EnvelopeKind::Backbone: return 1.0 / std::sqrt(L);
        case EnvelopeKind::Gaposhkin: {
            const double ll = std::log(L);
            if (!(ll > 0.0)) return std::nullopt;
            const double lll = std::log(ll);
            if (!(lll > 0.0)) return std::nullopt;
            return std::pow(L, -0.5) * std::pow(ll, 1.5) * std::pow(lll, 0.5 + spec.epsilon);
        }
        case EnvelopeKind::Custom: {
            // sqrt(Psi(N)/N) log N at N = log T
            const double lN = std::log(L);
            if (!(lN > 0.0)) return std::nullopt;
            const double llN = std::log(lN);
            if (!(llN > 0.0)) return std::nullopt;
            const double psi = std::pow(lN, spec.a) * std::pow(llN, spec.b);
            return std::sqrt(psi / L) * lN;
        }
    }
    return std::nullopt;
}

double psi_admissibility_integral(const EnvelopeSpec& spec) {
    if (spec.kind != EnvelopeKind::Custom) throw std::invalid_argument("psi: only custom envelopes carry a Psi");
    // int dt/(t Psi(t)) = int ds / (s^a (log s)^b) with s = log t
    const bool tail_converges = spec.a > 1.0 || (spec.a == 1.0 && spec.b > 1.0);
    if (!tail_converges) throw ConfigError("psi", "int dt/(t Psi(t)) diverges; need a > 1, or a = 1 and b > 1");
    auto f = [&](double s) { return 1.0 / (std::pow(s, spec.a) * std::pow(std::log(s), spec.b)); };
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 2.0, std::log(1e12), 15, 1e-10);
    if (!std::isfinite(v)) throw ConfigError("psi", "admissibility integral is not finite");
    return v;
}

EnvelopeFit fit_envelope(const std::vector<SeriesRow>& rows, const EnvelopeSpec& spec) {
    if (rows.size() < 4) throw std::invalid_argument("fit_envelope: need at least 4 rows");
    if (spec.kind == EnvelopeKind::Custom) psi_admissibility_integral(spec);
    if (spec.kind == EnvelopeKind::Gaposhkin && !(spec.epsilon > 0.0))
        throw std::invalid_argument("fit_envelope: epsilon must be > 0");
    EnvelopeFit fit;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && !(rows[i].T > rows[i - 1].T)) throw std::invalid_argument("fit_envelope: T must increase");
        const auto e = envelope(spec, rows[i].T);
        fit.envelope.push_back(e);
        if (!e || !std::isfinite(rows[i].residual)) {
            fit.excluded.push_back(i);
            continue;
        }
        const double ratio = std::abs(rows[i].residual) / *e;
        fit.C = std::max(fit.C, ratio);
        const int decade = static_cast<int>(std::floor(std::log10(rows[i].T) + 1e-12));
        if (fit.decades.empty() || fit.decades.back().decade != decade) fit.decades.push_back({decade, 0.0});
        fit.decades.back().C = std::max(fit.decades.back().C, ratio);
    }
    if (fit.decades.empty()) throw std::invalid_argument("fit_envelope: no row has a defined envelope");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (fit.envelope[i] && std::isfinite(rows[i].residual))
            fit.slack.push_back(fit.C * *fit.envelope[i] - std::abs(rows[i].residual));
        else
            fit.slack.push_back(std::nullopt);
    }
    fit.pass = true;
    for (std::size_t k = 2; k < fit.decades.size(); ++k)
        if (fit.decades[k].C > fit.decades[k - 1].C * (1.0 + 1e-12)) fit.pass = false;
    return fit;
}

}  // namespace latcount
