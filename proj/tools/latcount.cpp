// latcount: command-line driver for the counting, Monte Carlo and second-moment experiments.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "latcount/approximates.hpp"
#include "latcount/haar_mc.hpp"
#include "latcount/harness.hpp"
#include "latcount/lattice.hpp"
#include "latcount/moment2d.hpp"
#include "latcount/numtheory.hpp"

using namespace latcount;
using nlohmann::json;

namespace {

// JSON configuration files for CLI11: top-level keys are global flags, nested
// objects are subcommand sections.
class ConfigJSON : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        return to_json(app, default_also).dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw CLI::ParseError(std::string("config is not valid JSON: ") + e.what(), CLI::ExitCodes::ConfigError);
        }
        if (!j.is_object()) throw CLI::ParseError("config must be a JSON object", CLI::ExitCodes::ConfigError);
        std::vector<CLI::ConfigItem> items;
        flatten(j, {}, items);
        return items;
    }

private:
    static std::string scalar(const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    static void flatten(const json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
        for (const auto& [key, val] : j.items()) {
            if (val.is_object()) {
                auto p = parents;
                p.push_back(key);
                flatten(val, p, out);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (val.is_array()) {
                for (const auto& e : val) item.inputs.push_back(scalar(e));
            } else {
                item.inputs.push_back(scalar(val));
            }
            out.push_back(std::move(item));
        }
    }

    static json to_json(const CLI::App* app, bool default_also) {
        json j = json::object();
        for (const CLI::Option* opt : app->get_options()) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const std::string name = opt->get_lnames().front();
            const auto res = opt->results();
            if (!res.empty()) {
                if (res.size() == 1) j[name] = res.front();
                else j[name] = res;
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        for (const CLI::App* sub : app->get_subcommands({})) {
            json s = to_json(sub, default_also);
            if (!s.empty()) j[sub->get_name()] = s;
        }
        return j;
    }
};

struct Global {
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out = "-";
    std::string format = "csv";
    ReportFormat fmt() const { return format == "json" ? ReportFormat::Json : ReportFormat::Csv; }
};

struct EnvelopeOpts {
    std::string kind = "none";
    double epsilon = 0.1;
    double a = 1.0, b = 2.0;

    void add(CLI::App* app) {
        app->add_option("--envelope", kind, "Fit an error envelope: none, gaposhkin, backbone, custom")
            ->check(CLI::IsMember({"none", "gaposhkin", "backbone", "custom"}));
        app->add_option("--epsilon", epsilon, "Exponent slack of the Gaposhkin envelope");
        app->add_option("--psi-a", a, "Custom Psi(t) = (log t)^a (log log t)^b");
        app->add_option("--psi-b", b);
    }
    std::optional<EnvelopeSpec> spec() const {
        if (kind == "none") return std::nullopt;
        EnvelopeSpec s;
        s.kind = kind == "gaposhkin" ? EnvelopeKind::Gaposhkin
                 : kind == "backbone" ? EnvelopeKind::Backbone
                                      : EnvelopeKind::Custom;
        s.epsilon = epsilon;
        s.a = a;
        s.b = b;
        return s;
    }
};

struct SweepOpts {
    std::string from;
    std::string detail_path;  // approx/spiral: pair list; count: point dump
    std::vector<double> x;
    int d = 2, m = 1, n = 1;
    double c = 1.0;
    std::vector<double> T;
    std::vector<int> decades;
    int replications = 1;
    bool primitive = false;
    bool affine = false;
    std::string normalize = "none";
    std::string lattice = "dani";
    std::vector<double> cap_axis;
    double cap_angle = std::acos(0.0);
    EnvelopeOpts env;

    void add(CLI::App* app, SweepKind kind) {
        app->add_option("--from", from, "Start from a sweep configuration (JSON, as embedded in reports)")
            ->check(CLI::ExistingFile);
        app->add_option("--x", x, "Fixed x (default: uniform random per replication)");
        app->add_option("--d", d, "Ambient dimension (x has d-1 entries)");
        app->add_option("--c", c, "Region constant");
        app->add_option("--T", T, "T grid");
        app->add_option("--decades", decades, "T grid 10^lo .. 10^hi")->expected(2);
        app->add_option("--replications", replications);
        app->add_flag("--primitive,--coprime", primitive,
                      kind == SweepKind::Count ? "Primitive points only" : "Coprime (p, q) only");
        if (kind == SweepKind::Count)
            app->add_option("--dump", detail_path, "Write the points of the first replication at the largest T as CSV");
        else
            app->add_option("--list", detail_path, "Write the pairs of the first replication at the largest T as CSV");
        if (kind != SweepKind::Spiral)
            app->add_option("--normalize", normalize, "none or density (divide by log T)")
                ->check(CLI::IsMember({"none", "density"}));
        if (kind == SweepKind::Count) {
            app->add_option("--lattice", lattice)->check(CLI::IsMember({"dani", "linear-forms"}));
            app->add_option("--m", m, "Linear forms: number of forms");
            app->add_option("--n", n, "Linear forms: number of variables");
            app->add_flag("--affine", affine, "Shift by a uniform random xi");
        }
        if (kind != SweepKind::Approx) {
            app->add_option("--cap-axis", cap_axis, "Cap axis (default e_1)");
            app->add_option("--cap-angle", cap_angle, "Cap half-angle in radians");
        }
        env.add(app);
    }

    static bool given(const CLI::Option* o) { return o && o->count() > 0; }

    SweepConfig build(SweepKind kind, const Global& g, const CLI::App* app) const {
        SweepConfig cfg;
        if (!from.empty()) {
            std::ifstream f(from);
            json j;
            try {
                f >> j;
            } catch (const json::exception& e) {
                throw ConfigError("from", e.what());
            }
            if (j.contains("metadata") && j["metadata"].contains("config")) j = j["metadata"]["config"];
            cfg = sweep_config_from_json(j);
        }
        cfg.kind = kind;
        auto set = [&](const char* name) {
            const CLI::Option* o = app->get_option_no_throw(name);
            return given(o) || (from.empty() && o != nullptr);
        };
        if (set("--lattice")) cfg.lattice = lattice == "dani" ? LatticeKind::Dani : LatticeKind::LinearForms;
        if (set("--d")) cfg.d = d;
        if (set("--m")) cfg.m = m;
        if (set("--n")) cfg.n = n;
        if (set("--c")) cfg.c = c;
        if (set("--replications")) cfg.replications = replications;
        if (set("--primitive")) cfg.primitive = primitive;
        if (set("--affine")) cfg.affine = affine;
        if (set("--normalize")) cfg.normalize = normalize == "density" ? Normalize::Density : Normalize::None;
        if (!x.empty()) cfg.x = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
        if (!T.empty()) cfg.T_grid = T;
        if (!decades.empty()) {
            cfg.T_grid.clear();
            for (int k = decades[0]; k <= decades[1]; ++k) cfg.T_grid.push_back(std::pow(10.0, k));
        }
        if (cfg.T_grid.empty()) throw ConfigError("T", "give --T or --decades");
        if (given(app->get_option_no_throw("--cap-axis")) || given(app->get_option_no_throw("--cap-angle"))) {
            Eigen::VectorXd axis = cap_axis.empty()
                                       ? Eigen::VectorXd(Eigen::VectorXd::Unit(std::max(cfg.d - 1, 1), 0))
                                       : Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
                                             cap_axis.data(), static_cast<Eigen::Index>(cap_axis.size())));
            cfg.cap = axis.size() == 1 ? SphericalCap::points(axis(0) > 0, axis(0) < 0)
                                       : SphericalCap::polar(axis, cap_angle);
        }
        const CLI::App* root = app->get_parent();
        if (from.empty() || given(root->get_option_no_throw("--seed"))) cfg.seed = g.seed;
        if (from.empty() || given(root->get_option_no_throw("--threads"))) cfg.threads = g.threads;
        validate(cfg);
        return cfg;
    }
};

Eigen::VectorXd json_vector(const json& a) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    return v;
}

// q, p..., err_norm, dir..., in_cap
void write_pair_list(const SweepConfig& cfg, const json& draw, const std::string& path) {
    const Eigen::VectorXd x = json_vector(draw["x"]);
    const SphericalCap cap = cfg.cap.value_or(SphericalCap::hemisphere(cfg.dx() - 1));
    std::ostringstream o;
    o << 'q';
    for (int i = 0; i < cfg.dx(); ++i) o << ",p" << i + 1;
    o << ",err_norm";
    for (int i = 0; i < cfg.dx(); ++i) o << ",dir" << i + 1;
    o << ",in_cap\n";
    for (const auto& a : enumerate_approximates(x, cfg.c, cfg.T_grid.back(), cfg.primitive)) {
        o << a.q;
        for (Eigen::Index i = 0; i < a.p.size(); ++i) o << ',' << a.p(i);
        o << ',' << format_double(a.err_norm);
        for (Eigen::Index i = 0; i < a.p.size(); ++i) o << ',' << (a.exact() ? "" : format_double(a.dir(i)));
        o << ',' << (a.exact() ? "" : cap.contains(a.dir) ? "1" : "0") << '\n';
    }
    write_text(path, o.str());
}

// coeffs..., coords..., height, primitive
void write_point_dump(const SweepConfig& cfg, const json& draw, const std::string& path) {
    LatticeBasis b = cfg.lattice == LatticeKind::Dani ? dani_lattice(json_vector(draw["x"])) : [&] {
        Eigen::MatrixXd M(cfg.m, cfg.n);
        for (int r = 0; r < cfg.m; ++r) M.row(r) = json_vector(draw["M"][static_cast<std::size_t>(r)]).transpose();
        return linear_forms_lattice(M);
    }();
    if (draw.contains("u")) b = b.with_shift(Eigen::VectorXd(b.columns() * json_vector(draw["u"])));
    const double T = cfg.T_grid.back();
    const Region r = cfg.lattice == LatticeKind::Dani ? Region(PRegion(cfg.d, T, cfg.c, cfg.cap))
                                                      : Region(RRegion(cfg.m, cfg.n, T, cfg.c));
    const int d = region_dim(r);
    std::ostringstream o;
    for (int i = 0; i < d; ++i) o << 'k' << i + 1 << ',';
    for (int i = 0; i < d; ++i) o << 'v' << i + 1 << ',';
    o << "height,primitive\n";
    for_each_point(b, r, cfg.primitive, [&](const LatticePoint& p) {
        for (int i = 0; i < d; ++i) o << p.coeffs(i) << ',';
        for (int i = 0; i < d; ++i) o << format_double(p.coords(i)) << ',';
        const double h = std::visit([&](const auto& reg) { return reg.height(p.coords); }, r);
        o << format_double(h) << ',' << (p.primitive ? 1 : 0) << '\n';
    });
    write_text(path, o.str());
}

int run_sweep_command(const SweepConfig& cfg, const SweepOpts& opts, const Global& g) {
    const EnvelopeOpts& env = opts.env;
    const ExperimentSeries s = run_sweep(cfg);
    if (!opts.detail_path.empty()) {
        if (cfg.kind == SweepKind::Count) write_point_dump(cfg, s.metadata["draws"][0], opts.detail_path);
        else write_pair_list(cfg, s.metadata["draws"][0], opts.detail_path);
    }
    if (auto spec = env.spec()) {
        const EnvelopeFit fit = fit_envelope(s.rows, *spec);
        emit_report(s, g.fmt(), g.out, &fit);
        std::cerr << "envelope C = " << format_double(fit.C) << (fit.pass ? " (pass)" : " (per-decade C increased)")
                  << "\n";
        return fit.pass ? 0 : 2;
    }
    emit_report(s, g.fmt(), g.out);
    return 0;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + '"';
}

// Key-value CSV for single-record reports.
std::string kv_csv(const json& j) {
    std::ostringstream o;
    o << "key,value\n";
    for (const auto& [k, v] : j.items()) {
        if (v.is_object() || v.is_array()) continue;
        if (v.is_number_float()) o << k << ',' << format_double(v.get<double>()) << '\n';
        else if (v.is_string()) o << k << ',' << csv_field(v.get<std::string>()) << '\n';
        else o << k << ',' << v.dump() << '\n';
    }
    return o.str();
}

json estimate_json(const MomentEstimate& e) {
    json j;
    j["estimate"] = e.estimate;
    j["std_error"] = e.std_error;
    j["mean"] = e.mean;
    j["second_moment"] = e.second_moment;
    j["n_samples"] = e.n_samples;
    j["seed"] = e.seed;
    j["acceptance_rate"] = e.acceptance_rate;
    j["target"] = e.target ? json(*e.target) : json(nullptr);
    j["z"] = e.z ? json(*e.z) : json(nullptr);
    return j;
}

std::vector<SeriesRow> read_rows_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read '" + path + "'");
    std::string line;
    std::getline(f, line);
    if (line.rfind("T,statistic,target,residual", 0) != 0)
        throw std::runtime_error("'" + path + "': expected a header starting T,statistic,target,residual");
    std::vector<SeriesRow> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        double v[4];
        for (double& x : v) {
            if (!std::getline(ss, cell, ',')) throw std::runtime_error("'" + path + "': short row: " + line);
            x = std::stod(cell);
        }
        rows.push_back({v[0], v[1], v[2], v[3], 1});
    }
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"latcount: lattice point counting experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    app.config_formatter(std::make_shared<ConfigJSON>());
    app.set_config("--config", "", "JSON configuration; command-line flags take precedence");

    Global g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--out", g.out, "Output file ('-' for stdout)");
    app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    SweepOpts approx_o, spiral_o, count_o;
    CLI::App* approx = app.add_subcommand("approx", "Count Dirichlet approximates over a T grid");
    approx_o.add(approx, SweepKind::Approx);
    CLI::App* spiral = app.add_subcommand("spiral", "Fraction of approximate directions inside a cap");
    spiral_o.add(spiral, SweepKind::Spiral);
    CLI::App* count = app.add_subcommand("count", "Lattice points in P or R regions over a T grid");
    count_o.add(count, SweepKind::Count);

    CLI::App* haar = app.add_subcommand("haar-mc", "Monte Carlo moments over Haar-random unimodular planar lattices");
    double mc_c = 1.0, mc_T = 10.0;
    std::int64_t mc_samples = 100000;
    bool mc_primitive = false;
    int mc_moment = 1;
    std::string mc_region = "p";
    haar->add_option("--c", mc_c);
    haar->add_option("--T", mc_T);
    haar->add_option("--samples", mc_samples)->check(CLI::Range(std::int64_t{100}, std::int64_t{1} << 40));
    haar->add_flag("--primitive", mc_primitive);
    haar->add_option("--moment", mc_moment, "1 or 2")->check(CLI::IsMember({1, 2}));
    haar->add_option("--region", mc_region, "p: P_{T,c}; r: R_{T,c} with m = n = 1")
        ->check(CLI::IsMember({"p", "r"}));

    CLI::App* m2d = app.add_subcommand("moment2d", "Second moment of the primitive Siegel transform on X_2");
    double m_c = 1.0, m_T = 10.0;
    bool m_quad = false, m_mc = false;
    std::int64_t m_samples = 100000;
    m2d->add_option("--c", m_c);
    m2d->add_option("--T", m_T);
    m2d->add_flag("--quadrature-check", m_quad, "Re-derive every n-term by 2-D quadrature");
    m2d->add_flag("--mc-check", m_mc, "Compare with a Haar Monte Carlo estimate");
    m2d->add_option("--samples", m_samples)->check(CLI::Range(std::int64_t{100}, std::int64_t{1} << 40));

    CLI::App* vs = app.add_subcommand("verify-series", "Truncated power series vs direct evaluation");
    std::vector<std::int64_t> vs_n{10};
    double vs_c = 1.0;
    int vs_K = 4;
    std::string vs_kind = "all";
    vs->add_option("--n", vs_n);
    vs->add_option("--c", vs_c);
    vs->add_option("--K", vs_K, "Nonzero terms kept, including the leading one");
    vs->add_option("--kind", vs_kind,
                   "all, log-sqrt-plus, log-ratio, sqrt-difference, sqrt-plus-log, sqrt-minus-log, squared-log");

    CLI::App* ps = app.add_subcommand("phi-sum", "Partial sums of phi(n)/n against N/zeta(2)");
    std::vector<std::int64_t> ps_N;
    bool ps_weighted = false;
    double ps_c = 1.0, ps_T = 1e4;
    ps->add_option("--N", ps_N)->check(CLI::PositiveNumber);
    ps->add_flag("--weighted", ps_weighted, "Evaluate the weighted sum of (phi(n)/n)(4c^2/n) log(T/n) instead");
    ps->add_option("--c", ps_c);
    ps->add_option("--T", ps_T);

    CLI::App* fit = app.add_subcommand("fit", "Fit an error envelope to a report CSV");
    std::string fit_in;
    EnvelopeOpts fit_env;
    fit_env.kind = "gaposhkin";
    fit->add_option("--input", fit_in, "CSV with columns T,statistic,target,residual")->required();
    fit_env.add(fit);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (approx->parsed()) return run_sweep_command(approx_o.build(SweepKind::Approx, g, approx), approx_o, g);
        if (spiral->parsed()) return run_sweep_command(spiral_o.build(SweepKind::Spiral, g, spiral), spiral_o, g);
        if (count->parsed()) return run_sweep_command(count_o.build(SweepKind::Count, g, count), count_o, g);

        if (haar->parsed()) {
            const Region region = mc_region == "p" ? Region(PRegion(2, mc_T, mc_c)) : Region(RRegion(1, 1, mc_T, mc_c));
            McOptions o;
            o.n_samples = mc_samples;
            o.seed = g.seed;
            o.threads = g.threads;
            const SiegelRun run = mc_siegel_run(region, o);
            const MomentEstimate e = mc_moment == 1 ? mean_estimate(run, region, mc_primitive)
                                                    : second_moment_estimate(run, region, mc_primitive);
            json j = estimate_json(e);
            j["region"] = describe(region);
            j["primitive"] = mc_primitive;
            j["moment"] = mc_moment;
            write_text(g.out, g.format == "json" ? j.dump(2) + "\n" : kv_csv(j));
            return 0;
        }

        if (m2d->parsed()) {
            const KyResult ky = ky_second_norm(m_c, m_T, m_quad);
            const CenteredMoment cm = centered_second_moment(m_c, m_T);
            json j;
            j["c"] = m_c;
            j["T"] = m_T;
            j["ky_second_norm"] = ky.value;
            j["area"] = ky.area;
            j["overlap"] = ky.overlap;
            j["n_max"] = ky.n_max;
            j["epsilon_y4"] = ky.epsilon_y4;
            j["centered_second_moment"] = cm.value;
            j["ratio_to_log_T"] = cm.ratio ? json(*cm.ratio) : json(nullptr);
            j["note"] = "centering subtracts (2c log T / zeta(2))^2";
            if (ky.quadrature_value) {
                j["quadrature_value"] = *ky.quadrature_value;
                j["quadrature_rel_diff"] = std::abs(*ky.quadrature_value - ky.value) / ky.value;
            }
            if (m_mc) {
                McOptions o;
                o.n_samples = m_samples;
                o.seed = g.seed;
                o.threads = g.threads;
                const Region region = PRegion(2, m_T, m_c);
                j["mc"] = estimate_json(second_moment_estimate(mc_siegel_run(region, o), region, true));
            }
            json terms = json::array();
            for (const auto& b : ky.terms)
                terms.push_back({{"n", b.n}, {"A1", b.A1}, {"Ay2", b.Ay2}, {"Ay3", b.Ay3}, {"Ay4", b.Ay4},
                                 {"AT", b.AT}, {"total", b.total}, {"valid_A1_AT", b.valid_A1_AT},
                                 {"valid_Ay4", b.valid_Ay4}, {"epsilon_y4", b.epsilon_y4}});
            j["terms"] = terms;
            write_text(g.out, g.format == "json" ? j.dump(2) + "\n" : kv_csv(j));
            return 0;
        }

        if (vs->parsed()) {
            std::vector<SeriesKind> kinds;
            if (vs_kind == "all") {
                for (int k = 0; k < 6; ++k) kinds.push_back(static_cast<SeriesKind>(k));
            } else if (auto k = series_kind_from_string(vs_kind)) {
                kinds.push_back(*k);
            } else {
                throw ConfigError("kind", "unknown expansion '" + vs_kind + "'");
            }
            json rows = json::array();
            std::ostringstream csv;
            csv << "kind,n,c,K,truncated,direct,abs_diff\n";
            for (SeriesKind k : kinds) {
                for (std::int64_t n : vs_n) {
                    const SeriesResult r = series_eval({k, n, vs_c, vs_K});
                    csv << to_string(k) << ',' << n << ',' << format_double(vs_c) << ',' << vs_K << ','
                        << format_double(r.truncated) << ',' << format_double(r.direct) << ','
                        << format_double(r.abs_diff) << '\n';
                    rows.push_back({{"kind", to_string(k)}, {"n", n}, {"c", vs_c}, {"K", vs_K},
                                    {"truncated", r.truncated}, {"direct", r.direct}, {"abs_diff", r.abs_diff}});
                }
            }
            write_text(g.out, g.format == "json" ? rows.dump(2) + "\n" : csv.str());
            return 0;
        }

        if (ps->parsed()) {
            if (ps_weighted) {
                const PhiWeightedSum s = phi_weighted_sum(ps_c, ps_T);
                json j{{"c", ps_c}, {"T", ps_T}, {"n_lo", s.n_lo}, {"n_hi", s.n_hi}, {"direct", s.direct},
                       {"abel", s.abel}, {"leading", s.leading}, {"two_term", s.two_term}};
                write_text(g.out, g.format == "json" ? j.dump(2) + "\n" : kv_csv(j));
                return 0;
            }
            if (ps_N.empty()) throw ConfigError("N", "give at least one N");
            std::int64_t top = 1;
            for (auto N : ps_N) top = std::max(top, N);
            const TotientTable table = totient_sieve(top);
            const double z2 = zeta(2.0);
            std::ostringstream csv;
            csv << "N,sum,target,residual,envelope\n";
            json rows = json::array();
            for (auto N : ps_N) {
                const double s = phi_ratio_partial_sum(table, N);
                const double t = static_cast<double>(N) / z2;
                const double env = static_cast<double>(N) > std::exp(1.0) ? walfisz_envelope(static_cast<double>(N)) : NAN;
                csv << N << ',' << format_double(s) << ',' << format_double(t) << ',' << format_double(s - t) << ','
                    << format_double(env) << '\n';
                rows.push_back({{"N", N}, {"sum", s}, {"target", t}, {"residual", s - t},
                                {"envelope", std::isfinite(env) ? json(env) : json(nullptr)}});
            }
            write_text(g.out, g.format == "json" ? rows.dump(2) + "\n" : csv.str());
            return 0;
        }

        if (fit->parsed()) {
            ExperimentSeries s;
            s.rows = read_rows_csv(fit_in);
            s.metadata["input"] = fit_in;
            const auto spec = fit_env.spec();
            if (!spec) throw ConfigError("envelope", "fit needs an envelope kind");
            const EnvelopeFit f = fit_envelope(s.rows, *spec);
            emit_report(s, g.fmt(), g.out, &f);
            std::cerr << "envelope C = " << format_double(f.C) << (f.pass ? " (pass)" : " (per-decade C increased)")
                      << "\n";
            return f.pass ? 0 : 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
