#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "latcount/geometry.hpp"

namespace latcount {

// Raised for malformed experiment configurations; field() names the culprit.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class SweepKind { Count, Spiral, Approx };
enum class LatticeKind { Dani, LinearForms };
enum class Normalize { None, Density };  // density divides statistic and target by log T

struct SweepConfig {
    SweepKind kind = SweepKind::Count;
    LatticeKind lattice = LatticeKind::Dani;
    bool affine = false;  // shift by xi = B u, u uniform on [0,1)^d
    int d = 2;            // dani: ambient dimension, x in R^{d-1}
    int m = 1, n = 1;     // linear forms
    double c = 1.0;
    std::optional<SphericalCap> cap;  // spiral (default hemisphere) or a P-region restriction
    bool primitive = false;
    Normalize normalize = Normalize::None;
    std::vector<double> T_grid;
    int replications = 1;
    std::uint64_t seed = 1;
    int threads = 1;
    std::optional<Eigen::VectorXd> x;  // fixed x instead of a random draw
    std::optional<Eigen::MatrixXd> M;  // fixed M instead of a random draw

    int dx() const { return lattice == LatticeKind::Dani ? d - 1 : m; }
};

SweepConfig sweep_config_from_json(const nlohmann::json& j);
nlohmann::json sweep_config_to_json(const SweepConfig& cfg);
void validate(const SweepConfig& cfg);

struct SeriesRow {
    double T = 0.0;
    double statistic = 0.0;
    double target = 0.0;
    double residual = 0.0;
    std::int64_t used = 0;  // replications contributing (spiral ratios can be undefined)
};

struct ExperimentSeries {
    std::vector<SeriesRow> rows;  // replication average
    std::vector<std::vector<SeriesRow>> replications;
    nlohmann::json metadata;
};

ExperimentSeries run_sweep(const SweepConfig& cfg);

enum class EnvelopeKind { Gaposhkin, Backbone, Custom };

struct EnvelopeSpec {
    EnvelopeKind kind = EnvelopeKind::Gaposhkin;
    double epsilon = 0.1;
    // custom: Psi(t) = (log t)^a (log log t)^b
    double a = 1.0, b = 2.0;
};

// Envelope value at T, or nullopt where the iterated logarithms are undefined.
std::optional<double> envelope(const EnvelopeSpec& spec, double T);
// int_{e^2}^{1e12} dt / (t Psi(t)) for the custom Psi, with convergence of the tail checked.
double psi_admissibility_integral(const EnvelopeSpec& spec);

struct DecadeFit {
    int decade = 0;  // floor(log10 T)
    double C = 0.0;
};

struct EnvelopeFit {
    double C = 0.0;
    bool pass = false;
    std::vector<std::optional<double>> envelope;  // per row
    std::vector<std::optional<double>> slack;     // C * envelope - |residual|
    std::vector<std::size_t> excluded;            // rows where the envelope is undefined
    std::vector<DecadeFit> decades;
};

EnvelopeFit fit_envelope(const std::vector<SeriesRow>& rows, const EnvelopeSpec& spec);

enum class ReportFormat { Csv, Json };

std::string render_report(const ExperimentSeries& s, ReportFormat f, const EnvelopeFit* fit = nullptr);
// Writes to path, or stdout when path is empty or "-".
void emit_report(const ExperimentSeries& s, ReportFormat f, const std::string& path,
                 const EnvelopeFit* fit = nullptr);

// %.17g, shared by every report writer so output is bit-stable.
std::string format_double(double v);
void write_text(const std::string& path, const std::string& text);

}  // namespace latcount
