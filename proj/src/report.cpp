#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "latcount/harness.hpp"

namespace latcount {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json fit_json(const EnvelopeFit& fit) {
    json j;
    j["C"] = fit.C;
    j["pass"] = fit.pass;
    j["excluded_rows"] = fit.excluded;
    json dec = json::array();
    for (const auto& d : fit.decades) dec.push_back({{"decade", d.decade}, {"C", d.C}});
    j["decades"] = dec;
    return j;
}

json rows_json(const std::vector<SeriesRow>& rows, const EnvelopeFit* fit) {
    json a = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        json r;
        r["T"] = rows[i].T;
        r["statistic"] = number_or_null(rows[i].statistic);
        r["target"] = number_or_null(rows[i].target);
        r["residual"] = number_or_null(rows[i].residual);
        r["used"] = rows[i].used;
        if (fit) {
            r["envelope"] = fit->envelope[i] ? json(*fit->envelope[i]) : json(nullptr);
            r["slack"] = fit->slack[i] ? json(*fit->slack[i]) : json(nullptr);
        }
        a.push_back(r);
    }
    return a;
}

}  // namespace

std::string render_report(const ExperimentSeries& s, ReportFormat f, const EnvelopeFit* fit) {
    if (s.rows.empty()) throw std::invalid_argument("report: series has no rows");
    if (fit && fit->envelope.size() != s.rows.size()) throw std::invalid_argument("report: fit does not match series");
    if (f == ReportFormat::Json) {
        json j;
        j["metadata"] = s.metadata;
        j["rows"] = rows_json(s.rows, fit);
        if (s.replications.size() > 1) {
            json reps = json::array();
            for (const auto& r : s.replications) reps.push_back(rows_json(r, nullptr));
            j["replications"] = reps;
        }
        if (fit) j["fit"] = fit_json(*fit);
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << "T,statistic,target,residual,envelope,slack\n";
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        const auto& r = s.rows[i];
        out << format_double(r.T) << ',' << format_double(r.statistic) << ',' << format_double(r.target) << ','
            << format_double(r.residual) << ',';
        if (fit && fit->envelope[i]) out << format_double(*fit->envelope[i]);
        out << ',';
        if (fit && fit->slack[i]) out << format_double(*fit->slack[i]);
        out << '\n';
    }
    return out.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

void emit_report(const ExperimentSeries& s, ReportFormat f, const std::string& path, const EnvelopeFit* fit) {
    write_text(path, render_report(s, f, fit));
}

}  // namespace latcount
