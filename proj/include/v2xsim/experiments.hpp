#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "v2xsim/config.hpp"
#include "v2xsim/scenario.hpp"

namespace v2xsim {

inline constexpr const char* kRevision = "v2xsim-1.0";

enum class SweepParam { dbs_radius, epsilon, min_points };

inline const char* sweep_param_label(SweepParam p) {
    switch (p) {
    case SweepParam::dbs_radius: return "dbs_radius";
    case SweepParam::epsilon: return "epsilon";
    case SweepParam::min_points: return "min_points";
    }
    return "?";
}

inline SweepParam parse_sweep_param(const std::string& s) {
    if (s == "dbs_radius") return SweepParam::dbs_radius;
    if (s == "epsilon") return SweepParam::epsilon;
    if (s == "min_points") return SweepParam::min_points;
    throw std::invalid_argument("unknown sweep parameter '" + s + "'");
}

struct SweepSpec {
    SweepParam parameter = SweepParam::dbs_radius;
    std::vector<double> values; ///< strictly increasing
    int seeds = 500;            ///< scenarios per value, seeds 0..seeds-1
    ScenarioConfig base_config;
    Method baseline = Method::proposed;
};

struct SweepRow {
    double value = 0.0;
    double mean_se = 0.0;
    double std_se = 0.0; ///< sample standard deviation across seeds
    int seeds = 0;
};

struct SweepResult {
    SweepParam parameter = SweepParam::dbs_radius;
    Method baseline = Method::proposed;
    std::vector<SweepRow> rows;
    std::string config_echo;
    std::string timestamp;
    std::string revision;
};

inline ScenarioConfig override_param(ScenarioConfig cfg, SweepParam p, double value) {
    switch (p) {
    case SweepParam::dbs_radius: cfg.r_k = value; break;
    case SweepParam::epsilon: cfg.epsilon_m = value; break;
    case SweepParam::min_points: cfg.min_points = static_cast<int>(std::lround(value)); break;
    }
    validate(cfg);
    return cfg;
}

namespace detail {

inline void validate_spec(const SweepSpec& spec) {
    if (spec.values.empty())
        throw std::invalid_argument("sweep: values must be nonempty");
    for (std::size_t i = 1; i < spec.values.size(); ++i)
        if (!(spec.values[i] > spec.values[i - 1]))
            throw std::invalid_argument("sweep: values must be strictly increasing");
    if (spec.seeds < 1)
        throw std::invalid_argument("sweep: seeds must be at least 1");
}

inline std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace detail

/// Runs seeds 0..seeds-1 for each sweep value and aggregates mean and sample
/// standard deviation of the total spectral efficiency, in fixed seed order.
inline SweepResult run_sweep(const SweepSpec& spec) {
    detail::validate_spec(spec);
    SweepResult result;
    result.parameter = spec.parameter;
    result.baseline = spec.baseline;
    result.config_echo = to_json(spec.base_config);
    result.timestamp = detail::iso_timestamp();
    result.revision = kRevision;
    for (double value : spec.values) {
        const ScenarioConfig cfg = override_param(spec.base_config, spec.parameter, value);
        std::vector<double> samples;
        samples.reserve(static_cast<std::size_t>(spec.seeds));
        for (int s = 0; s < spec.seeds; ++s) {
            try {
                samples.push_back(run_scenario(cfg, static_cast<std::uint64_t>(s),
                                               spec.baseline).total_se);
            } catch (const std::exception& e) {
                throw std::runtime_error("sweep value " + std::to_string(value) +
                                         ", seed " + std::to_string(s) + ": " + e.what());
            }
        }
        double sum = 0.0;
        for (double x : samples)
            sum += x;
        const double mean = sum / static_cast<double>(samples.size());
        double sq = 0.0;
        for (double x : samples)
            sq += (x - mean) * (x - mean);
        const double stddev =
            samples.size() > 1 ? std::sqrt(sq / static_cast<double>(samples.size() - 1)) : 0.0;
        result.rows.push_back({value, mean, stddev, spec.seeds});
    }
    return result;
}

/// Baseline sweep; the spec must name one of the two internal baselines.
inline SweepResult run_baseline(const SweepSpec& spec) {
    if (spec.baseline != Method::plain_dbscan && spec.baseline != Method::mbs_only)
        throw std::invalid_argument("run_baseline: baseline must be plain_dbscan or mbs_only");
    return run_sweep(spec);
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace detail

/// CSV with header `param,value,mean_se,std_se,seeds`, one row per value.
inline void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("emit_csv: cannot open " + path.string());
    out << "param,value,mean_se,std_se,seeds\n";
    for (const SweepRow& row : result.rows) {
        out << sweep_param_label(result.parameter) << ','
            << detail::format_double(row.value) << ','
            << detail::format_double(row.mean_se) << ','
            << detail::format_double(row.std_se) << ',' << row.seeds << '\n';
    }
    if (!out)
        throw std::runtime_error("emit_csv: write failure on " + path.string());
}

///// Single static SVG line chart: x = swept value, y = mean total SE, one
/// polyline per result, legend from the baseline labels.
inline void emit_plot(const std::vector<SweepResult>& results,
                      const std::filesystem::path& path) {
    if (results.empty())
        throw std::invalid_argument("emit_plot: no results");
    for (const SweepResult& r : results)
        if (r.parameter != results.front().parameter)
            throw std::invalid_argument("emit_plot: results sweep different parameters");

    constexpr double width = 640, height = 480;
    constexpr double ml = 70, mr = 20, mt = 20, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
    for (const SweepResult& r : results) {
        for (const SweepRow& row : r.rows) {
            xmin = std::min(xmin, row.value);
            xmax = std::max(xmax, row.value);
            ymax = std::max(ymax, row.mean_se);
        }
    }
    if (xmax <= xmin)
        xmax = xmin + 1.0;
    if (ymax <= ymin)
        ymax = ymin + 1.0;
    ymax *= 1.05;

    auto sx = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto sy = [&](double v) { return height - mb - (v - ymin) / (ymax - ymin) * (height - mt - mb); };
    auto fmt = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };
    auto fmtg = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        return std::string(buf);
    };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b"};

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("emit_plot: cannot open " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n"
        << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    // axes
    out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(height - mb) << "\" x2=\""
        << fmt(width - mr) << "\" y2=\"" << fmt(height - mb)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(ml)
        << "\" y2=\"" << fmt(height - mb) << "\" stroke=\"black\"/>\n";
    constexpr int nticks = 5;
    for (int t = 0; t <= nticks; ++t) {
        const double xv = xmin + (xmax - xmin) * t / nticks;
        const double yv = ymin + (ymax - ymin) * t / nticks;
        out << "<line x1=\"" << fmt(sx(xv)) << "\" y1=\"" << fmt(height - mb)
            << "\" x2=\"" << fmt(sx(xv)) << "\" y2=\"" << fmt(height - mb + 5)
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << fmt(height - mb + 20)
            << "\" font-size=\"12\" text-anchor=\"middle\">" << fmtg(xv) << "</text>\n";
        out << "<line x1=\"" << fmt(ml - 5) << "\" y1=\"" << fmt(sy(yv)) << "\" x2=\""
            << fmt(ml) << "\" y2=\"" << fmt(sy(yv)) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt(ml - 8) << "\" y=\"" << fmt(sy(yv) + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << fmtg(yv) << "</text>\n";
    }
    out << "<text x=\"" << fmt((ml + width - mr) / 2) << "\" y=\"" << fmt(height - 10)
        << "\" font-size=\"13\" text-anchor=\"middle\">"
        << sweep_param_label(results.front().parameter) << "</text>\n";
    out << "<text x=\"15\" y=\"" << fmt((mt + height - mb) / 2)
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
        << fmt((mt + height - mb) / 2) << ")\">mean total SE [bit/s/Hz]</text>\n";

    for (std::size_t i = 0; i < results.size(); ++i) {
        const char* color = palette[i % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const SweepRow& row : results[i].rows)
            out << fmt(sx(row.value)) << ',' << fmt(sy(row.mean_se)) << ' ';
        out << "\"/>\n";
        const double ly = mt + 18.0 * static_cast<double>(i) + 12.0;
        out << "<line x1=\"" << fmt(width - mr - 150) << "\" y1=\"" << fmt(ly - 4)
            << "\" x2=\"" << fmt(width - mr - 125) << "\" y2=\"" << fmt(ly - 4)
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt(width - mr - 120) << "\" y=\"" << fmt(ly)
            << "\" font-size=\"12\">" << method_label(results[i].baseline) << "</text>\n";
    }
    out << "</svg>\n";
    if (!out)
        throw std::runtime_error("emit_plot: write failure on " + path.string());
}

} // namespace v2xsim
