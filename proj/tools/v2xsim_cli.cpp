// Command-line front end: single-scenario runs and parameter sweeps.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "v2xsim/experiments.hpp"
#include "v2xsim/scenario.hpp"

namespace {

v2xsim::ScenarioConfig read_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return v2xsim::load_config(buf.str());
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stod(item));
    return out;
}

v2xsim::Method parse_method(const std::string& s) {
    if (s == "proposed") return v2xsim::Method::proposed;
    if (s == "plain_dbscan") return v2xsim::Method::plain_dbscan;
    if (s == "mbs_only") return v2xsim::Method::mbs_only;
    throw std::runtime_error("unknown baseline '" + s + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-tier cellular-V2X downlink simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    auto* simulate = app.add_subcommand("simulate", "run one scenario");
    simulate->add_option("--config", config_path, "config file (JSON)")->required();
    simulate->add_option("--seed", seed, "random seed")->required();

    std::string sweep_config, param_name, values_csv, baseline_name = "proposed";
    std::string out_csv, out_plot;
    int seeds = 500;
    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    sweep->add_option("--config", sweep_config, "config file (JSON)")->required();
    sweep->add_option("--param", param_name, "dbs_radius|epsilon|min_points")->required();
    sweep->add_option("--values", values_csv, "comma-separated sweep values")->required();
    sweep->add_option("--seeds", seeds, "scenarios per sweep value");
    sweep->add_option("--baseline", baseline_name, "proposed|plain_dbscan|mbs_only");
    sweep->add_option("--out-csv", out_csv, "output CSV path")->required();
    sweep->add_option("--out-plot", out_plot, "output SVG path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            const auto cfg = read_config(config_path);
            const auto outcome = v2xsim::run_scenario(cfg, seed);
            std::cout << "total_se_bit_s_hz " << outcome.total_se << '\n'
                      << "num_clusters " << outcome.num_clusters << '\n'
                      << "num_users " << outcome.per_user_se.size() << '\n';
        } else {
            v2xsim::SweepSpec spec;
            spec.base_config = read_config(sweep_config);
            spec.parameter = v2xsim::parse_sweep_param(param_name);
            spec.values = parse_values(values_csv);
            spec.seeds = seeds;
            spec.baseline = parse_method(baseline_name);
            const auto result = v2xsim::run_sweep(spec);
            v2xsim::emit_csv(result, out_csv);
            if (!out_plot.empty())
                v2xsim::emit_plot({result}, out_plot);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
