// SPDX-License-Identifier: Apache-2.0
//
// rislocate - RIS-assisted near-field localization library and simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Command-line front end: spectrum export, Monte-Carlo NMSE sweeps, runtime
// benchmarking, and scenario config validation.

#include "risloc/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace
{
    using nlohmann::json;

    unsigned default_threads()
    {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? hw : 1;
    }

    risloc::Scenario resolve_scenario(const std::string &preset, const std::string &config)
    {
        if (!preset.empty() && !config.empty())
            throw CLI::ValidationError("give either --preset or --config, not both");
        if (!preset.empty())
            return risloc::make_preset(preset);
        if (!config.empty())
            return risloc::load_scenario_file(config);
        throw CLI::ValidationError("one of --preset or --config is required");
    }

    void write_run_manifest(const std::string &out_dir, const std::string &subcommand,
                            const risloc::Scenario &scn, const json &options,
                            const std::vector<std::string> &outputs)
    {
        json manifest;
        manifest["subcommand"] = subcommand;
        manifest["options"] = options;
        manifest["scenario"] = json::parse(risloc::scenario_to_json_string(scn));
        manifest["outputs"] = outputs;
        const std::string path = (std::filesystem::path(out_dir) / "run.json").string();
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot open '" + path + "' for writing");
        out << manifest.dump(2) << '\n';
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"rislocate - near-field localization simulator and estimator suite"};
    app.require_subcommand(1);

    std::string preset;
    std::string config;
    std::string out_dir;
    unsigned threads = default_threads();
    bool refine = false;

    // --- spectrum ---------------------------------------------------------
    CLI::App *spectrum = app.add_subcommand("spectrum", "Export angle/distance spectra for a scenario");
    spectrum->add_option("--preset", preset, "Built-in scenario name (fig2|fig4|fig5|fig6a|fig6b)");
    spectrum->add_option("--config", config, "Scenario config file (JSON)");
    spectrum->add_option("--out", out_dir, "Output directory")->required();
    spectrum->add_option("--threads", threads, "Worker threads for grid evaluation");
    spectrum->add_flag("--refine", refine, "Quadratic sub-grid peak refinement");

    // --- sweep ------------------------------------------------------------
    CLI::App *sweep = app.add_subcommand("sweep", "Monte-Carlo NMSE sweep over power or user count");
    std::string axis = "power";
    std::vector<double> values;
    risloc::Index trials = 100;
    std::vector<std::string> method_names{"modified", "music3d"};
    std::uint64_t seed = 1;
    sweep->add_option("--preset", preset, "Built-in scenario name");
    sweep->add_option("--config", config, "Scenario config file (JSON)");
    sweep->add_option("--axis", axis, "Sweep axis: power (dBm) or num-ues")
        ->check(CLI::IsMember({"power", "num-ues"}));
    sweep->add_option("--values", values, "Sweep values (dBm for power, counts for num-ues)")
        ->required()
        ->delimiter(',');
    sweep->add_option("--trials", trials, "Monte-Carlo trials per sweep value");
    sweep->add_option("--methods", method_names, "Estimators: modified|music3d|music2d")->delimiter(',');
    sweep->add_option("--seed", seed, "Base seed for the per-trial streams");
    sweep->add_option("--out", out_dir, "Output directory")->required();
    sweep->add_option("--threads", threads, "Parallel trials");

    // --- bench ------------------------------------------------------------
    CLI::App *bench = app.add_subcommand("bench", "Runtime comparison of modified vs 3D MUSIC");
    risloc::Index grid = 90;
    risloc::Index reps = 3;
    bench->add_option("--preset", preset, "Built-in scenario name");
    bench->add_option("--config", config, "Scenario config file (JSON)");
    bench->add_option("--grid", grid, "Grid points per dimension for both methods");
    bench->add_option("--reps", reps, "Timing repetitions (median reported)");
    bench->add_option("--out", out_dir, "Optional output directory for bench.csv and run.json");
    bench->add_option("--threads", threads, "Worker threads for grid evaluation");

    // --- validate ---------------------------------------------------------
    CLI::App *validate = app.add_subcommand("validate", "Validate a scenario config file");
    validate->add_option("--config", config, "Scenario config file (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (spectrum->parsed())
        {
            const risloc::Scenario scn = resolve_scenario(preset, config);
            risloc::ExecOptions exec;
            exec.threads = threads;
            exec.quadratic_refine = refine;
            const std::vector<std::string> files = risloc::emit_spectra(scn, out_dir, exec);
            json options = {{"preset", preset}, {"config", config}, {"threads", threads},
                            {"refine", refine}};
            write_run_manifest(out_dir, "spectrum", scn, options, files);
            for (const std::string &f : files)
                std::cout << "wrote " << f << '\n';
            return 0;
        }

        if (sweep->parsed())
        {
            const risloc::Scenario scn = resolve_scenario(preset, config);
            std::vector<risloc::Method> methods;
            for (const std::string &name : method_names)
                methods.push_back(risloc::method_from_name(name));
            risloc::SweepOptions opts;
            opts.trials = trials;
            opts.base_seed = seed;
            opts.threads = threads;
            const risloc::SweepAxis sweep_axis = axis == "power" ? risloc::SweepAxis::tx_power_dbm
                                                                 : risloc::SweepAxis::num_users;
            const risloc::NmseReport report = risloc::run_sweep(scn, sweep_axis, values, methods, opts);

            std::filesystem::create_directories(out_dir);
            const std::string csv_path = (std::filesystem::path(out_dir) / "nmse_sweep.csv").string();
            risloc::write_sweep_csv(report, csv_path);
            json options = {{"preset", preset}, {"config", config},   {"axis", axis},
                            {"values", values}, {"trials", trials},   {"methods", method_names},
                            {"seed", seed},     {"threads", threads}};
            write_run_manifest(out_dir, "sweep", scn, options, {csv_path});

            std::cout << report.axis_name << ",method,angle_nmse,distance_nmse,failures\n";
            for (const risloc::MethodSeries &series : report.series)
                for (risloc::Index i = 0; i < report.axis_values.size(); ++i)
                    std::printf("%g,%s,%.6g,%.6g,%lld\n", report.axis_values(i),
                                risloc::method_name(series.method).c_str(), series.angle_nmse(i),
                                series.distance_nmse(i),
                                static_cast<long long>(series.failure_count[static_cast<std::size_t>(i)]));
            std::cout << "wrote " << csv_path << '\n';
            return 0;
        }

        if (bench->parsed())
        {
            const risloc::Scenario scn = resolve_scenario(preset, config);
            risloc::ExecOptions exec;
            exec.threads = threads;
            const risloc::BenchReport report = risloc::runtime_compare(scn, grid, reps, exec);
            std::printf("grid per dimension : %lld\n", static_cast<long long>(report.grid_per_dim));
            std::printf("modified MUSIC     : %.6f s median, %llu grid evaluations\n",
                        report.modified_seconds, static_cast<unsigned long long>(report.modified_evals));
            std::printf("3D MUSIC           : %.6f s median, %llu grid evaluations\n",
                        report.music3d_seconds, static_cast<unsigned long long>(report.music3d_evals));
            std::printf("speedup            : %.1fx\n", report.speedup);
            if (!out_dir.empty())
            {
                std::filesystem::create_directories(out_dir);
                const std::string csv_path = (std::filesystem::path(out_dir) / "bench.csv").string();
                risloc::write_bench_csv(report, csv_path);
                json options = {{"preset", preset},
                                {"config", config},
                                {"grid", grid},
                                {"reps", reps},
                                {"threads", threads},
                                {"speedup", report.speedup}};
                write_run_manifest(out_dir, "bench", scn, options, {csv_path});
                std::cout << "wrote " << csv_path << '\n';
            }
            return 0;
        }

        if (validate->parsed())
        {
            const risloc::Scenario scn = risloc::load_scenario_file(config);
            risloc::check_stacked_channel_rank(scn);
            std::cout << risloc::scenario_to_json_string(scn) << '\n';
            std::cout << "ok: scenario valid, stacked channel well conditioned\n";
            return 0;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
