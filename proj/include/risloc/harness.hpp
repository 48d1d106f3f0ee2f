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
// Experiment harness: named scenario presets, Monte-Carlo NMSE sweeps,
// runtime comparison, spectrum export, and the JSON scenario format.

#ifndef RISLOC_HARNESS_HPP
#define RISLOC_HARNESS_HPP

#include "risloc/estimators.hpp"
#include "risloc/simulator.hpp"
#include "risloc/subspace.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace risloc
{
    inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
    inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

    enum class Method
    {
        modified, // modified MUSIC (this library's main estimator)
        music3d,  // exhaustive 3D MUSIC
        music2d   // 2D MUSIC with known elevations
    };

    std::string method_name(Method method);
    Method method_from_name(const std::string &name);

    std::vector<std::string> preset_names();
    Scenario make_preset(const std::string &name);

    // Greedy nearest-neighbor assignment in (azimuth, elevation); returns
    // pairing[k] = index into `estimates` assigned to truth k. Ties broken by
    // spectrum value, larger first.
    std::vector<Index> pair_estimates(const std::vector<LocationEstimate> &estimates,
                                      const std::vector<UeTruth> &truths);

    struct NmseValue
    {
        double angle = 0.0;    // sum of squared angle errors over sum of squared true angles
        double distance = 0.0; // sum of squared range errors over sum of squared true ranges
    };

    NmseValue nmse(const std::vector<LocationEstimate> &estimates, const std::vector<UeTruth> &truths,
                   const std::vector<Index> &pairing);

    struct TrialResult
    {
        std::vector<LocationEstimate> estimates;
        std::vector<UeTruth> truth;
        std::vector<std::array<double, 3>> paired_errors; // (d_azimuth, d_elevation, d_range)
        bool degenerate = false;
        double wall_time = 0.0; // seconds spent in the estimator
        std::uint64_t grid_evals = 0;
    };

    // One estimator on one covariance realization, paired against the truth.
    TrialResult run_trial(const MatC &r_hat, const Scenario &scn, Method method,
                          const ExecOptions &opts = {});

    enum class SweepAxis
    {
        tx_power_dbm,
        num_users
    };

    struct SweepOptions
    {
        Index trials = 100;
        std::uint64_t base_seed = 1;
        unsigned threads = 1; // parallel trials; estimators run single-threaded inside
        std::optional<ScenarioGrids> grid_override; // coarser grids for Monte-Carlo runs
        bool quadratic_refine = false;
    };

    struct MethodSeries
    {
        Method method = Method::modified;
        VecR angle_nmse;    // one mean per sweep value, failures excluded
        VecR distance_nmse;
        std::vector<Index> failure_count; // degenerate or failed trials per sweep value
    };

    struct NmseReport
    {
        std::string axis_name;
        VecR axis_values;
        std::vector<MethodSeries> series;
        Index trial_count = 0;
        std::uint64_t base_seed = 0;
        Scenario base_scenario; // embedded for replay
    };

    // Runs `trials` independent realizations per sweep value (fresh channel,
    // symbols and noise; stream seed derived from (base_seed, sweep index,
    // trial index)) and aggregates per-method NMSE means.
    NmseReport run_sweep(const Scenario &base, SweepAxis axis, const std::vector<double> &values,
                         const std::vector<Method> &methods, const SweepOptions &opts);

    struct BenchReport
    {
        Index grid_per_dim = 0;
        Index repetitions = 0;
        double modified_seconds = 0.0; // median over repetitions
        double music3d_seconds = 0.0;
        std::uint64_t modified_evals = 0;
        std::uint64_t music3d_evals = 0;
        Index modified_candidates = 0; // angle peaks the distance stage scored
        double speedup = 0.0; // music3d_seconds / modified_seconds
        std::uint64_t seed = 0;
    };

    // Times modified MUSIC against 3D MUSIC on the identical covariance with
    // the same number of grid points per azimuth/elevation/distance dimension.
    BenchReport runtime_compare(const Scenario &scn, Index grid_per_dim, Index repetitions,
                                const ExecOptions &opts = {});

    // Writes angle_spectrum.csv, distance_spectrum_user<k>.csv per estimate,
    // and truth.csv into out_dir; returns the paths written.
    std::vector<std::string> emit_spectra(const Scenario &scn, const std::string &out_dir,
                                          const ExecOptions &opts = {});

    // JSON scenario format (schema documented in the README).
    Scenario load_scenario_file(const std::string &path);
    Scenario scenario_from_json_string(const std::string &text);
    std::string scenario_to_json_string(const Scenario &scn, int indent = 2);

    // One SVD-based conditioning check of the stacked channel for the
    // scenario's own seed; throws IllPosedError if the smallest singular
    // value falls below 1e-8 times the largest.
    void check_stacked_channel_rank(const Scenario &scn);

    void write_sweep_csv(const NmseReport &report, const std::string &path);
    void write_bench_csv(const BenchReport &report, const std::string &path);

} // namespace risloc

#endif // RISLOC_HARNESS_HPP
