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

#include "risloc/harness.hpp"

#include "risloc/detail/parallel.hpp"
#include "risloc/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace risloc
{

    namespace
    {
        double seconds_since(std::chrono::steady_clock::time_point start)
        {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }

        void format_value(std::ostream &out, double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << buf;
        }

        std::ofstream open_output(const std::string &path)
        {
            std::ofstream out(path);
            if (!out)
                throw std::runtime_error("cannot open '" + path + "' for writing");
            return out;
        }
    } // namespace

    std::string method_name(Method method)
    {
        switch (method)
        {
        case Method::modified: return "modified";
        case Method::music3d: return "music3d";
        case Method::music2d: return "music2d";
        }
        throw std::logic_error("method_name: unknown method");
    }

    Method method_from_name(const std::string &name)
    {
        if (name == "modified")
            return Method::modified;
        if (name == "music3d")
            return Method::music3d;
        if (name == "music2d")
            return Method::music2d;
        throw std::invalid_argument("unknown method '" + name + "' (expected modified|music3d|music2d)");
    }

    std::vector<Index> pair_estimates(const std::vector<LocationEstimate> &estimates,
                                      const std::vector<UeTruth> &truths)
    {
        const Index k = static_cast<Index>(truths.size());
        if (static_cast<Index>(estimates.size()) != k)
            throw std::invalid_argument("pair_estimates: estimate/truth count mismatch");

        std::vector<Index> pairing(static_cast<std::size_t>(k), -1);
        std::vector<bool> truth_used(static_cast<std::size_t>(k), false);
        std::vector<bool> est_used(static_cast<std::size_t>(k), false);
        for (Index step = 0; step < k; ++step)
        {
            double best_dist = std::numeric_limits<double>::infinity();
            double best_value = -std::numeric_limits<double>::infinity();
            Index best_t = -1;
            Index best_e = -1;
            for (Index t = 0; t < k; ++t)
            {
                if (truth_used[static_cast<std::size_t>(t)])
                    continue;
                for (Index e = 0; e < k; ++e)
                {
                    if (est_used[static_cast<std::size_t>(e)])
                        continue;
                    const double da = estimates[static_cast<std::size_t>(e)].azimuth -
                                      truths[static_cast<std::size_t>(t)].azimuth;
                    const double de = estimates[static_cast<std::size_t>(e)].elevation -
                                      truths[static_cast<std::size_t>(t)].elevation;
                    const double dist = da * da + de * de;
                    const double value = estimates[static_cast<std::size_t>(e)].spectrum_value;
                    if (dist < best_dist || (dist == best_dist && value > best_value))
                    {
                        best_dist = dist;
                        best_value = value;
                        best_t = t;
                        best_e = e;
                    }
                }
            }
            pairing[static_cast<std::size_t>(best_t)] = best_e;
            truth_used[static_cast<std::size_t>(best_t)] = true;
            est_used[static_cast<std::size_t>(best_e)] = true;
        }
        return pairing;
    }

    NmseValue nmse(const std::vector<LocationEstimate> &estimates, const std::vector<UeTruth> &truths,
                   const std::vector<Index> &pairing)
    {
        const std::size_t k = truths.size();
        if (estimates.size() != k || pairing.size() != k)
            throw std::invalid_argument("nmse: estimate/truth/pairing length mismatch");
        double angle_err = 0.0;
        double angle_ref = 0.0;
        double dist_err = 0.0;
        double dist_ref = 0.0;
        for (std::size_t t = 0; t < k; ++t)
        {
            const LocationEstimate &est = estimates[static_cast<std::size_t>(pairing[t])];
            const UeTruth &truth = truths[t];
            const double da = est.azimuth - truth.azimuth;
            const double de = est.elevation - truth.elevation;
            const double dr = est.range - truth.range;
            angle_err += da * da + de * de;
            angle_ref += truth.azimuth * truth.azimuth + truth.elevation * truth.elevation;
            dist_err += dr * dr;
            dist_ref += truth.range * truth.range;
        }
        if (angle_ref <= 0.0)
            throw std::invalid_argument("nmse: all true angles are zero, normalization undefined");
        if (dist_ref <= 0.0)
            throw std::invalid_argument("nmse: all true ranges are zero, normalization undefined");
        return NmseValue{angle_err / angle_ref, dist_err / dist_ref};
    }

    namespace
    {
        Scenario scenario_for_sweep_value(const Scenario &base, SweepAxis axis, double value)
        {
            Scenario scn = base;
            if (axis == SweepAxis::tx_power_dbm)
            {
                for (UeTruth &ue : scn.ues)
                    ue = UeTruth(ue.azimuth, ue.elevation, ue.range, dbm_to_watt(value), ue.path_loss);
            }
            else
            {
                const Index k = static_cast<Index>(std::llround(value));
                if (k < 1 || k > base.num_users())
                    throw std::invalid_argument("run_sweep: user count outside the preset's user list");
                scn.ues.assign(base.ues.begin(), base.ues.begin() + k);
            }
            scn.validate();
            return scn;
        }

        // One Monte-Carlo trial: fresh realization, one covariance, every
        // method on the same covariance.
        struct TrialOutcome
        {
            struct PerMethod
            {
                bool failed = true;
                NmseValue value;
            };
            std::vector<PerMethod> methods;
        };

        TrialOutcome run_trial_set(const Scenario &scn, const std::vector<Method> &methods,
                                   std::uint64_t stream_seed, bool quadratic_refine)
        {
            TrialOutcome outcome;
            outcome.methods.resize(methods.size());

            Rng rng(stream_seed);
            const SnapshotBatch batch = generate_snapshots(scn, rng);
            const RecoveredIncident incident = ls_recover(batch);
            const MatC r_hat = sample_covariance(incident);

            ExecOptions exec;
            exec.threads = 1;
            exec.quadratic_refine = quadratic_refine;

            for (std::size_t m = 0; m < methods.size(); ++m)
            {
                try
                {
                    const TrialResult trial = run_trial(r_hat, scn, methods[m], exec);
                    if (trial.degenerate)
                        continue; // counted as a failure, excluded from the mean
                    const std::vector<Index> pairing = pair_estimates(trial.estimates, scn.ues);
                    outcome.methods[m].value = nmse(trial.estimates, scn.ues, pairing);
                    outcome.methods[m].failed = false;
                }
                catch (const std::exception &)
                {
                    // failure recorded, sweep continues
                }
            }
            return outcome;
        }
    } // namespace

    TrialResult run_trial(const MatC &r_hat, const Scenario &scn, Method method,
                          const ExecOptions &opts)
    {
        TrialResult trial;
        trial.truth = scn.ues;

        const auto start = std::chrono::steady_clock::now();
        EstimationResult result;
        switch (method)
        {
        case Method::modified:
            result = modified_music(r_hat, scn, opts);
            break;
        case Method::music3d:
            result = music_3d(r_hat, scn.num_users(), scn.grids, scn.geom, opts);
            break;
        case Method::music2d:
        {
            std::vector<double> elevations;
            elevations.reserve(scn.ues.size());
            for (const UeTruth &ue : scn.ues)
                elevations.push_back(ue.elevation);
            result = music_2d_known_elevation(r_hat, scn.num_users(), elevations, scn.grids,
                                              scn.geom, opts);
            break;
        }
        }
        trial.wall_time = seconds_since(start);
        trial.estimates = std::move(result.locations);
        trial.degenerate = result.degenerate;
        trial.grid_evals = result.grid_evals;

        const std::vector<Index> pairing = pair_estimates(trial.estimates, scn.ues);
        trial.paired_errors.reserve(scn.ues.size());
        for (std::size_t k = 0; k < scn.ues.size(); ++k)
        {
            const LocationEstimate &est = trial.estimates[static_cast<std::size_t>(pairing[k])];
            trial.paired_errors.push_back({est.azimuth - scn.ues[k].azimuth,
                                           est.elevation - scn.ues[k].elevation,
                                           est.range - scn.ues[k].range});
        }
        return trial;
    }

    NmseReport run_sweep(const Scenario &base, SweepAxis axis, const std::vector<double> &values,
                         const std::vector<Method> &methods, const SweepOptions &opts)
    {
        if (values.empty())
            throw std::invalid_argument("run_sweep: no sweep values");
        if (methods.empty())
            throw std::invalid_argument("run_sweep: no methods selected");
        if (opts.trials < 1)
            throw std::invalid_argument("run_sweep: need at least one trial");

        NmseReport report;
        report.axis_name = axis == SweepAxis::tx_power_dbm ? "tx_power_dbm" : "num_users";
        report.axis_values = Eigen::Map<const VecR>(values.data(), static_cast<Index>(values.size()));
        report.trial_count = opts.trials;
        report.base_seed = opts.base_seed;
        report.base_scenario = base;
        report.series.resize(methods.size());
        for (std::size_t m = 0; m < methods.size(); ++m)
        {
            report.series[m].method = methods[m];
            report.series[m].angle_nmse = VecR::Zero(report.axis_values.size());
            report.series[m].distance_nmse = VecR::Zero(report.axis_values.size());
            report.series[m].failure_count.assign(values.size(), 0);
        }

        for (Index sweep_idx = 0; sweep_idx < report.axis_values.size(); ++sweep_idx)
        {
            Scenario scn = scenario_for_sweep_value(base, axis, report.axis_values(sweep_idx));
            if (opts.grid_override)
                scn.grids = *opts.grid_override;
            scn.validate();

            std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(opts.trials));
            std::atomic<Index> next{0};
            auto worker = [&](Index, Index) {
                for (;;)
                {
                    const Index trial = next.fetch_add(1);
                    if (trial >= opts.trials)
                        break;
                    const std::uint64_t seed = derive_seed(opts.base_seed,
                                                           static_cast<std::uint64_t>(sweep_idx),
                                                           static_cast<std::uint64_t>(trial));
                    outcomes[static_cast<std::size_t>(trial)] =
                        run_trial_set(scn, methods, seed, opts.quadratic_refine);
                }
            };
            // The chunk helper is only used to spawn the workers; trials are
            // claimed through the shared counter so long trials balance.
            detail::parallel_for_chunks(static_cast<Index>(std::max(1u, opts.threads)),
                                        std::max(1u, opts.threads), worker);

            for (std::size_t m = 0; m < methods.size(); ++m)
            {
                double angle_sum = 0.0;
                double dist_sum = 0.0;
                Index ok = 0;
                for (const TrialOutcome &outcome : outcomes)
                {
                    if (outcome.methods[m].failed)
                    {
                        ++report.series[m].failure_count[static_cast<std::size_t>(sweep_idx)];
                        continue;
                    }
                    angle_sum += outcome.methods[m].value.angle;
                    dist_sum += outcome.methods[m].value.distance;
                    ++ok;
                }
                const double denom = ok > 0 ? static_cast<double>(ok)
                                            : std::numeric_limits<double>::quiet_NaN();
                report.series[m].angle_nmse(sweep_idx) = angle_sum / denom;
                report.series[m].distance_nmse(sweep_idx) = dist_sum / denom;
            }
        }
        return report;
    }

    BenchReport runtime_compare(const Scenario &scn, Index grid_per_dim, Index repetitions,
                                const ExecOptions &opts)
    {
        if (grid_per_dim < 3)
            throw std::invalid_argument("runtime_compare: need at least 3 grid points per dimension");
        if (repetitions < 1)
            throw std::invalid_argument("runtime_compare: need at least one repetition");

        Scenario bench_scn = scn;
        const double step = M_PI / static_cast<double>(grid_per_dim + 1);
        bench_scn.grids.azimuth = GridSpec{-M_PI / 2.0 + step, M_PI / 2.0 - step, grid_per_dim};
        bench_scn.grids.elevation = bench_scn.grids.azimuth;
        bench_scn.grids.distance = GridSpec{scn.grids.distance.start, scn.grids.distance.stop,
                                            grid_per_dim};
        bench_scn.validate();

        Rng rng(bench_scn.rng_seed);
        const SnapshotBatch batch = generate_snapshots(bench_scn, rng);
        const MatC r_hat = sample_covariance(ls_recover(batch));

        std::vector<double> modified_times;
        std::vector<double> music3d_times;
        BenchReport report;
        report.grid_per_dim = grid_per_dim;
        report.repetitions = repetitions;
        report.seed = bench_scn.rng_seed;
        for (Index rep = 0; rep < repetitions; ++rep)
        {
            auto t0 = std::chrono::steady_clock::now();
            const EstimationResult modified = modified_music(r_hat, bench_scn, opts);
            modified_times.push_back(seconds_since(t0));
            report.modified_evals = modified.grid_evals;
            report.modified_candidates = modified.candidates_scored;

            t0 = std::chrono::steady_clock::now();
            const EstimationResult full = music_3d(r_hat, bench_scn.num_users(), bench_scn.grids,
                                                   bench_scn.geom, opts);
            music3d_times.push_back(seconds_since(t0));
            report.music3d_evals = full.grid_evals;
        }
        auto median = [](std::vector<double> &v) {
            std::sort(v.begin(), v.end());
            const std::size_t mid = v.size() / 2;
            return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
        };
        report.modified_seconds = median(modified_times);
        report.music3d_seconds = median(music3d_times);
        report.speedup = report.music3d_seconds / report.modified_seconds;
        return report;
    }

    std::vector<std::string> emit_spectra(const Scenario &scn, const std::string &out_dir,
                                          const ExecOptions &opts)
    {
        if (scn.num_users() < 1)
            throw std::invalid_argument("emit_spectra: scenario has no users");
        std::filesystem::create_directories(out_dir);

        Rng rng(scn.rng_seed);
        const SnapshotBatch batch = generate_snapshots(scn, rng);
        const MatC r_hat = sample_covariance(ls_recover(batch));
        const EstimationResult result = modified_music(r_hat, scn, opts);

        std::vector<std::string> files;
        const std::filesystem::path dir(out_dir);

        const std::string angle_path = (dir / "angle_spectrum.csv").string();
        write_csv(result.spectra.at(0), angle_path);
        files.push_back(angle_path);

        for (std::size_t k = 1; k < result.spectra.size(); ++k)
        {
            const std::string path =
                (dir / ("distance_spectrum_user" + std::to_string(k) + ".csv")).string();
            write_csv(result.spectra[k], path);
            files.push_back(path);
        }

        const std::string truth_path = (dir / "truth.csv").string();
        {
            std::ofstream out = open_output(truth_path);
            out << "user,azimuth_rad,elevation_rad,range_m\n";
            for (std::size_t k = 0; k < scn.ues.size(); ++k)
            {
                out << (k + 1) << ',';
                format_value(out, scn.ues[k].azimuth);
                out << ',';
                format_value(out, scn.ues[k].elevation);
                out << ',';
                format_value(out, scn.ues[k].range);
                out << '\n';
            }
            if (!out)
                throw std::runtime_error("emit_spectra: write failed for '" + truth_path + "'");
        }
        files.push_back(truth_path);
        return files;
    }

    void check_stacked_channel_rank(const Scenario &scn)
    {
        scn.validate();
        Rng rng(scn.rng_seed);
        const MatC h = rician_channel(scn.m_bs, scn.geom, scn.rician_factor, rng);
        const MatC g = build_stacked_channel(h, dft_configurations(scn.geom.total(), scn.l_subslots));
        Eigen::BDCSVD<MatC> svd(g);
        const VecR sv = svd.singularValues();
        const double ratio = sv(sv.size() - 1) / sv(0);
        if (!(ratio > 1e-8))
            throw IllPosedError("stacked channel is numerically rank deficient (sigma_min/sigma_max = " +
                                std::to_string(ratio) + ")");
    }

    void write_sweep_csv(const NmseReport &report, const std::string &path)
    {
        std::ofstream out = open_output(path);
        out << report.axis_name << ",method,angle_nmse,distance_nmse,trials,failures\n";
        for (const MethodSeries &series : report.series)
            for (Index i = 0; i < report.axis_values.size(); ++i)
            {
                format_value(out, report.axis_values(i));
                out << ',' << method_name(series.method) << ',';
                format_value(out, series.angle_nmse(i));
                out << ',';
                format_value(out, series.distance_nmse(i));
                out << ',' << report.trial_count << ','
                    << series.failure_count[static_cast<std::size_t>(i)] << '\n';
            }
        if (!out)
            throw std::runtime_error("write_sweep_csv: write failed for '" + path + "'");
    }

    void write_bench_csv(const BenchReport &report, const std::string &path)
    {
        std::ofstream out = open_output(path);
        out << "method,median_seconds,grid_evals\n";
        out << "modified,";
        format_value(out, report.modified_seconds);
        out << ',' << report.modified_evals << '\n';
        out << "music3d,";
        format_value(out, report.music3d_seconds);
        out << ',' << report.music3d_evals << '\n';
        if (!out)
            throw std::runtime_error("write_bench_csv: write failed for '" + path + "'");
    }

} // namespace risloc
