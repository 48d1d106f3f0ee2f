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
// Location estimators. The modified MUSIC pipeline decouples angle and
// distance estimation: the anti-diagonal of the incident-signal covariance
// cancels the quadratic wavefront phase, overlapping sub-surface smoothing
// restores the covariance rank, a 2D search finds the angle pairs, and a
// per-user 1D search over distance finishes the job. Full 3D MUSIC and a
// known-elevation 2D MUSIC serve as baselines.

#ifndef RISLOC_ESTIMATORS_HPP
#define RISLOC_ESTIMATORS_HPP

#include "risloc/simulator.hpp"
#include "risloc/spectrum_grid.hpp"
#include "risloc/subspace.hpp"
#include "risloc/types.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace risloc
{
    // Raised when the smoothing configuration cannot separate the requested
    // number of users (window size or sub-surface count too small).
    class RankConditionError : public std::invalid_argument
    {
    public:
        explicit RankConditionError(const std::string &what) : std::invalid_argument(what) {}
    };

    struct ExecOptions
    {
        unsigned threads = 1;         // worker threads for grid evaluation
        bool quadratic_refine = false; // sub-grid peak refinement
    };

    // Overlapping sub-surface partition: all d_h x d_v windows that fit the
    // surface, enumerated row-major from the bottom-left origin.
    struct SmoothingPlan
    {
        Index d_h = 0;
        Index d_v = 0;
        std::vector<ElementIndex> origins; // bottom-left element index of each window

        Index window() const { return d_h * d_v; }
        Index count() const { return static_cast<Index>(origins.size()); }
    };

    SmoothingPlan make_smoothing_plan(const RisGeometry &geom, Index d_h, Index d_v);

    // The anti-diagonal of the covariance read from n = 1: entry n is
    // R(n, N+1-n). Mirror-element pairing cancels the distance term, leaving
    // pure angle sinusoids in the noiseless limit.
    VecC antidiagonal_vector(const MatC &r_hat);

    // Entries of the anti-diagonal vector restricted to each sub-surface
    // window, ordered row-major inside the window.
    std::vector<VecC> smooth_subvectors(const VecC &y_bar, const SmoothingPlan &plan,
                                        const RisGeometry &geom);

    // (1/J) * sum_i y_i y_i^H over the sub-surface vectors; Hermitian PSD.
    MatC smoothed_covariance(const std::vector<VecC> &subvectors);

    // MUSIC-like angle spectrum 1 / (b^H Un Un^H b) over azimuth x elevation.
    // `split` must come from eig_split of the smoothed covariance of a
    // d_h x d_v window.
    SpectrumGrid angle_spectrum(const SubspaceSplit &split, Index d_h, Index d_v,
                                const GridSpec &azimuth, const GridSpec &elevation,
                                const RisGeometry &geom, const ExecOptions &opts = {},
                                std::uint64_t *eval_count = nullptr);

    struct GridPeak
    {
        std::vector<Index> indices;      // grid indices per axis
        std::vector<double> coordinates; // axis values (refined if requested)
        double value = 0.0;
    };

    struct PeakSet
    {
        std::vector<GridPeak> peaks; // descending by value
        Index strict_count = 0;      // leading entries that are true local maxima
        bool degenerate = false;     // padded with non-maxima grid points
    };

    // K strongest strict local maxima over an 8-neighborhood; pads with the
    // largest remaining grid points and sets the degenerate flag when fewer
    // exist.
    PeakSet find_peaks_2d(const SpectrumGrid &spec, Index k, bool quadratic_refine = false);

    // 26-neighborhood analog for 3D spectra.
    PeakSet find_peaks_3d(const SpectrumGrid &spec, Index k, bool quadratic_refine = false);

    struct DistanceEstimate
    {
        double range = 0.0;
        SpectrumGrid spectrum; // full 1D spectrum for inspection
    };

    // Standard MUSIC over distance with the angles held at their estimates;
    // `split_full` comes from eig_split of the N x N sample covariance.
    DistanceEstimate distance_estimate(double azimuth, double elevation,
                                       const SubspaceSplit &split_full, const GridSpec &r_grid,
                                       const RisGeometry &geom, bool quadratic_refine = false,
                                       std::uint64_t *eval_count = nullptr);

    struct LocationEstimate
    {
        double azimuth = 0.0;   // [rad]
        double elevation = 0.0; // [rad]
        double range = 0.0;     // [m]
        double spectrum_value = 0.0;
    };

    struct EstimationResult
    {
        std::vector<LocationEstimate> locations; // descending by spectrum value
        bool degenerate = false;
        std::uint64_t grid_evals = 0;
        Index candidates_scored = 0; // angle peaks examined by the distance stage
        // modified_music: spectra[0] angle grid, spectra[1..K] distance grids.
        // music_3d: spectra[0] full 3D grid.
        // music_2d_known_elevation: one azimuth x distance grid per elevation.
        std::vector<SpectrumGrid> spectra;
    };

    // Full modified-MUSIC pipeline on an N x N sample covariance.
    //
    // The doubled angular frequencies of the anti-diagonal signal make the
    // angle spectrum pi-periodic in (alpha, beta): at half-wavelength spacing
    // every user can cast ghost peaks of exactly equal height elsewhere in
    // the angle domain. The pipeline therefore examines the strongest angle
    // peaks (up to four per user), scores each by the maximum of its distance
    // spectrum over the full-surface response, where ghosts collapse, and
    // keeps the K best-scoring candidates.
    EstimationResult modified_music(const MatC &r_hat, const Scenario &scn,
                                    const ExecOptions &opts = {});

    // Exhaustive 3D MUSIC baseline on the same covariance input.
    EstimationResult music_3d(const MatC &r_hat, Index k, const ScenarioGrids &grids,
                              const RisGeometry &geom, const ExecOptions &opts = {});

    // 2D MUSIC baseline with the elevation of every user known: one
    // azimuth x distance search per distinct elevation, strongest K peaks
    // overall.
    EstimationResult music_2d_known_elevation(const MatC &r_hat, Index k,
                                              const std::vector<double> &known_elevations,
                                              const ScenarioGrids &grids, const RisGeometry &geom,
                                              const ExecOptions &opts = {});

} // namespace risloc

#endif // RISLOC_ESTIMATORS_HPP
