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
// Synthetic snapshot generation: user symbols, free-space path loss, Rician
// base-station channel, per-sub-slot surface configurations, the stacked
// effective channel, and additive receiver noise.

#ifndef RISLOC_SIMULATOR_HPP
#define RISLOC_SIMULATOR_HPP

#include "risloc/geometry.hpp"
#include "risloc/rng.hpp"
#include "risloc/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace risloc
{
    // Uniformly sampled closed interval.
    struct GridSpec
    {
        double start = 0.0;
        double stop = 0.0;
        Index count = 0;

        VecR points() const;
        double step() const { return count > 1 ? (stop - start) / static_cast<double>(count - 1) : 0.0; }
    };

    // Open-interval angle grid (-pi/2, pi/2) sampled at `step_rad`; both
    // endpoints are excluded.
    GridSpec angle_grid(double step_rad);

    struct ScenarioGrids
    {
        GridSpec azimuth;
        GridSpec elevation;
        GridSpec distance;
    };

    struct SmoothingSize
    {
        Index d_h = 0; // sub-surface elements per row
        Index d_v = 0; // sub-surface elements per column
    };

    // Full experiment description. Everything an estimation run needs is in
    // here, so a report that embeds the scenario and a seed is replayable.
    struct Scenario
    {
        RisGeometry geom;
        std::vector<UeTruth> ues;
        Index m_bs = 0;       // base-station antennas
        Index l_subslots = 0; // surface configurations per time slot
        Index t_samples = 0;  // snapshots for covariance averaging
        double noise_power = 0.0; // [W] per receive antenna
        double rician_factor = 0.0;
        SmoothingSize smoothing;
        ScenarioGrids grids;
        std::uint64_t rng_seed = 0;
        ResponseModel model = ResponseModel::exact;

        Index num_users() const { return static_cast<Index>(ues.size()); }

        // Checks the structural invariants; throws std::invalid_argument with
        // the violated condition in the message.
        void validate() const;
    };

    struct SnapshotBatch
    {
        MatC y;       // stacked received signal, [L*M x T]
        MatC g_tilde; // stacked effective channel, [L*M x N]
        MatC s_true;  // scaled user symbols, [K x T]; kept for oracle tests
    };

    // Column l of the DFT matrix as the surface phase configuration of
    // sub-slot l: entry n is exp(-j*2*pi*n*l/N).
    std::vector<VecC> dft_configurations(Index n, Index l);

    struct RicianParts
    {
        MatC los;  // rank-one unit-modulus component
        MatC nlos; // i.i.d. unit-variance complex Gaussian component
    };

    // Draws the two components of one channel realization: a rank-one outer
    // product of far-field steering vectors (linear array at the base station,
    // planar array at the surface) with angles drawn once, and an i.i.d.
    // Gaussian part.
    RicianParts rician_channel_parts(Index m_bs, const RisGeometry &geom, Rng &rng);

    // H = sqrt(kappa/(1+kappa)) * los + sqrt(1/(1+kappa)) * nlos, average
    // entry power 1.
    MatC rician_channel(Index m_bs, const RisGeometry &geom, double kappa, Rng &rng);

    // Free-space gain lambda^2 / (4*pi*r)^2.
    double path_loss(double range, double wavelength);

    // Stacks H*diag(config_l) for the L sub-slot configurations into one tall
    // channel matrix.
    MatC build_stacked_channel(const MatC &h, const std::vector<VecC> &configs);

    // Draws one full realization: channel, user symbols, noise. The y matrix
    // obeys y(:,t) = g_tilde * A * s_true(:,t) + noise with A built from the
    // scenario's response model.
    SnapshotBatch generate_snapshots(const Scenario &scn, Rng &rng);

} // namespace risloc

#endif // RISLOC_SIMULATOR_HPP
