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

#include <cmath>
#include <stdexcept>

namespace risloc
{

    namespace
    {
        constexpr double kWavelength = 0.3;        // [m]
        constexpr double kNoiseDbm = -154.0;       // per-antenna noise power
        constexpr double kTxPowerDbm = 10.0;       // default user transmit power
        constexpr double kRicianFactor = 2.0;
        constexpr Index kSamples = 300;
        constexpr std::uint64_t kDefaultSeed = 20240917ULL;
        constexpr double kDegree = M_PI / 180.0;

        UeTruth make_ue(double azimuth, double elevation, double range)
        {
            return UeTruth(azimuth, elevation, range, dbm_to_watt(kTxPowerDbm),
                           path_loss(range, kWavelength));
        }

        Scenario make_base(Index n_side, Index m_bs, Index smoothing_side)
        {
            Scenario scn;
            scn.geom = RisGeometry(n_side, n_side, 0.5 * kWavelength, 0.5 * kWavelength, kWavelength);
            scn.m_bs = m_bs;
            scn.l_subslots = (scn.geom.total() + m_bs - 1) / m_bs;
            scn.t_samples = kSamples;
            scn.noise_power = dbm_to_watt(kNoiseDbm);
            scn.rician_factor = kRicianFactor;
            scn.smoothing = SmoothingSize{smoothing_side, smoothing_side};
            scn.grids.azimuth = angle_grid(0.5 * kDegree);
            scn.grids.elevation = angle_grid(0.5 * kDegree);
            scn.grids.distance = GridSpec{0.5, scn.geom.fraunhofer_distance(), 500};
            scn.rng_seed = kDefaultSeed;
            scn.model = ResponseModel::exact;
            return scn;
        }
    } // namespace

    std::vector<std::string> preset_names()
    {
        return {"fig2", "fig4", "fig5", "fig6a", "fig6b"};
    }

    Scenario make_preset(const std::string &name)
    {
        if (name == "fig2")
        {
            Scenario scn = make_base(25, 128, 22);
            scn.ues = {make_ue(M_PI / 6.0, -M_PI / 3.0, 6.0), make_ue(-M_PI / 6.0, M_PI / 3.0, 8.0),
                       make_ue(M_PI / 3.0, -M_PI / 6.0, 10.0), make_ue(-M_PI / 3.0, M_PI / 6.0, 12.0)};
            scn.validate();
            return scn;
        }
        if (name == "fig4")
        {
            Scenario scn = make_base(7, 16, 6);
            scn.ues = {make_ue(M_PI / 6.0, -M_PI / 6.0, 1.5), make_ue(-M_PI / 6.0, M_PI / 6.0, 2.0)};
            // Coarser grids keep the exhaustive 3D baseline tractable in
            // Monte-Carlo runs; the true angles stay exactly on-grid.
            scn.grids.azimuth = angle_grid(1.5 * kDegree);
            scn.grids.elevation = angle_grid(1.5 * kDegree);
            scn.grids.distance.count = 150;
            scn.validate();
            return scn;
        }
        if (name == "fig5")
        {
            Scenario scn = make_base(25, 128, 22);
            scn.ues = {make_ue(M_PI / 6.0, 0.0, 6.0), make_ue(-M_PI / 6.0, 0.0, 6.5),
                       make_ue(M_PI / 12.0, 0.0, 7.0), make_ue(-M_PI / 12.0, 0.0, 7.5)};
            scn.validate();
            return scn;
        }
        if (name == "fig6a" || name == "fig6b")
        {
            Scenario scn = name == "fig6a" ? make_base(15, 128, 12) : make_base(35, 128, 32);
            scn.ues = {make_ue(M_PI / 16.0, M_PI / 16.0, 6.0), make_ue(M_PI / 6.0, M_PI / 6.0, 6.0),
                       make_ue(M_PI / 3.0, M_PI / 3.0, 6.0)};
            scn.validate();
            return scn;
        }
        throw std::invalid_argument("make_preset: unknown preset '" + name + "'");
    }

} // namespace risloc
