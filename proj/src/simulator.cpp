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

#include "risloc/simulator.hpp"

#include <cmath>
#include <stdexcept>

namespace risloc
{

    VecR GridSpec::points() const
    {
        if (count < 1)
            throw std::invalid_argument("GridSpec: empty grid");
        if (count == 1)
            return VecR::Constant(1, start);
        return VecR::LinSpaced(count, start, stop);
    }

    GridSpec angle_grid(double step_rad)
    {
        if (!(step_rad > 0.0))
            throw std::invalid_argument("angle_grid: step must be positive");
        const double half_pi = M_PI / 2.0;
        const Index count = static_cast<Index>(std::llround(M_PI / step_rad)) - 1;
        if (count < 1)
            throw std::invalid_argument("angle_grid: step too large");
        return GridSpec{-half_pi + step_rad, half_pi - step_rad, count};
    }

    void Scenario::validate() const
    {
        const Index n = geom.total();
        if (m_bs < 1)
            throw std::invalid_argument("Scenario: need at least one BS antenna");
        if (t_samples < 1)
            throw std::invalid_argument("Scenario: need at least one sample");
        if (noise_power < 0.0)
            throw std::invalid_argument("Scenario: noise power must be non-negative");
        if (rician_factor < 0.0)
            throw std::invalid_argument("Scenario: Rician factor must be non-negative");
        const Index min_l = (n + m_bs - 1) / m_bs;
        if (l_subslots < min_l)
            throw std::invalid_argument("Scenario: l_subslots must be at least ceil(N / M) "
                                        "so the stacked channel can have full column rank");
        if (l_subslots > n)
            throw std::invalid_argument("Scenario: l_subslots cannot exceed the element count");
        if (smoothing.d_h < 1 || smoothing.d_h > geom.n_h || smoothing.d_v < 1 || smoothing.d_v > geom.n_v)
            throw std::invalid_argument("Scenario: smoothing window must fit inside the surface");
        const Index k = num_users();
        const Index window = smoothing.d_h * smoothing.d_v;
        const Index j = (geom.n_h - smoothing.d_h + 1) * (geom.n_v - smoothing.d_v + 1);
        if (k > 0 && window <= k)
            throw std::invalid_argument("Scenario: smoothing window size D_H*D_V must exceed the user count");
        if (k > 0 && j <= k)
            throw std::invalid_argument("Scenario: sub-surface count (N_H-D_H+1)*(N_V-D_V+1) "
                                        "must exceed the user count");
        if (grids.azimuth.count < 1 || grids.elevation.count < 1 || grids.distance.count < 1)
            throw std::invalid_argument("Scenario: search grids must be non-empty");
        if (!(grids.distance.start > 0.0))
            throw std::invalid_argument("Scenario: distance grid must start above zero");
    }

    std::vector<VecC> dft_configurations(Index n, Index l)
    {
        if (l < 1 || l > n)
            throw std::invalid_argument("dft_configurations: need 1 <= L <= N");
        std::vector<VecC> configs;
        configs.reserve(static_cast<std::size_t>(l));
        for (Index col = 0; col < l; ++col)
        {
            VecC c(n);
            for (Index row = 0; row < n; ++row)
            {
                const double phase = -2.0 * M_PI * static_cast<double>(row) * static_cast<double>(col)
                                     / static_cast<double>(n);
                c(row) = Complex(std::cos(phase), std::sin(phase));
            }
            configs.push_back(std::move(c));
        }
        return configs;
    }

    namespace
    {
        // Far-field steering of a half-wavelength linear array.
        VecC ula_steering(Index m, double angle)
        {
            VecC a(m);
            const double step = M_PI * std::sin(angle);
            for (Index i = 0; i < m; ++i)
                a(i) = Complex(std::cos(step * static_cast<double>(i)), std::sin(step * static_cast<double>(i)));
            return a;
        }

        // Far-field steering of the planar surface (no curvature term).
        VecC upa_far_field_steering(const RisGeometry &geom, double azimuth, double elevation)
        {
            const double k0 = 2.0 * M_PI / geom.wavelength;
            const double ph = k0 * geom.d_h * std::sin(azimuth) * std::cos(elevation);
            const double pv = k0 * geom.d_v * std::sin(elevation);
            VecC a(geom.total());
            for (Index n = 1; n <= geom.total(); ++n)
            {
                const ElementIndex idx = element_indices(n, geom);
                const double phase = ph * static_cast<double>(idx.h) + pv * static_cast<double>(idx.v);
                a(n - 1) = Complex(std::cos(phase), std::sin(phase));
            }
            return a;
        }
    } // namespace

    RicianParts rician_channel_parts(Index m_bs, const RisGeometry &geom, Rng &rng)
    {
        if (m_bs < 1)
            throw std::invalid_argument("rician_channel_parts: need at least one antenna");
        RicianParts parts;

        // Departure/arrival angles drawn once per realization.
        const double bs_angle = rng.uniform(-M_PI / 2.0, M_PI / 2.0);
        const double ris_azimuth = rng.uniform(-M_PI / 2.0, M_PI / 2.0);
        const double ris_elevation = rng.uniform(-M_PI / 2.0, M_PI / 2.0);
        parts.los = ula_steering(m_bs, bs_angle) * upa_far_field_steering(geom, ris_azimuth, ris_elevation).adjoint();

        parts.nlos.resize(m_bs, geom.total());
        for (Index r = 0; r < m_bs; ++r)
            for (Index c = 0; c < geom.total(); ++c)
                parts.nlos(r, c) = rng.cnormal();
        return parts;
    }

    MatC rician_channel(Index m_bs, const RisGeometry &geom, double kappa, Rng &rng)
    {
        if (kappa < 0.0)
            throw std::invalid_argument("rician_channel: Rician factor must be non-negative");
        const RicianParts parts = rician_channel_parts(m_bs, geom, rng);
        const double w_los = std::sqrt(kappa / (1.0 + kappa));
        const double w_nlos = std::sqrt(1.0 / (1.0 + kappa));
        return w_los * parts.los + w_nlos * parts.nlos;
    }

    double path_loss(double range, double wavelength)
    {
        if (!(range > 0.0))
            throw std::invalid_argument("path_loss: range must be positive");
        const double x = wavelength / (4.0 * M_PI * range);
        return x * x;
    }

    MatC build_stacked_channel(const MatC &h, const std::vector<VecC> &configs)
    {
        if (configs.empty())
            throw std::invalid_argument("build_stacked_channel: need at least one configuration");
        const Index m = h.rows();
        const Index n = h.cols();
        const Index l = static_cast<Index>(configs.size());
        for (const VecC &c : configs)
            if (c.size() != n)
                throw std::invalid_argument("build_stacked_channel: configuration length does not match "
                                            "the channel column count");
        MatC g(l * m, n);
        for (Index block = 0; block < l; ++block)
            g.middleRows(block * m, m) = h * configs[static_cast<std::size_t>(block)].asDiagonal();
        return g;
    }

    SnapshotBatch generate_snapshots(const Scenario &scn, Rng &rng)
    {
        scn.validate();
        const Index n = scn.geom.total();
        const Index k = scn.num_users();
        const Index t = scn.t_samples;
        const Index rows = scn.l_subslots * scn.m_bs;

        const MatC h = rician_channel(scn.m_bs, scn.geom, scn.rician_factor, rng);
        const std::vector<VecC> configs = dft_configurations(n, scn.l_subslots);

        SnapshotBatch batch;
        batch.g_tilde = build_stacked_channel(h, configs);

        batch.s_true.resize(k, t);
        for (Index col = 0; col < t; ++col)
            for (Index row = 0; row < k; ++row)
                batch.s_true(row, col) = std::sqrt(scn.ues[static_cast<std::size_t>(row)].signal_power())
                                         * rng.cnormal();

        batch.y.resize(rows, t);
        if (k > 0)
        {
            const MatC a = array_response_matrix(scn.ues, scn.geom, scn.model);
            batch.y.noalias() = (batch.g_tilde * a) * batch.s_true;
        }
        else
        {
            batch.y.setZero();
        }

        const double noise_scale = std::sqrt(scn.noise_power);
        if (noise_scale > 0.0)
        {
            for (Index col = 0; col < t; ++col)
                for (Index row = 0; row < rows; ++row)
                    batch.y(row, col) += noise_scale * rng.cnormal();
        }
        return batch;
    }

} // namespace risloc
