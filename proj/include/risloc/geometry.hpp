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
// Planar-surface geometry: element indexing, exact and Fresnel-approximated
// element-to-user distances, near-field array response vectors and the
// sub-surface angle steering vector.
//
// Element ordering is row-major from the bottom-left corner of the surface
// and is shared by every module; the anti-diagonal covariance extraction
// relies on index n and index N+1-n being mirror elements.

#ifndef RISLOC_GEOMETRY_HPP
#define RISLOC_GEOMETRY_HPP

#include "risloc/types.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace risloc
{
    // Uniform planar surface with odd side lengths so that a center reference
    // element exists. Horizontal/vertical element indices run symmetrically
    // over [-(n_h-1)/2, (n_h-1)/2] x [-(n_v-1)/2, (n_v-1)/2].
    template <typename Scalar>
    struct RisGeometryT
    {
        Index n_h = 0;           // elements per horizontal row (odd)
        Index n_v = 0;           // elements per vertical column (odd)
        Scalar d_h = Scalar(0);  // horizontal element spacing [m]
        Scalar d_v = Scalar(0);  // vertical element spacing [m]
        Scalar wavelength = Scalar(0); // carrier wavelength [m]

        RisGeometryT() = default;

        RisGeometryT(Index nh, Index nv, Scalar dh, Scalar dv, Scalar lambda)
            : n_h(nh), n_v(nv), d_h(dh), d_v(dv), wavelength(lambda)
        {
            if (n_h < 1 || n_h % 2 == 0 || n_v < 1 || n_v % 2 == 0)
                throw std::invalid_argument("RisGeometry: element counts must be positive odd integers");
            if (!(d_h > Scalar(0)) || !(d_v > Scalar(0)) || !(wavelength > Scalar(0)))
                throw std::invalid_argument("RisGeometry: spacings and wavelength must be positive");
        }

        Index total() const { return n_h * n_v; }
        Index half_h() const { return (n_h - 1) / 2; }
        Index half_v() const { return (n_v - 1) / 2; }

        // Conventional near/far-field boundary 2*(aperture diagonal)^2 / lambda.
        Scalar fraunhofer_distance() const
        {
            Scalar ah = Scalar(n_h - 1) * d_h;
            Scalar av = Scalar(n_v - 1) * d_v;
            Scalar diag = std::sqrt(ah * ah + av * av);
            return Scalar(2) * diag * diag / wavelength;
        }
    };

    using RisGeometry = RisGeometryT<double>;

    // Ground truth for one user: spherical position relative to the surface
    // center plus transmit power and large-scale channel gain.
    template <typename Scalar>
    struct UeTruthT
    {
        Scalar azimuth = Scalar(0);   // [rad], in (-pi/2, pi/2)
        Scalar elevation = Scalar(0); // [rad], in (-pi/2, pi/2)
        Scalar range = Scalar(0);     // [m], > 0
        Scalar tx_power = Scalar(0);  // [W]
        Scalar path_loss = Scalar(0); // dimensionless gain in (0, 1]

        UeTruthT() = default;

        UeTruthT(Scalar az, Scalar el, Scalar r, Scalar p, Scalar eta)
            : azimuth(az), elevation(el), range(r), tx_power(p), path_loss(eta)
        {
            constexpr Scalar half_pi = Scalar(M_PI / 2.0);
            if (!(range > Scalar(0)))
                throw std::invalid_argument("UeTruth: range must be positive");
            if (!(path_loss > Scalar(0)) || path_loss > Scalar(1))
                throw std::invalid_argument("UeTruth: path loss must lie in (0, 1]");
            if (!(tx_power > Scalar(0)))
                throw std::invalid_argument("UeTruth: transmit power must be positive");
            if (!(azimuth > -half_pi && azimuth < half_pi) ||
                !(elevation > -half_pi && elevation < half_pi))
                throw std::invalid_argument("UeTruth: angles must lie in (-pi/2, pi/2)");
        }

        // Effective received signal power factor.
        Scalar signal_power() const { return tx_power * path_loss; }
    };

    using UeTruth = UeTruthT<double>;

    // Per-user phase progression rates over the surface. `horizontal` and
    // `vertical` are the linear rates per element step; `curvature` scales the
    // quadratic wavefront term and carries the range information.
    template <typename Scalar>
    struct SpatialFrequenciesT
    {
        Scalar horizontal = Scalar(0); // (2*pi/lambda) * d_h * sin(az) * cos(el)
        Scalar vertical = Scalar(0);   // (2*pi/lambda) * d_v * sin(el)
        Scalar curvature = Scalar(0);  // pi / (lambda * range)
    };

    using SpatialFrequencies = SpatialFrequenciesT<double>;

    template <typename Scalar>
    SpatialFrequenciesT<Scalar> spatial_frequencies(Scalar azimuth, Scalar elevation, Scalar range,
                                                    const RisGeometryT<Scalar> &geom)
    {
        const Scalar two_pi_over_lambda = Scalar(2) * Scalar(M_PI) / geom.wavelength;
        SpatialFrequenciesT<Scalar> f;
        f.horizontal = two_pi_over_lambda * geom.d_h * std::sin(azimuth) * std::cos(elevation);
        f.vertical = two_pi_over_lambda * geom.d_v * std::sin(elevation);
        f.curvature = Scalar(M_PI) / (geom.wavelength * range);
        return f;
    }

    struct ElementIndex
    {
        Index h = 0; // horizontal index, symmetric about the center column
        Index v = 0; // vertical index, symmetric about the center row
    };

    // 1-based element number -> symmetric (h, v) indices. Numbering runs
    // row-major from the bottom-left element.
    template <typename Scalar>
    ElementIndex element_indices(Index n, const RisGeometryT<Scalar> &geom)
    {
        if (n < 1 || n > geom.total())
            throw std::out_of_range("element_indices: element number out of range");
        ElementIndex idx;
        idx.h = (n - 1) % geom.n_h - geom.half_h();
        idx.v = (n - 1) / geom.n_h - geom.half_v();
        return idx;
    }

    // Inverse of element_indices.
    template <typename Scalar>
    Index element_number(Index h, Index v, const RisGeometryT<Scalar> &geom)
    {
        if (h < -geom.half_h() || h > geom.half_h() || v < -geom.half_v() || v > geom.half_v())
            throw std::out_of_range("element_number: indices outside the surface");
        return (v + geom.half_v()) * geom.n_h + (h + geom.half_h()) + 1;
    }

    // Exact user-to-element distance from the Cartesian positions of the user
    // and of element (h, v).
    template <typename Scalar>
    Scalar exact_distance(const UeTruthT<Scalar> &ue, Index h, Index v, const RisGeometryT<Scalar> &geom)
    {
        const Scalar x = ue.range * std::cos(ue.azimuth) * std::cos(ue.elevation);
        const Scalar y = ue.range * std::sin(ue.azimuth) * std::cos(ue.elevation) - Scalar(h) * geom.d_h;
        const Scalar z = ue.range * std::sin(ue.elevation) - Scalar(v) * geom.d_v;
        return std::sqrt(x * x + y * y + z * z);
    }

    // Second-order (Fresnel) expansion of the exact distance around the
    // surface center.
    template <typename Scalar>
    Scalar fresnel_distance(const UeTruthT<Scalar> &ue, Index h, Index v, const RisGeometryT<Scalar> &geom)
    {
        const Scalar hh = Scalar(h) * geom.d_h;
        const Scalar vv = Scalar(v) * geom.d_v;
        return ue.range
               - hh * std::sin(ue.azimuth) * std::cos(ue.elevation)
               - vv * std::sin(ue.elevation)
               + (hh * hh + vv * vv) / (Scalar(2) * ue.range);
    }

    enum class ResponseModel
    {
        exact,
        fresnel
    };

    // Near-field array response: entry n carries the phase advance of element
    // n relative to the center reference element, exp(j*2*pi/lambda*(r - r_n)).
    // All entries have unit modulus; the center entry is exactly 1.
    template <typename Scalar>
    VecX<Scalar> array_response(const UeTruthT<Scalar> &ue, const RisGeometryT<Scalar> &geom,
                                ResponseModel model = ResponseModel::exact)
    {
        const Index n_total = geom.total();
        const Scalar two_pi_over_lambda = Scalar(2) * Scalar(M_PI) / geom.wavelength;
        VecX<Scalar> a(n_total);
        for (Index n = 1; n <= n_total; ++n)
        {
            const ElementIndex idx = element_indices(n, geom);
            const Scalar dist = (model == ResponseModel::exact)
                                    ? exact_distance(ue, idx.h, idx.v, geom)
                                    : fresnel_distance(ue, idx.h, idx.v, geom);
            const Scalar phase = two_pi_over_lambda * (ue.range - dist);
            a(n - 1) = std::complex<Scalar>(std::cos(phase), std::sin(phase));
        }
        return a;
    }

    // Column k is the array response of user k.
    template <typename Scalar>
    MatX<Scalar> array_response_matrix(const std::vector<UeTruthT<Scalar>> &ues,
                                       const RisGeometryT<Scalar> &geom,
                                       ResponseModel model = ResponseModel::exact)
    {
        if (ues.empty())
            throw std::invalid_argument("array_response_matrix: need at least one user");
        MatX<Scalar> a(geom.total(), static_cast<Index>(ues.size()));
        for (Index k = 0; k < a.cols(); ++k)
            a.col(k) = array_response(ues[static_cast<std::size_t>(k)], geom, model);
        return a;
    }

    // Steering vector of a d_h x d_v sub-surface over the doubled angular
    // frequencies of the anti-diagonal signal. Entry (p, q), horizontal offset
    // fastest, equals exp(j*2*(p*horizontal + q*vertical)); the first entry is 1.
    template <typename Scalar>
    VecX<Scalar> angle_steering(Scalar horizontal, Scalar vertical, Index d_h_count, Index d_v_count)
    {
        if (d_h_count < 1 || d_v_count < 1)
            throw std::invalid_argument("angle_steering: sub-surface dimensions must be >= 1");
        using C = std::complex<Scalar>;
        // Incremental products instead of per-entry exp; one trig call per axis.
        const C step_h(std::cos(Scalar(2) * horizontal), std::sin(Scalar(2) * horizontal));
        const C step_v(std::cos(Scalar(2) * vertical), std::sin(Scalar(2) * vertical));
        VecX<Scalar> b(d_h_count * d_v_count);
        C row_phase(1, 0);
        Index out = 0;
        for (Index q = 0; q < d_v_count; ++q)
        {
            C phase = row_phase;
            for (Index p = 0; p < d_h_count; ++p)
            {
                b(out++) = phase;
                phase *= step_h;
            }
            row_phase *= step_v;
        }
        return b;
    }

} // namespace risloc

#endif // RISLOC_GEOMETRY_HPP
