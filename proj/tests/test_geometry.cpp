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

#include "risloc/geometry.hpp"
#include "risloc/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace risloc;

namespace
{
    RisGeometry square_geom(Index side, double spacing = 0.15, double wavelength = 0.3)
    {
        return RisGeometry(side, side, spacing, spacing, wavelength);
    }

    UeTruth sample_ue(Rng &rng, double r_min = 2.0, double r_max = 20.0)
    {
        return UeTruth(rng.uniform(-1.4, 1.4), rng.uniform(-1.4, 1.4), rng.uniform(r_min, r_max),
                       1e-2, 1e-5);
    }
} // namespace

TEST_CASE("element indexing matches the row-major bottom-left numbering")
{
    const RisGeometry geom = square_geom(5);
    ElementIndex idx = element_indices(1, geom);
    CHECK(idx.h == -2);
    CHECK(idx.v == -2);
    idx = element_indices(13, geom);
    CHECK(idx.h == 0);
    CHECK(idx.v == 0);
    idx = element_indices(25, geom);
    CHECK(idx.h == 2);
    CHECK(idx.v == 2);

    CHECK_THROWS_AS(element_indices(0, geom), std::out_of_range);
    CHECK_THROWS_AS(element_indices(26, geom), std::out_of_range);
}

TEST_CASE("element indexing is a bijection onto the full index grid")
{
    for (auto [nh, nv] : {std::pair<Index, Index>{3, 3}, {5, 7}, {7, 5}})
    {
        const RisGeometry geom(nh, nv, 0.1, 0.2, 0.3);
        std::set<std::pair<Index, Index>> seen;
        for (Index n = 1; n <= geom.total(); ++n)
        {
            const ElementIndex idx = element_indices(n, geom);
            CHECK(idx.h >= -geom.half_h());
            CHECK(idx.h <= geom.half_h());
            CHECK(idx.v >= -geom.half_v());
            CHECK(idx.v <= geom.half_v());
            seen.emplace(idx.h, idx.v);
            CHECK(element_number(idx.h, idx.v, geom) == n);
        }
        CHECK(static_cast<Index>(seen.size()) == geom.total());
    }
}

TEST_CASE("geometry and user validation reject bad parameters")
{
    CHECK_THROWS_AS(RisGeometry(4, 5, 0.1, 0.1, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(RisGeometry(5, 5, 0.0, 0.1, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(UeTruth(0.1, 0.1, 0.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(UeTruth(0.1, 0.1, 1.0, 1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(UeTruth(1.8, 0.1, 1.0, 1.0, 0.5), std::invalid_argument);
    const UeTruth ok(0.2, -0.3, 5.0, 2.0, 0.25);
    CHECK(ok.signal_power() == doctest::Approx(0.5));
}

TEST_CASE("exact distance: reference element and Cartesian oracle")
{
    const RisGeometry geom = square_geom(5);
    Rng rng(101);
    for (int i = 0; i < 20; ++i)
    {
        const UeTruth ue = sample_ue(rng);
        CHECK(exact_distance(ue, 0, 0, geom) == doctest::Approx(ue.range).epsilon(1e-12));
    }

    // Independent oracle: user and element in Cartesian coordinates.
    const UeTruth ue(0.0, 0.0, 10.0, 1e-2, 1e-5);
    const double ux = 10.0, uy = 0.0, uz = 0.0;
    const double ey = 2 * 0.15, ez = 0.0;
    const double oracle = std::sqrt(ux * ux + (uy - ey) * (uy - ey) + (uz - ez) * (uz - ez));
    CHECK(oracle == doctest::Approx(std::sqrt(100.09)).epsilon(1e-15));
    CHECK(exact_distance(ue, 2, 0, geom) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(exact_distance(ue, 2, 0, geom) == doctest::Approx(10.0045).epsilon(1e-4));
}

TEST_CASE("exact distance: sign symmetry")
{
    const RisGeometry geom = square_geom(7);
    Rng rng(102);
    for (int i = 0; i < 50; ++i)
    {
        const UeTruth ue = sample_ue(rng);
        const UeTruth mirrored(-ue.azimuth, -ue.elevation, ue.range, ue.tx_power, ue.path_loss);
        const Index h = static_cast<Index>(rng.raw() % 7) - 3;
        const Index v = static_cast<Index>(rng.raw() % 7) - 3;
        CHECK(exact_distance(ue, h, v, geom) ==
              doctest::Approx(exact_distance(mirrored, -h, -v, geom)).epsilon(1e-12));
    }
}

TEST_CASE("fresnel distance: correction terms and broadside value")
{
    const RisGeometry geom = square_geom(5);
    Rng rng(103);
    for (int i = 0; i < 20; ++i)
    {
        const UeTruth ue = sample_ue(rng);
        CHECK(fresnel_distance(ue, 0, 0, geom) == doctest::Approx(ue.range).epsilon(1e-15));
    }
    const UeTruth ue(0.0, 0.0, 10.0, 1e-2, 1e-5);
    CHECK(fresnel_distance(ue, 2, 0, geom) == doctest::Approx(10.0 + 0.09 / 20.0).epsilon(1e-15));
    // Broadside residual is the quartic term t^4/(8 r^3) = 0.09^2/8000.
    const double residual = std::abs(fresnel_distance(ue, 2, 0, geom) - exact_distance(ue, 2, 0, geom));
    CHECK(residual == doctest::Approx(0.09 * 0.09 / 8000.0).epsilon(1e-3));
    CHECK(residual < 1.1e-6);
}

TEST_CASE("fresnel distance: error vanishes in the far field")
{
    // The dominant residual is the dropped projection term s^2/(2r), so the
    // error decays like 1/r.
    const RisGeometry geom = square_geom(5);
    double previous = 1e9;
    for (double r : {10.0, 100.0, 1000.0})
    {
        const UeTruth ue(0.5, -0.4, r, 1e-2, 1e-6);
        const double err = std::abs(fresnel_distance(ue, 2, -2, geom) - exact_distance(ue, 2, -2, geom));
        CHECK(err < previous);
        previous = err;
    }
    CHECK(previous < 1e-4);
}

TEST_CASE("fresnel distance: relative error below 1e-3 outside ten apertures")
{
    Rng rng(104);
    for (int i = 0; i < 200; ++i)
    {
        const Index side = 3 + 2 * static_cast<Index>(rng.raw() % 3); // 3, 5, 7
        const RisGeometry geom = square_geom(side);
        const double aperture = std::max(static_cast<double>(geom.n_h) * geom.d_h,
                                         static_cast<double>(geom.n_v) * geom.d_v);
        const double r = rng.uniform(10.0 * aperture, 50.0);
        const UeTruth ue(rng.uniform(-1.4, 1.4), rng.uniform(-1.4, 1.4), r, 1e-2, 1e-6);
        for (Index n = 1; n <= geom.total(); ++n)
        {
            const ElementIndex idx = element_indices(n, geom);
            const double exact = exact_distance(ue, idx.h, idx.v, geom);
            const double fresnel = fresnel_distance(ue, idx.h, idx.v, geom);
            CHECK(std::abs(fresnel - exact) / exact < 1e-3);
        }
    }
}

TEST_CASE("array response: center entry, unit modulus")
{
    Rng rng(105);
    for (ResponseModel model : {ResponseModel::exact, ResponseModel::fresnel})
    {
        const RisGeometry geom = square_geom(5);
        const UeTruth ue = sample_ue(rng);
        const VecC a = array_response(ue, geom, model);
        REQUIRE(a.size() == 25);
        const Index center = element_number(0, 0, geom) - 1;
        CHECK(std::abs(a(center) - Complex(1.0, 0.0)) < 1e-12);
        for (Index n = 0; n < a.size(); ++n)
            CHECK(std::abs(std::abs(a(n)) - 1.0) < 1e-12);
    }
}

TEST_CASE("array response: fresnel model matches the spatial-frequency expansion")
{
    // Independent route: the response-matrix entries written directly as
    // exp(j*(h*alpha + v*beta - (h^2 d_h^2 + v^2 d_v^2)*gamma)).
    const RisGeometry geom(3, 3, 0.12, 0.18, 0.3);
    Rng rng(106);
    for (int i = 0; i < 25; ++i)
    {
        const UeTruth ue = sample_ue(rng);
        const SpatialFrequencies f = spatial_frequencies(ue.azimuth, ue.elevation, ue.range, geom);
        const VecC a = array_response(ue, geom, ResponseModel::fresnel);
        for (Index n = 1; n <= geom.total(); ++n)
        {
            const ElementIndex idx = element_indices(n, geom);
            const double hh = static_cast<double>(idx.h) * geom.d_h;
            const double vv = static_cast<double>(idx.v) * geom.d_v;
            const double phase = static_cast<double>(idx.h) * f.horizontal +
                                 static_cast<double>(idx.v) * f.vertical -
                                 (hh * hh + vv * vv) * f.curvature;
            const Complex expected(std::cos(phase), std::sin(phase));
            CHECK(std::abs(a(n - 1) - expected) < 1e-12);
        }
    }
}

TEST_CASE("spatial frequencies recompute from their definitions")
{
    const RisGeometry geom(5, 7, 0.1, 0.2, 0.25);
    const double az = 0.7, el = -0.35, r = 4.2;
    const SpatialFrequencies f = spatial_frequencies(az, el, r, geom);
    const double k0 = 2.0 * M_PI / geom.wavelength;
    CHECK(f.horizontal == doctest::Approx(k0 * geom.d_h * std::sin(az) * std::cos(el)).epsilon(1e-15));
    CHECK(f.vertical == doctest::Approx(k0 * geom.d_v * std::sin(el)).epsilon(1e-15));
    CHECK(f.curvature == doctest::Approx(M_PI / (geom.wavelength * r)).epsilon(1e-15));
}

TEST_CASE("array response matrix: columns, duplicates, errors")
{
    const RisGeometry geom = square_geom(3);
    Rng rng(107);
    const UeTruth ue = sample_ue(rng);

    const MatC single = array_response_matrix({ue}, geom, ResponseModel::fresnel);
    REQUIRE(single.cols() == 1);
    CHECK((single.col(0) - array_response(ue, geom, ResponseModel::fresnel)).norm() == 0.0);

    const MatC twins = array_response_matrix({ue, ue}, geom);
    CHECK((twins.col(0) - twins.col(1)).norm() == 0.0);

    CHECK_THROWS_AS(array_response_matrix(std::vector<UeTruth>{}, geom), std::invalid_argument);
}

TEST_CASE("array response matrix: 3x3 two-user expansion oracle")
{
    const RisGeometry geom(3, 3, 0.15, 0.15, 0.3);
    const UeTruth u1(0.5, -0.2, 3.0, 1e-2, 1e-4);
    const UeTruth u2(-0.9, 0.6, 7.0, 1e-2, 1e-5);
    const MatC a = array_response_matrix({u1, u2}, geom, ResponseModel::fresnel);
    const std::vector<UeTruth> ues{u1, u2};
    for (Index k = 0; k < 2; ++k)
    {
        const SpatialFrequencies f =
            spatial_frequencies(ues[k].azimuth, ues[k].elevation, ues[k].range, geom);
        for (Index n = 1; n <= 9; ++n)
        {
            const ElementIndex idx = element_indices(n, geom);
            const double hh = static_cast<double>(idx.h) * geom.d_h;
            const double vv = static_cast<double>(idx.v) * geom.d_v;
            const double phase = static_cast<double>(idx.h) * f.horizontal +
                                 static_cast<double>(idx.v) * f.vertical -
                                 (hh * hh + vv * vv) * f.curvature;
            CHECK(std::abs(a(n - 1, k) - Complex(std::cos(phase), std::sin(phase))) < 1e-12);
        }
    }
}

TEST_CASE("angle steering: known values and properties")
{
    const VecC ones = angle_steering(0.0, 0.0, Index(4), Index(3));
    for (Index i = 0; i < ones.size(); ++i)
        CHECK(std::abs(ones(i) - Complex(1.0, 0.0)) == 0.0);

    const VecC two = angle_steering(M_PI / 4.0, 0.3, Index(2), Index(1));
    CHECK(std::abs(two(0) - Complex(1.0, 0.0)) == 0.0);
    CHECK(std::abs(two(1) - Complex(0.0, 1.0)) < 1e-15);

    Rng rng(108);
    for (int i = 0; i < 30; ++i)
    {
        const double alpha = rng.uniform(-3.0, 3.0);
        const double beta = rng.uniform(-3.0, 3.0);
        const VecC b = angle_steering(alpha, beta, Index(4), Index(3));
        CHECK(std::abs(b(0) - Complex(1.0, 0.0)) == 0.0);

        // Direct exponential oracle, horizontal offset fastest.
        for (Index q = 0; q < 3; ++q)
            for (Index p = 0; p < 4; ++p)
            {
                const double phase = 2.0 * (static_cast<double>(p) * alpha + static_cast<double>(q) * beta);
                CHECK(std::abs(b(q * 4 + p) - Complex(std::cos(phase), std::sin(phase))) < 1e-13);
            }

        const VecC mirrored = angle_steering(-alpha, -beta, Index(4), Index(3));
        CHECK((b.conjugate() - mirrored).norm() < 1e-13);
    }
}

TEST_CASE("fraunhofer distance matches the aperture formula")
{
    const RisGeometry geom = square_geom(25);
    const double diag = std::sqrt(2.0) * 24.0 * 0.15;
    CHECK(geom.fraunhofer_distance() == doctest::Approx(2.0 * diag * diag / 0.3).epsilon(1e-12));
}
