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

#include "risloc/subspace.hpp"

#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

using namespace risloc;

namespace
{
    Scenario noiseless_scenario(Index users, Index t_samples)
    {
        Scenario scn;
        scn.geom = RisGeometry(5, 5, 0.15, 0.15, 0.3);
        for (Index k = 0; k < users; ++k)
            scn.ues.emplace_back(0.4 - 0.6 * static_cast<double>(k), -0.3 + 0.5 * static_cast<double>(k),
                                 3.0 + 2.0 * static_cast<double>(k), 1e-2, 1e-4);
        scn.m_bs = 4;
        scn.l_subslots = 7;
        scn.t_samples = t_samples;
        scn.noise_power = 0.0;
        scn.rician_factor = 2.0;
        scn.smoothing = SmoothingSize{4, 4};
        scn.grids.azimuth = angle_grid(M_PI / 90.0);
        scn.grids.elevation = angle_grid(M_PI / 90.0);
        scn.grids.distance = GridSpec{0.5, 12.0, 50};
        scn.rng_seed = 7;
        return scn;
    }

    MatC random_complex(Index rows, Index cols, Rng &rng)
    {
        MatC m(rows, cols);
        for (Index j = 0; j < cols; ++j)
            for (Index i = 0; i < rows; ++i)
                m(i, j) = rng.cnormal();
        return m;
    }
} // namespace

TEST_CASE("ls recovery is exact on noiseless batches")
{
    for (Index users : {Index(1), Index(2)})
    {
        Scenario scn = noiseless_scenario(users, 48);
        Rng rng(scn.rng_seed);
        const SnapshotBatch batch = generate_snapshots(scn, rng);
        const RecoveredIncident rec = ls_recover(batch);
        const MatC expected = array_response_matrix(scn.ues, scn.geom, scn.model) * batch.s_true;
        CHECK((rec.x - expected).norm() / expected.norm() < 1e-9);
    }
}

TEST_CASE("ls recovery maps channel columns to unit vectors")
{
    Scenario scn = noiseless_scenario(1, 4);
    Rng rng(scn.rng_seed);
    SnapshotBatch batch = generate_snapshots(scn, rng);
    const Index n = scn.geom.total();
    batch.y = batch.g_tilde * MatC::Identity(n, n).leftCols(5);
    const RecoveredIncident rec = ls_recover(batch);
    CHECK((rec.x - MatC::Identity(n, n).leftCols(5)).norm() < 1e-9);
}

TEST_CASE("ls recovery matches a dense normal-equations oracle")
{
    Rng rng(2024);
    SnapshotBatch batch;
    batch.g_tilde = random_complex(8, 4, rng);
    batch.y = random_complex(8, 3, rng);
    const RecoveredIncident rec = ls_recover(batch);

    const MatC gram = batch.g_tilde.adjoint() * batch.g_tilde;
    const MatC oracle = gram.ldlt().solve(batch.g_tilde.adjoint() * batch.y);
    CHECK((rec.x - oracle).norm() / oracle.norm() < 1e-8);
}

TEST_CASE("ls recovery rejects rank-deficient stacked channels")
{
    Rng rng(2025);
    SnapshotBatch batch;
    batch.g_tilde = random_complex(6, 4, rng);
    batch.g_tilde.col(3) = batch.g_tilde.col(0); // exact deficiency
    batch.y = random_complex(6, 2, rng);
    CHECK_THROWS_AS(ls_recover(batch), IllPosedError);

    batch.g_tilde = random_complex(3, 4, rng); // wide
    CHECK_THROWS_AS(ls_recover(batch), IllPosedError);
}

TEST_CASE("sample covariance: single snapshot, trace identity, exact hermitian")
{
    RecoveredIncident rec;
    rec.x = MatC::Zero(4, 1);
    rec.x(0, 0) = Complex(1.0, 0.0);
    const MatC r = sample_covariance(rec);
    CHECK(std::abs(r(0, 0) - Complex(1.0, 0.0)) == 0.0);
    CHECK(r.norm() == doctest::Approx(1.0).epsilon(1e-15));

    Rng rng(31);
    rec.x = random_complex(6, 40, rng);
    const MatC cov = sample_covariance(rec);
    CHECK((cov - cov.adjoint()).norm() == 0.0);
    CHECK(cov.trace().real() ==
          doctest::Approx(rec.x.squaredNorm() / 40.0).epsilon(1e-12));
    CHECK(std::abs(cov.trace().imag()) < 1e-15);

    Eigen::SelfAdjointEigenSolver<MatC> es(cov);
    CHECK(es.eigenvalues().minCoeff() > -1e-9 * cov.trace().real());
}

TEST_CASE("sample covariance of a single noiseless user is numerically rank one")
{
    Scenario scn = noiseless_scenario(1, 300);
    Rng rng(scn.rng_seed);
    const SnapshotBatch batch = generate_snapshots(scn, rng);
    const MatC r = sample_covariance(ls_recover(batch));
    Eigen::SelfAdjointEigenSolver<MatC> es(r);
    const VecR ev = es.eigenvalues().reverse();
    CHECK(ev(1) / ev(0) < 1e-6);

    // Analytic limit from the covariance model with zero noise: q * a a^H.
    const VecC a = array_response(scn.ues[0], scn.geom, scn.model);
    const MatC ideal = scn.ues[0].signal_power() * (a * a.adjoint());
    // Finite-T symbol power fluctuates ~1/sqrt(T); direction is exact.
    const VecC top = es.eigenvectors().col(es.eigenvectors().cols() - 1);
    const double alignment = std::abs(top.dot(a)) / (top.norm() * a.norm());
    CHECK(alignment > 1.0 - 1e-10);
    CHECK(r.norm() / ideal.norm() == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("eig split: degenerate spectrum reconstructs exactly")
{
    const MatC eye = MatC::Identity(5, 5);
    const SubspaceSplit split = eig_split(eye, 1);
    for (Index i = 0; i < 5; ++i)
        CHECK(split.eigenvalues(i) == doctest::Approx(1.0).epsilon(1e-12));
    const MatC rebuilt = split.signal_basis * split.eigenvalues.head(1).asDiagonal() *
                             split.signal_basis.adjoint() +
                         split.noise_basis * split.eigenvalues.tail(4).asDiagonal() *
                             split.noise_basis.adjoint();
    CHECK((rebuilt - eye).norm() < 1e-12);
}

TEST_CASE("eig split: ordered diagonal case")
{
    MatC r = MatC::Zero(3, 3);
    r(0, 0) = 3.0;
    r(1, 1) = 2.0;
    r(2, 2) = 1.0;
    const SubspaceSplit split = eig_split(r, 2);
    CHECK(split.eigenvalues(0) == doctest::Approx(3.0));
    CHECK(split.eigenvalues(1) == doctest::Approx(2.0));
    CHECK(split.eigenvalues(2) == doctest::Approx(1.0));
    const MatC p_signal = split.signal_basis * split.signal_basis.adjoint();
    MatC expected = MatC::Zero(3, 3);
    expected(0, 0) = 1.0;
    expected(1, 1) = 1.0;
    CHECK((p_signal - expected).norm() < 1e-12);
}

TEST_CASE("eig split: rank-one plus identity aligns with the steering vector")
{
    Rng rng(41);
    VecC a(9);
    for (Index i = 0; i < 9; ++i)
    {
        const double phase = rng.uniform(0.0, 2.0 * M_PI);
        a(i) = Complex(std::cos(phase), std::sin(phase));
    }
    const MatC r = a * a.adjoint() + 0.01 * MatC::Identity(9, 9);
    const SubspaceSplit split = eig_split(r, 1);
    const double alignment = std::abs(split.signal_basis.col(0).dot(a)) / a.norm();
    CHECK(alignment > 1.0 - 1e-8);
    CHECK(split.eigenvalues(0) == doctest::Approx(9.01).epsilon(1e-10));
}

TEST_CASE("eig split: orthonormal bases, complementary projectors, reconstruction")
{
    Rng rng(42);
    const MatC m = random_complex(16, 16, rng);
    const MatC r = 0.5 * (m + MatC(m.adjoint()));
    const SubspaceSplit split = eig_split(r, 5);

    CHECK((split.signal_basis.adjoint() * split.signal_basis - MatC::Identity(5, 5)).norm() < 1e-9);
    CHECK((split.noise_basis.adjoint() * split.noise_basis - MatC::Identity(11, 11)).norm() < 1e-9);
    CHECK((split.signal_basis.adjoint() * split.noise_basis).norm() < 1e-9);

    const MatC projectors = split.signal_basis * split.signal_basis.adjoint() +
                            split.noise_basis * split.noise_basis.adjoint();
    CHECK((projectors - MatC::Identity(16, 16)).norm() < 1e-9);

    const MatC rebuilt = split.signal_basis * split.eigenvalues.head(5).asDiagonal() *
                             split.signal_basis.adjoint() +
                         split.noise_basis * split.eigenvalues.tail(11).asDiagonal() *
                             split.noise_basis.adjoint();
    CHECK((rebuilt - r).norm() / r.norm() < 1e-9);

    for (Index i = 1; i < split.eigenvalues.size(); ++i)
        CHECK(split.eigenvalues(i) <= split.eigenvalues(i - 1) + 1e-12);

    CHECK_THROWS_AS(eig_split(r, 16), std::invalid_argument);
    CHECK_THROWS_AS(eig_split(r, 0), std::invalid_argument);
}

TEST_CASE("with no users the recovered covariance approaches the colored noise term")
{
    Scenario scn = noiseless_scenario(0, 10000);
    scn.noise_power = 1e-6;
    Rng rng(314159);
    const SnapshotBatch batch = generate_snapshots(scn, rng);
    const MatC r = sample_covariance(ls_recover(batch));
    const MatC gram = batch.g_tilde.adjoint() * batch.g_tilde;
    const MatC expected = scn.noise_power * gram.inverse();
    CHECK((r - expected).norm() / expected.norm() < 0.15);
}
