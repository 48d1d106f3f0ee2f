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

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <sstream>

namespace risloc
{

    RecoveredIncident ls_recover(const SnapshotBatch &batch)
    {
        const MatC &g = batch.g_tilde;
        if (g.rows() < g.cols())
            throw IllPosedError("ls_recover: stacked channel has fewer rows than columns");
        if (batch.y.rows() != g.rows())
            throw std::invalid_argument("ls_recover: snapshot/channel row mismatch");

        Eigen::CompleteOrthogonalDecomposition<MatC> cod(g);
        cod.setThreshold(kRankTolerance);
        if (cod.rank() < g.cols())
        {
            // Exact singular values only on the failure path; COD pivots are a
            // cheaper estimate but the error message should name the ratio.
            Eigen::BDCSVD<MatC> svd(g);
            const double largest = svd.singularValues()(0);
            const double smallest = svd.singularValues()(svd.singularValues().size() - 1);
            std::ostringstream msg;
            msg << "ls_recover: stacked channel is rank deficient (sigma_min/sigma_max = "
                << (largest > 0.0 ? smallest / largest : 0.0) << ", below " << kRankTolerance
                << "); increase the number of sub-slots";
            throw IllPosedError(msg.str());
        }

        RecoveredIncident rec;
        rec.x = cod.solve(batch.y);
        return rec;
    }

    MatC sample_covariance(const RecoveredIncident &incident)
    {
        const Index t = incident.x.cols();
        if (t < 1)
            throw std::invalid_argument("sample_covariance: need at least one snapshot");
        const Index n = incident.x.rows();
        MatC lower = MatC::Zero(n, n);
        lower.selfadjointView<Eigen::Lower>().rankUpdate(incident.x, 1.0 / static_cast<double>(t));
        MatC r = lower.selfadjointView<Eigen::Lower>();
        return 0.5 * (r + MatC(r.adjoint()));
    }

    SubspaceSplit eig_split(const MatC &r, Index k)
    {
        const Index d = r.rows();
        if (r.cols() != d)
            throw std::invalid_argument("eig_split: matrix must be square");
        if (k < 1 || k >= d)
            throw std::invalid_argument("eig_split: need 1 <= K < D");

        Eigen::SelfAdjointEigenSolver<MatC> solver(r);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("eig_split: eigendecomposition failed");

        // Eigen returns ascending order; flip to descending.
        SubspaceSplit split;
        split.eigenvalues = solver.eigenvalues().reverse();
        split.signal_basis = solver.eigenvectors().rightCols(k).rowwise().reverse();
        split.noise_basis = solver.eigenvectors().leftCols(d - k).rowwise().reverse();
        return split;
    }

} // namespace risloc
