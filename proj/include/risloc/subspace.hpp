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
// Least-squares recovery of the signal incident on the surface, sample
// covariance formation, and signal/noise subspace separation.

#ifndef RISLOC_SUBSPACE_HPP
#define RISLOC_SUBSPACE_HPP

#include "risloc/simulator.hpp"
#include "risloc/types.hpp"

#include <stdexcept>
#include <string>

namespace risloc
{
    // Singular values below this fraction of the largest are treated as zero.
    inline constexpr double kRankTolerance = 1e-10;

    class IllPosedError : public std::runtime_error
    {
    public:
        explicit IllPosedError(const std::string &what) : std::runtime_error(what) {}
    };

    // Columns are per-snapshot estimates of the surface-incident signal A*s(t).
    struct RecoveredIncident
    {
        MatC x; // [N x T]
    };

    // Solves the stacked system in the least-squares sense through a
    // rank-revealing orthogonal factorization; never forms (G^H G)^-1.
    // Throws IllPosedError when the stacked channel is rank deficient.
    RecoveredIncident ls_recover(const SnapshotBatch &batch);

    // (1/T) * sum_t x(t) x(t)^H, symmetrized so the result is exactly Hermitian.
    MatC sample_covariance(const RecoveredIncident &incident);

    struct SubspaceSplit
    {
        MatC signal_basis;  // [D x K], orthonormal columns, largest eigenvalues
        MatC noise_basis;   // [D x (D-K)], orthonormal columns
        VecR eigenvalues;   // [D], descending
    };

    // Hermitian eigendecomposition partitioned into the K-dimensional signal
    // subspace and its orthogonal complement.
    SubspaceSplit eig_split(const MatC &r, Index k);

} // namespace risloc

#endif // RISLOC_SUBSPACE_HPP
