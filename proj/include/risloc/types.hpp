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

#ifndef RISLOC_TYPES_HPP
#define RISLOC_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace risloc
{
    using Index = Eigen::Index;

    template <typename Scalar>
    using MatX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
    template <typename Scalar>
    using VecX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

    // Concrete double-precision aliases used by the pipeline modules.
    using Complex = std::complex<double>;
    using MatC = Eigen::MatrixXcd;
    using VecC = Eigen::VectorXcd;
    using MatR = Eigen::MatrixXd;
    using VecR = Eigen::VectorXd;
    using ArrR = Eigen::ArrayXd;

} // namespace risloc

#endif // RISLOC_TYPES_HPP
