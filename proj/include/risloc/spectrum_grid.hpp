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

#ifndef RISLOC_SPECTRUM_GRID_HPP
#define RISLOC_SPECTRUM_GRID_HPP

#include "risloc/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace risloc
{
    enum class SpectrumKind
    {
        angle2d,    // azimuth x elevation
        distance1d, // distance
        music3d,    // azimuth x elevation x distance
        music2d     // azimuth x distance, fixed elevation
    };

    struct Axis
    {
        std::string name;
        std::string unit;
        VecR values; // strictly increasing
    };

    // Sampled pseudo-spectrum over a 1D/2D/3D grid. Values are stored
    // flattened in C order: the last axis varies fastest.
    struct SpectrumGrid
    {
        std::vector<Axis> axes;
        ArrR values;
        SpectrumKind kind = SpectrumKind::angle2d;

        Index dim() const { return static_cast<Index>(axes.size()); }
        Index extent(Index axis) const { return axes[static_cast<std::size_t>(axis)].values.size(); }

        Index flat_index(Index i) const { return i; }
        Index flat_index(Index i, Index j) const { return i * extent(1) + j; }
        Index flat_index(Index i, Index j, Index l) const { return (i * extent(1) + j) * extent(2) + l; }

        // Checks shape consistency, finite non-negative values and strictly
        // increasing axes.
        void validate() const;
    };

    // One row per grid point: axis values then the spectrum value, all with
    // 17 significant digits.
    void write_csv(const SpectrumGrid &grid, std::ostream &out);
    void write_csv(const SpectrumGrid &grid, const std::string &path);

} // namespace risloc

#endif // RISLOC_SPECTRUM_GRID_HPP
