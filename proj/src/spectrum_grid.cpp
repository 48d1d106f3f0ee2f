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

#include "risloc/spectrum_grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace risloc
{

    void SpectrumGrid::validate() const
    {
        if (axes.empty())
            throw std::invalid_argument("SpectrumGrid: no axes");
        Index expected = 1;
        for (const Axis &axis : axes)
        {
            if (axis.values.size() < 1)
                throw std::invalid_argument("SpectrumGrid: empty axis '" + axis.name + "'");
            for (Index i = 1; i < axis.values.size(); ++i)
                if (!(axis.values(i) > axis.values(i - 1)))
                    throw std::invalid_argument("SpectrumGrid: axis '" + axis.name +
                                                "' is not strictly increasing");
            expected *= axis.values.size();
        }
        if (values.size() != expected)
            throw std::invalid_argument("SpectrumGrid: value count does not match axis extents");
        for (Index i = 0; i < values.size(); ++i)
            if (!std::isfinite(values(i)) || values(i) < 0.0)
                throw std::invalid_argument("SpectrumGrid: values must be finite and non-negative");
    }

    namespace
    {
        void format_value(std::ostream &out, double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << buf;
        }
    } // namespace

    void write_csv(const SpectrumGrid &grid, std::ostream &out)
    {
        grid.validate();
        for (const Axis &axis : grid.axes)
            out << axis.name << '_' << axis.unit << ',';
        out << "spectrum\n";

        // Iterate in storage order: last axis fastest.
        std::vector<Index> idx(static_cast<std::size_t>(grid.dim()), 0);
        for (Index flat = 0; flat < grid.values.size(); ++flat)
        {
            Index rem = flat;
            for (Index d = grid.dim() - 1; d >= 0; --d)
            {
                idx[static_cast<std::size_t>(d)] = rem % grid.extent(d);
                rem /= grid.extent(d);
            }
            for (Index d = 0; d < grid.dim(); ++d)
            {
                format_value(out, grid.axes[static_cast<std::size_t>(d)].values(idx[static_cast<std::size_t>(d)]));
                out << ',';
            }
            format_value(out, grid.values(flat));
            out << '\n';
        }
    }

    void write_csv(const SpectrumGrid &grid, const std::string &path)
    {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("write_csv: cannot open '" + path + "' for writing");
        write_csv(grid, out);
        out.flush();
        if (!out)
            throw std::runtime_error("write_csv: write failed for '" + path + "'");
    }

} // namespace risloc
