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

#include "risloc/estimators.hpp"

#include "risloc/detail/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace risloc
{

    namespace
    {
        constexpr double kHalfPi = M_PI / 2.0;

        // Spectrum denominators can cancel to zero (or a tiny negative) when a
        // steering vector lies numerically inside the signal subspace; clamp
        // relative to the steering norm so the spectrum stays finite and
        // positive.
        double clamp_denominator(double denom, double steering_norm2)
        {
            const double floor = steering_norm2 * 1e-17 + std::numeric_limits<double>::min();
            return denom > floor ? denom : floor;
        }

        // Sub-surface steering vector over doubled angular frequencies, same
        // layout as angle_steering, written into a preallocated buffer.
        void steering_into(VecC &buf, double horizontal, double vertical, Index d_h, Index d_v)
        {
            const Complex step_h(std::cos(2.0 * horizontal), std::sin(2.0 * horizontal));
            const Complex step_v(std::cos(2.0 * vertical), std::sin(2.0 * vertical));
            Complex row_phase(1.0, 0.0);
            Index out = 0;
            for (Index q = 0; q < d_v; ++q)
            {
                Complex phase = row_phase;
                for (Index p = 0; p < d_h; ++p)
                {
                    buf(out++) = phase;
                    phase *= step_h;
                }
                row_phase *= step_v;
            }
        }

        // Fresnel-model array response, factorized along the two axes:
        // phase(h, v) = h*alpha + v*beta - (h^2 d_h^2 + v^2 d_v^2)*gamma.
        void fresnel_response_into(VecC &buf, VecC &axis_h, VecC &axis_v, double azimuth,
                                   double elevation, double range, const RisGeometry &geom)
        {
            const double k0 = 2.0 * M_PI / geom.wavelength;
            const double alpha = k0 * geom.d_h * std::sin(azimuth) * std::cos(elevation);
            const double beta = k0 * geom.d_v * std::sin(elevation);
            const double gamma = M_PI / (geom.wavelength * range);
            const Index hh = geom.half_h();
            const Index hv = geom.half_v();
            for (Index h = -hh; h <= hh; ++h)
            {
                const double off = static_cast<double>(h) * geom.d_h;
                const double phase = static_cast<double>(h) * alpha - off * off * gamma;
                axis_h(h + hh) = Complex(std::cos(phase), std::sin(phase));
            }
            for (Index v = -hv; v <= hv; ++v)
            {
                const double off = static_cast<double>(v) * geom.d_v;
                const double phase = static_cast<double>(v) * beta - off * off * gamma;
                axis_v(v + hv) = Complex(std::cos(phase), std::sin(phase));
            }
            Index out = 0;
            for (Index v = 0; v < geom.n_v; ++v)
                for (Index h = 0; h < geom.n_h; ++h)
                    buf(out++) = axis_v(v) * axis_h(h);
        }

        // 1 / (x^H Un Un^H x) evaluated through the signal-subspace
        // complement, which costs K inner products instead of D-K.
        double music_value(const MatC &signal_basis, const VecC &x, VecC &proj)
        {
            proj.noalias() = signal_basis.adjoint() * x;
            const double norm2 = x.squaredNorm();
            const double denom = clamp_denominator(norm2 - proj.squaredNorm(), norm2);
            return 1.0 / denom;
        }

        void check_angle_grid(const GridSpec &grid, const char *name)
        {
            if (grid.count < 1)
                throw std::invalid_argument(std::string("angle grid '") + name + "' is empty");
            if (!(grid.start > -kHalfPi) || !(grid.stop < kHalfPi))
                throw std::invalid_argument(std::string("angle grid '") + name +
                                            "' must lie inside (-pi/2, pi/2)");
        }

        // Quadratic vertex offset from three samples around a maximum, in
        // units of the grid step, clamped to half a cell.
        double quadratic_offset(double left, double center, double right)
        {
            const double denom = left - 2.0 * center + right;
            if (!(denom < 0.0))
                return 0.0;
            const double delta = 0.5 * (left - right) / denom;
            return std::clamp(delta, -0.5, 0.5);
        }

        struct Candidate
        {
            Index flat = 0;
            double value = 0.0;
            bool strict = false;
        };

        // Shared peak extraction: gathers strict local maxima under the given
        // neighborhood test, pads with the best remaining grid points when
        // there are fewer than k.
        template <typename IsLocalMax>
        PeakSet collect_peaks(const SpectrumGrid &spec, Index k, IsLocalMax &&is_local_max)
        {
            const Index total = spec.values.size();
            if (k < 1)
                throw std::invalid_argument("find_peaks: need k >= 1");
            if (k > total)
                throw std::invalid_argument("find_peaks: k exceeds the number of grid points");

            std::vector<Candidate> maxima;
            for (Index flat = 0; flat < total; ++flat)
                if (is_local_max(flat))
                    maxima.push_back(Candidate{flat, spec.values(flat), true});
            std::stable_sort(maxima.begin(), maxima.end(), [](const Candidate &a, const Candidate &b) {
                return a.value > b.value;
            });

            PeakSet result;
            result.degenerate = static_cast<Index>(maxima.size()) < k;
            if (result.degenerate)
            {
                // Pad with the globally largest remaining grid points.
                std::vector<Index> order(static_cast<std::size_t>(total));
                std::iota(order.begin(), order.end(), Index(0));
                std::stable_sort(order.begin(), order.end(), [&spec](Index a, Index b) {
                    return spec.values(a) > spec.values(b);
                });
                for (Index flat : order)
                {
                    if (static_cast<Index>(maxima.size()) >= k)
                        break;
                    const bool taken = std::any_of(maxima.begin(), maxima.end(), [flat](const Candidate &c) {
                        return c.flat == flat;
                    });
                    if (!taken)
                        maxima.push_back(Candidate{flat, spec.values(flat), false});
                }
            }
            maxima.resize(static_cast<std::size_t>(k));

            result.strict_count = 0;
            for (const Candidate &c : maxima)
            {
                GridPeak peak;
                peak.value = c.value;
                Index rem = c.flat;
                peak.indices.resize(static_cast<std::size_t>(spec.dim()));
                for (Index d = spec.dim() - 1; d >= 0; --d)
                {
                    peak.indices[static_cast<std::size_t>(d)] = rem % spec.extent(d);
                    rem /= spec.extent(d);
                }
                peak.coordinates.resize(static_cast<std::size_t>(spec.dim()));
                for (Index d = 0; d < spec.dim(); ++d)
                    peak.coordinates[static_cast<std::size_t>(d)] =
                        spec.axes[static_cast<std::size_t>(d)].values(peak.indices[static_cast<std::size_t>(d)]);
                if (c.strict)
                    ++result.strict_count;
                result.peaks.push_back(std::move(peak));
            }
            return result;
        }

        // Per-axis quadratic refinement of a strict interior maximum.
        void refine_peak(const SpectrumGrid &spec, GridPeak &peak)
        {
            for (Index d = 0; d < spec.dim(); ++d)
            {
                const Index i = peak.indices[static_cast<std::size_t>(d)];
                if (i == 0 || i + 1 >= spec.extent(d))
                    continue;
                // Neighbor along axis d with the other indices fixed.
                Index stride = 1;
                for (Index dd = spec.dim() - 1; dd > d; --dd)
                    stride *= spec.extent(dd);
                Index flat = 0;
                Index acc = 1;
                for (Index dd = spec.dim() - 1; dd >= 0; --dd)
                {
                    flat += peak.indices[static_cast<std::size_t>(dd)] * acc;
                    acc *= spec.extent(dd);
                }
                const double center = spec.values(flat);
                const double left = spec.values(flat - stride);
                const double right = spec.values(flat + stride);
                const double step = spec.axes[static_cast<std::size_t>(d)].values(1) -
                                    spec.axes[static_cast<std::size_t>(d)].values(0);
                peak.coordinates[static_cast<std::size_t>(d)] += quadratic_offset(left, center, right) * step;
            }
        }
    } // namespace

    SmoothingPlan make_smoothing_plan(const RisGeometry &geom, Index d_h, Index d_v)
    {
        if (d_h < 1 || d_h > geom.n_h || d_v < 1 || d_v > geom.n_v)
            throw std::invalid_argument("make_smoothing_plan: window must fit inside the surface");
        SmoothingPlan plan;
        plan.d_h = d_h;
        plan.d_v = d_v;
        const Index oh_max = geom.half_h() - d_h + 1;
        const Index ov_max = geom.half_v() - d_v + 1;
        plan.origins.reserve(static_cast<std::size_t>((geom.n_h - d_h + 1) * (geom.n_v - d_v + 1)));
        for (Index ov = -geom.half_v(); ov <= ov_max; ++ov)
            for (Index oh = -geom.half_h(); oh <= oh_max; ++oh)
                plan.origins.push_back(ElementIndex{oh, ov});
        return plan;
    }

    VecC antidiagonal_vector(const MatC &r_hat)
    {
        const Index n = r_hat.rows();
        if (r_hat.cols() != n)
            throw std::invalid_argument("antidiagonal_vector: matrix must be square");
        VecC y(n);
        for (Index i = 0; i < n; ++i)
            y(i) = r_hat(i, n - 1 - i);
        return y;
    }

    std::vector<VecC> smooth_subvectors(const VecC &y_bar, const SmoothingPlan &plan,
                                        const RisGeometry &geom)
    {
        if (y_bar.size() != geom.total())
            throw std::invalid_argument("smooth_subvectors: vector length does not match the surface");
        std::vector<VecC> subvectors;
        subvectors.reserve(plan.origins.size());
        for (const ElementIndex &origin : plan.origins)
        {
            if (origin.h < -geom.half_h() || origin.h + plan.d_h - 1 > geom.half_h() ||
                origin.v < -geom.half_v() || origin.v + plan.d_v - 1 > geom.half_v())
                throw std::out_of_range("smooth_subvectors: window outside the surface");
            VecC sub(plan.window());
            Index out = 0;
            for (Index q = 0; q < plan.d_v; ++q)
                for (Index p = 0; p < plan.d_h; ++p)
                    sub(out++) = y_bar(element_number(origin.h + p, origin.v + q, geom) - 1);
            subvectors.push_back(std::move(sub));
        }
        return subvectors;
    }

    MatC smoothed_covariance(const std::vector<VecC> &subvectors)
    {
        if (subvectors.empty())
            throw std::invalid_argument("smoothed_covariance: need at least one sub-vector");
        const Index d = subvectors.front().size();
        MatC lower = MatC::Zero(d, d);
        const double weight = 1.0 / static_cast<double>(subvectors.size());
        for (const VecC &sub : subvectors)
        {
            if (sub.size() != d)
                throw std::invalid_argument("smoothed_covariance: sub-vector size mismatch");
            lower.selfadjointView<Eigen::Lower>().rankUpdate(sub, weight);
        }
        MatC r = lower.selfadjointView<Eigen::Lower>();
        return 0.5 * (r + MatC(r.adjoint()));
    }

    SpectrumGrid angle_spectrum(const SubspaceSplit &split, Index d_h, Index d_v,
                                const GridSpec &azimuth, const GridSpec &elevation,
                                const RisGeometry &geom, const ExecOptions &opts,
                                std::uint64_t *eval_count)
    {
        check_angle_grid(azimuth, "azimuth");
        check_angle_grid(elevation, "elevation");
        if (d_h * d_v != split.signal_basis.rows())
            throw std::invalid_argument("angle_spectrum: window shape does not match the subspace dimension");

        SpectrumGrid grid;
        grid.kind = SpectrumKind::angle2d;
        grid.axes = {Axis{"azimuth", "rad", azimuth.points()},
                     Axis{"elevation", "rad", elevation.points()}};
        grid.values.resize(azimuth.count * elevation.count);

        const VecR &az = grid.axes[0].values;
        const VecR &el = grid.axes[1].values;
        const double k0 = 2.0 * M_PI / geom.wavelength;

        std::atomic<std::uint64_t> evals{0};
        detail::parallel_for_chunks(az.size(), opts.threads, [&](Index begin, Index end) {
            VecC b(d_h * d_v);
            VecC proj(split.signal_basis.cols());
            for (Index i = begin; i < end; ++i)
            {
                const double sin_az = std::sin(az(i));
                for (Index j = 0; j < el.size(); ++j)
                {
                    const double horizontal = k0 * geom.d_h * sin_az * std::cos(el(j));
                    const double vertical = k0 * geom.d_v * std::sin(el(j));
                    steering_into(b, horizontal, vertical, d_h, d_v);
                    grid.values(i * el.size() + j) = music_value(split.signal_basis, b, proj);
                }
            }
            evals.fetch_add(static_cast<std::uint64_t>((end - begin) * el.size()),
                            std::memory_order_relaxed);
        });
        if (eval_count != nullptr)
            *eval_count += evals.load();
        return grid;
    }

    PeakSet find_peaks_2d(const SpectrumGrid &spec, Index k, bool quadratic_refine)
    {
        spec.validate();
        if (spec.dim() != 2)
            throw std::invalid_argument("find_peaks_2d: expected a 2D spectrum");
        if (spec.extent(0) < 3 || spec.extent(1) < 3)
            throw std::invalid_argument("find_peaks_2d: grid must be at least 3x3");
        const Index n0 = spec.extent(0);
        const Index n1 = spec.extent(1);
        PeakSet result = collect_peaks(spec, k, [&](Index flat) {
            const Index i = flat / n1;
            const Index j = flat % n1;
            const double v = spec.values(flat);
            for (Index di = -1; di <= 1; ++di)
                for (Index dj = -1; dj <= 1; ++dj)
                {
                    if (di == 0 && dj == 0)
                        continue;
                    const Index ii = i + di;
                    const Index jj = j + dj;
                    if (ii < 0 || ii >= n0 || jj < 0 || jj >= n1)
                        continue;
                    if (!(v > spec.values(ii * n1 + jj)))
                        return false;
                }
            return true;
        });
        if (quadratic_refine)
            for (Index p = 0; p < result.strict_count; ++p)
                refine_peak(spec, result.peaks[static_cast<std::size_t>(p)]);
        return result;
    }

    PeakSet find_peaks_3d(const SpectrumGrid &spec, Index k, bool quadratic_refine)
    {
        spec.validate();
        if (spec.dim() != 3)
            throw std::invalid_argument("find_peaks_3d: expected a 3D spectrum");
        const Index n0 = spec.extent(0);
        const Index n1 = spec.extent(1);
        const Index n2 = spec.extent(2);
        PeakSet result = collect_peaks(spec, k, [&](Index flat) {
            const Index i = flat / (n1 * n2);
            const Index j = (flat / n2) % n1;
            const Index l = flat % n2;
            const double v = spec.values(flat);
            for (Index di = -1; di <= 1; ++di)
                for (Index dj = -1; dj <= 1; ++dj)
                    for (Index dl = -1; dl <= 1; ++dl)
                    {
                        if (di == 0 && dj == 0 && dl == 0)
                            continue;
                        const Index ii = i + di;
                        const Index jj = j + dj;
                        const Index ll = l + dl;
                        if (ii < 0 || ii >= n0 || jj < 0 || jj >= n1 || ll < 0 || ll >= n2)
                            continue;
                        if (!(v > spec.values((ii * n1 + jj) * n2 + ll)))
                            return false;
                    }
            return true;
        });
        if (quadratic_refine)
            for (Index p = 0; p < result.strict_count; ++p)
                refine_peak(spec, result.peaks[static_cast<std::size_t>(p)]);
        return result;
    }

    DistanceEstimate distance_estimate(double azimuth, double elevation,
                                       const SubspaceSplit &split_full, const GridSpec &r_grid,
                                       const RisGeometry &geom, bool quadratic_refine,
                                       std::uint64_t *eval_count)
    {
        if (r_grid.count < 1)
            throw std::invalid_argument("distance_estimate: empty distance grid");
        if (!(r_grid.start > 0.0))
            throw std::invalid_argument("distance_estimate: distances must be positive");
        if (split_full.signal_basis.rows() != geom.total())
            throw std::invalid_argument("distance_estimate: subspace dimension does not match the surface");

        DistanceEstimate est;
        est.spectrum.kind = SpectrumKind::distance1d;
        est.spectrum.axes = {Axis{"distance", "m", r_grid.points()}};
        est.spectrum.values.resize(r_grid.count);

        const VecR &r = est.spectrum.axes[0].values;
        VecC a(geom.total());
        VecC axis_h(geom.n_h);
        VecC axis_v(geom.n_v);
        VecC proj(split_full.signal_basis.cols());
        Index best = 0;
        for (Index i = 0; i < r.size(); ++i)
        {
            fresnel_response_into(a, axis_h, axis_v, azimuth, elevation, r(i), geom);
            est.spectrum.values(i) = music_value(split_full.signal_basis, a, proj);
            if (est.spectrum.values(i) > est.spectrum.values(best))
                best = i;
        }
        if (eval_count != nullptr)
            *eval_count += static_cast<std::uint64_t>(r.size());

        est.range = r(best);
        if (quadratic_refine && best > 0 && best + 1 < r.size())
            est.range += quadratic_offset(est.spectrum.values(best - 1), est.spectrum.values(best),
                                          est.spectrum.values(best + 1)) *
                         r_grid.step();
        return est;
    }

    EstimationResult modified_music(const MatC &r_hat, const Scenario &scn, const ExecOptions &opts)
    {
        const Index k = scn.num_users();
        const RisGeometry &geom = scn.geom;
        if (k < 1)
            throw std::invalid_argument("modified_music: scenario has no users");
        if (r_hat.rows() != geom.total() || r_hat.cols() != geom.total())
            throw std::invalid_argument("modified_music: covariance size does not match the surface");

        const SmoothingPlan plan = make_smoothing_plan(geom, scn.smoothing.d_h, scn.smoothing.d_v);
        if (plan.window() <= k)
            throw RankConditionError("modified_music: window size D_H*D_V must exceed the user count");
        if (plan.count() <= k)
            throw RankConditionError("modified_music: sub-surface count J must exceed the user count");

        EstimationResult result;

        const VecC y_bar = antidiagonal_vector(r_hat);
        const std::vector<VecC> subvectors = smooth_subvectors(y_bar, plan, geom);
        const MatC r_bar = smoothed_covariance(subvectors);
        const SubspaceSplit split_bar = eig_split(r_bar, k);

        SpectrumGrid angle = angle_spectrum(split_bar, plan.d_h, plan.d_v, scn.grids.azimuth,
                                            scn.grids.elevation, geom, opts, &result.grid_evals);

        // Several alias images and, for wide lobes, shoulder maxima can
        // accompany every true peak; gather a generous candidate set.
        const Index budget = std::min<Index>(6 * k, angle.values.size());
        const PeakSet candidates = find_peaks_2d(angle, budget, opts.quadratic_refine);
        result.degenerate = candidates.strict_count < k;
        const Index usable = std::min<Index>(static_cast<Index>(candidates.peaks.size()),
                                             std::max(candidates.strict_count, k));

        const SubspaceSplit split_full = eig_split(r_hat, k);

        struct ScoredCandidate
        {
            const GridPeak *peak = nullptr;
            DistanceEstimate estimate;
            VecC response;           // full-surface response at the located point
            double score = 0.0;      // distance-spectrum maximum; ghosts score low
            double prominence = 0.0; // max over median of the distance spectrum
        };
        std::vector<ScoredCandidate> scored;
        scored.reserve(static_cast<std::size_t>(usable));
        {
            VecC axis_h(geom.n_h);
            VecC axis_v(geom.n_v);
            for (Index c = 0; c < usable; ++c)
            {
                ScoredCandidate entry;
                entry.peak = &candidates.peaks[static_cast<std::size_t>(c)];
                entry.estimate =
                    distance_estimate(entry.peak->coordinates[0], entry.peak->coordinates[1],
                                      split_full, scn.grids.distance, geom, opts.quadratic_refine,
                                      &result.grid_evals);
                entry.score = entry.estimate.spectrum.values.maxCoeff();
                std::vector<double> values(entry.estimate.spectrum.values.data(),
                                           entry.estimate.spectrum.values.data() +
                                               entry.estimate.spectrum.values.size());
                std::nth_element(values.begin(), values.begin() + values.size() / 2, values.end());
                entry.prominence = entry.score / std::max(values[values.size() / 2],
                                                          std::numeric_limits<double>::min());
                entry.response.resize(geom.total());
                fresnel_response_into(entry.response, axis_h, axis_v, entry.peak->coordinates[0],
                                      entry.peak->coordinates[1], entry.estimate.range, geom);
                scored.push_back(std::move(entry));
            }
        }
        result.candidates_scored = usable;

        // Ghosts never develop a peak over distance, so candidates with a
        // structureless distance spectrum rank behind every peaked one.
        constexpr double kGhostProminence = 10.0;
        std::stable_sort(scored.begin(), scored.end(),
                         [](const ScoredCandidate &a, const ScoredCandidate &b) {
                             const bool a_peaked = a.prominence >= kGhostProminence;
                             const bool b_peaked = b.prominence >= kGhostProminence;
                             if (a_peaked != b_peaked)
                                 return a_peaked;
                             return a.score > b.score;
                         });

        // Greedy selection with duplicate suppression on the located
        // full-surface responses. A shoulder of a wide lobe lands at nearly
        // the same (angles, range) as its source and correlates strongly;
        // alias twins land at well-separated angles and do not, because the
        // full response carries single (undoubled) frequencies.
        constexpr double kDuplicateCorrelation = 0.7;
        const double n_total = static_cast<double>(geom.total());
        std::vector<const ScoredCandidate *> selected;
        for (const ScoredCandidate &entry : scored)
        {
            if (static_cast<Index>(selected.size()) >= k)
                break;
            bool duplicate = false;
            for (const ScoredCandidate *kept : selected)
            {
                if (std::abs(kept->response.dot(entry.response)) / n_total > kDuplicateCorrelation)
                {
                    duplicate = true;
                    break;
                }
            }
            if (!duplicate)
                selected.push_back(&entry);
        }
        for (const ScoredCandidate &entry : scored)
        {
            if (static_cast<Index>(selected.size()) >= k)
                break;
            if (std::find(selected.begin(), selected.end(), &entry) == selected.end())
                selected.push_back(&entry);
        }
        std::stable_sort(selected.begin(), selected.end(),
                         [](const ScoredCandidate *a, const ScoredCandidate *b) {
                             return a->peak->value > b->peak->value;
                         });

        result.spectra.push_back(std::move(angle));
        for (const ScoredCandidate *entry : selected)
        {
            LocationEstimate loc;
            loc.azimuth = entry->peak->coordinates[0];
            loc.elevation = entry->peak->coordinates[1];
            loc.range = entry->estimate.range;
            loc.spectrum_value = entry->peak->value;
            result.locations.push_back(loc);
            result.spectra.push_back(entry->estimate.spectrum);
        }
        return result;
    }

    EstimationResult music_3d(const MatC &r_hat, Index k, const ScenarioGrids &grids,
                              const RisGeometry &geom, const ExecOptions &opts)
    {
        check_angle_grid(grids.azimuth, "azimuth");
        check_angle_grid(grids.elevation, "elevation");
        if (grids.distance.count < 1)
            throw std::invalid_argument("music_3d: empty distance grid");
        if (r_hat.rows() != geom.total() || r_hat.cols() != geom.total())
            throw std::invalid_argument("music_3d: covariance size does not match the surface");

        const SubspaceSplit split = eig_split(r_hat, k);

        SpectrumGrid grid;
        grid.kind = SpectrumKind::music3d;
        grid.axes = {Axis{"azimuth", "rad", grids.azimuth.points()},
                     Axis{"elevation", "rad", grids.elevation.points()},
                     Axis{"distance", "m", grids.distance.points()}};
        grid.values.resize(grids.azimuth.count * grids.elevation.count * grids.distance.count);

        const VecR &az = grid.axes[0].values;
        const VecR &el = grid.axes[1].values;
        const VecR &rr = grid.axes[2].values;

        EstimationResult result;
        std::atomic<std::uint64_t> evals{0};
        detail::parallel_for_chunks(az.size(), opts.threads, [&](Index begin, Index end) {
            VecC a(geom.total());
            VecC axis_h(geom.n_h);
            VecC axis_v(geom.n_v);
            VecC proj(split.signal_basis.cols());
            for (Index i = begin; i < end; ++i)
                for (Index j = 0; j < el.size(); ++j)
                    for (Index l = 0; l < rr.size(); ++l)
                    {
                        fresnel_response_into(a, axis_h, axis_v, az(i), el(j), rr(l), geom);
                        grid.values((i * el.size() + j) * rr.size() + l) =
                            music_value(split.signal_basis, a, proj);
                    }
            evals.fetch_add(static_cast<std::uint64_t>((end - begin) * el.size() * rr.size()),
                            std::memory_order_relaxed);
        });
        result.grid_evals = evals.load();

        const PeakSet peaks = find_peaks_3d(grid, k, opts.quadratic_refine);
        result.degenerate = peaks.degenerate;
        for (const GridPeak &peak : peaks.peaks)
        {
            LocationEstimate loc;
            loc.azimuth = peak.coordinates[0];
            loc.elevation = peak.coordinates[1];
            loc.range = peak.coordinates[2];
            loc.spectrum_value = peak.value;
            result.locations.push_back(loc);
        }
        result.spectra.push_back(std::move(grid));
        return result;
    }

    EstimationResult music_2d_known_elevation(const MatC &r_hat, Index k,
                                              const std::vector<double> &known_elevations,
                                              const ScenarioGrids &grids, const RisGeometry &geom,
                                              const ExecOptions &opts)
    {
        if (static_cast<Index>(known_elevations.size()) != k)
            throw std::invalid_argument("music_2d_known_elevation: need one elevation per user");
        check_angle_grid(grids.azimuth, "azimuth");
        if (grids.distance.count < 1)
            throw std::invalid_argument("music_2d_known_elevation: empty distance grid");
        if (r_hat.rows() != geom.total() || r_hat.cols() != geom.total())
            throw std::invalid_argument("music_2d_known_elevation: covariance size does not match the surface");

        const SubspaceSplit split = eig_split(r_hat, k);

        // One search per distinct elevation; identical elevations share a slice.
        std::map<double, Index> slices;
        for (double theta : known_elevations)
            slices.emplace(theta, static_cast<Index>(slices.size()));

        struct SliceCandidate
        {
            double azimuth = 0.0;
            double elevation = 0.0;
            double range = 0.0;
            double value = 0.0;
            bool strict = false;
        };
        std::vector<SliceCandidate> candidates;

        EstimationResult result;
        std::atomic<std::uint64_t> evals{0};
        for (const auto &[theta, slice_idx] : slices)
        {
            SpectrumGrid grid;
            grid.kind = SpectrumKind::music2d;
            grid.axes = {Axis{"azimuth", "rad", grids.azimuth.points()},
                         Axis{"distance", "m", grids.distance.points()}};
            grid.values.resize(grids.azimuth.count * grids.distance.count);
            const VecR &az = grid.axes[0].values;
            const VecR &rr = grid.axes[1].values;

            detail::parallel_for_chunks(az.size(), opts.threads, [&](Index begin, Index end) {
                VecC a(geom.total());
                VecC axis_h(geom.n_h);
                VecC axis_v(geom.n_v);
                VecC proj(split.signal_basis.cols());
                for (Index i = begin; i < end; ++i)
                    for (Index l = 0; l < rr.size(); ++l)
                    {
                        fresnel_response_into(a, axis_h, axis_v, az(i), theta, rr(l), geom);
                        grid.values(i * rr.size() + l) = music_value(split.signal_basis, a, proj);
                    }
                evals.fetch_add(static_cast<std::uint64_t>((end - begin) * rr.size()),
                                std::memory_order_relaxed);
            });

            const PeakSet peaks = find_peaks_2d(grid, k, opts.quadratic_refine);
            for (Index p = 0; p < static_cast<Index>(peaks.peaks.size()); ++p)
            {
                const GridPeak &peak = peaks.peaks[static_cast<std::size_t>(p)];
                candidates.push_back(SliceCandidate{peak.coordinates[0], theta, peak.coordinates[1],
                                                    peak.value, p < peaks.strict_count});
            }
            result.spectra.push_back(std::move(grid));
        }
        result.grid_evals = evals.load();

        // Strict maxima first, then by spectrum value.
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const SliceCandidate &a, const SliceCandidate &b) {
                             if (a.strict != b.strict)
                                 return a.strict;
                             return a.value > b.value;
                         });
        Index strict_taken = 0;
        for (Index i = 0; i < k; ++i)
        {
            const SliceCandidate &c = candidates[static_cast<std::size_t>(i)];
            result.locations.push_back(LocationEstimate{c.azimuth, c.elevation, c.range, c.value});
            if (c.strict)
                ++strict_taken;
        }
        result.degenerate = strict_taken < k;
        std::stable_sort(result.locations.begin(), result.locations.end(),
                         [](const LocationEstimate &a, const LocationEstimate &b) {
                             return a.spectrum_value > b.spectrum_value;
                         });
        return result;
    }

} // namespace risloc
