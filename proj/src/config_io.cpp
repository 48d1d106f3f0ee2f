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

#include "risloc/harness.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace risloc
{

    namespace
    {
        using nlohmann::json;

        constexpr double kDegree = M_PI / 180.0;

        [[noreturn]] void fail(const std::string &msg)
        {
            throw std::invalid_argument("scenario config: " + msg);
        }

        double require_number(const json &obj, const std::string &key)
        {
            if (!obj.contains(key) || !obj[key].is_number())
                fail("missing numeric key '" + key + "'");
            return obj[key].get<double>();
        }

        Index require_integer(const json &obj, const std::string &key)
        {
            if (!obj.contains(key) || !obj[key].is_number_integer())
                fail("missing integer key '" + key + "'");
            return obj[key].get<Index>();
        }

        // Angles come in as either <key>_deg or <key>_rad, exactly one.
        double angle_from(const json &obj, const std::string &stem)
        {
            const std::string deg = stem + "_deg";
            const std::string rad = stem + "_rad";
            if (obj.contains(deg) == obj.contains(rad))
                fail("specify exactly one of '" + deg + "' or '" + rad + "'");
            return obj.contains(deg) ? obj[deg].get<double>() * kDegree : obj[rad].get<double>();
        }

        // Powers come in as either <key>_dbm or <key>_w, exactly one.
        double power_from(const json &obj, const std::string &stem)
        {
            const std::string dbm = stem + "_dbm";
            const std::string watt = stem + "_w";
            if (obj.contains(dbm) == obj.contains(watt))
                fail("specify exactly one of '" + dbm + "' or '" + watt + "'");
            return obj.contains(dbm) ? dbm_to_watt(obj[dbm].get<double>()) : obj[watt].get<double>();
        }

        GridSpec grid_from(const json &obj, const std::string &stem, const GridSpec &fallback,
                           bool is_angle)
        {
            if (is_angle && obj.contains(stem + "_step_deg"))
                return angle_grid(obj[stem + "_step_deg"].get<double>() * kDegree);
            GridSpec grid = fallback;
            bool any = false;
            if (obj.contains(stem + (is_angle ? "_start_rad" : "_start_m")))
            {
                grid.start = obj[stem + (is_angle ? "_start_rad" : "_start_m")].get<double>();
                any = true;
            }
            if (obj.contains(stem + (is_angle ? "_stop_rad" : "_stop_m")))
            {
                grid.stop = obj[stem + (is_angle ? "_stop_rad" : "_stop_m")].get<double>();
                any = true;
            }
            if (obj.contains(stem + "_count"))
            {
                grid.count = obj[stem + "_count"].get<Index>();
                any = true;
            }
            (void)any;
            return grid;
        }
    } // namespace

    Scenario scenario_from_json_string(const std::string &text)
    {
        json root = json::parse(text);
        if (!root.is_object())
            fail("top level must be an object");

        Scenario scn;
        const Index n_h = require_integer(root, "n_h");
        const Index n_v = require_integer(root, "n_v");
        const double d_h = require_number(root, "d_h_m");
        const double d_v = require_number(root, "d_v_m");
        const double wavelength = require_number(root, "wavelength_m");
        scn.geom = RisGeometry(n_h, n_v, d_h, d_v, wavelength);

        if (!root.contains("ues") || !root["ues"].is_array() || root["ues"].empty())
            fail("'ues' must be a non-empty array");
        for (const json &ue : root["ues"])
        {
            const double azimuth = angle_from(ue, "azimuth");
            const double elevation = angle_from(ue, "elevation");
            const double range = require_number(ue, "range_m");
            const double tx_power = power_from(ue, "tx_power");
            const double eta = ue.contains("path_loss") ? ue["path_loss"].get<double>()
                                                        : path_loss(range, wavelength);
            scn.ues.emplace_back(azimuth, elevation, range, tx_power, eta);
        }

        scn.m_bs = require_integer(root, "m_bs");
        scn.l_subslots = root.contains("l_subslots")
                             ? root["l_subslots"].get<Index>()
                             : (scn.geom.total() + scn.m_bs - 1) / scn.m_bs;
        scn.t_samples = require_integer(root, "t_samples");
        scn.noise_power = power_from(root, "noise_power");
        scn.rician_factor = require_number(root, "rician_factor");

        if (!root.contains("smoothing") || !root["smoothing"].is_object())
            fail("'smoothing' must be an object with 'd_h' and 'd_v'");
        scn.smoothing.d_h = require_integer(root["smoothing"], "d_h");
        scn.smoothing.d_v = require_integer(root["smoothing"], "d_v");

        const GridSpec angle_default = angle_grid(0.5 * kDegree);
        const GridSpec distance_default{0.5, scn.geom.fraunhofer_distance(), 500};
        const json grids = root.contains("grids") ? root["grids"] : json::object();
        scn.grids.azimuth = grid_from(grids, "azimuth", angle_default, true);
        scn.grids.elevation = grid_from(grids, "elevation", angle_default, true);
        scn.grids.distance = grid_from(grids, "distance", distance_default, false);

        scn.rng_seed = root.contains("rng_seed") ? root["rng_seed"].get<std::uint64_t>() : 20240917ULL;

        if (root.contains("response_model"))
        {
            const std::string model = root["response_model"].get<std::string>();
            if (model == "exact")
                scn.model = ResponseModel::exact;
            else if (model == "fresnel")
                scn.model = ResponseModel::fresnel;
            else
                fail("'response_model' must be \"exact\" or \"fresnel\"");
        }

        scn.validate();
        return scn;
    }

    Scenario load_scenario_file(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("load_scenario_file: cannot open '" + path + "'");
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return scenario_from_json_string(text);
    }

    std::string scenario_to_json_string(const Scenario &scn, int indent)
    {
        json root;
        root["n_h"] = scn.geom.n_h;
        root["n_v"] = scn.geom.n_v;
        root["d_h_m"] = scn.geom.d_h;
        root["d_v_m"] = scn.geom.d_v;
        root["wavelength_m"] = scn.geom.wavelength;
        root["ues"] = json::array();
        for (const UeTruth &ue : scn.ues)
        {
            json u;
            u["azimuth_rad"] = ue.azimuth;
            u["elevation_rad"] = ue.elevation;
            u["range_m"] = ue.range;
            u["tx_power_w"] = ue.tx_power;
            u["path_loss"] = ue.path_loss;
            root["ues"].push_back(u);
        }
        root["m_bs"] = scn.m_bs;
        root["l_subslots"] = scn.l_subslots;
        root["t_samples"] = scn.t_samples;
        root["noise_power_w"] = scn.noise_power;
        root["rician_factor"] = scn.rician_factor;
        root["smoothing"] = {{"d_h", scn.smoothing.d_h}, {"d_v", scn.smoothing.d_v}};
        root["grids"] = {{"azimuth_start_rad", scn.grids.azimuth.start},
                         {"azimuth_stop_rad", scn.grids.azimuth.stop},
                         {"azimuth_count", scn.grids.azimuth.count},
                         {"elevation_start_rad", scn.grids.elevation.start},
                         {"elevation_stop_rad", scn.grids.elevation.stop},
                         {"elevation_count", scn.grids.elevation.count},
                         {"distance_start_m", scn.grids.distance.start},
                         {"distance_stop_m", scn.grids.distance.stop},
                         {"distance_count", scn.grids.distance.count}};
        root["rng_seed"] = scn.rng_seed;
        root["response_model"] = scn.model == ResponseModel::exact ? "exact" : "fresnel";
        return root.dump(indent);
    }

} // namespace risloc
