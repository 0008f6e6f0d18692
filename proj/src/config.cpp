// cellfree-dl: distributed precoding simulator for cell-free massive MIMO downlink
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

#include "cellfree/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace cellfree
{

void NetworkConfig::validate() const
{
    auto fail = [](const std::string &msg) { throw std::invalid_argument("NetworkConfig: " + msg); };
    if (area_side_m <= 0)
        fail("area_side_m must be > 0");
    if (num_aps < 1 || num_ues < 1 || antennas_per_ap < 1)
        fail("num_aps, num_ues and antennas_per_ap must be >= 1");
    if (pilot_len < 1 || pilot_len > num_ues)
        fail("pilot_len must satisfy 1 <= tau_p <= K");
    if (pilot_len >= coherence_len)
        fail("pilot_len must be < coherence_len");
    if (static_cast<long>(num_aps) * antennas_per_ap <= num_ues)
        fail("L*M must exceed K");
    if (!(dl_fraction > 0.0 && dl_fraction < 1.0))
        fail("dl_fraction must lie in (0, 1)");
    if (ap_power_mw <= 0 || ue_power_mw <= 0)
        fail("powers must be > 0");
    if (shadow_weight < 0.0 || shadow_weight > 1.0)
        fail("shadow_weight must lie in [0, 1]");
    if (shadow_decorr_m <= 0)
        fail("shadow_decorr_m must be > 0");
    if (grouping_threshold < 0.0 || grouping_threshold > 1.0)
        fail("grouping_threshold must lie in [0, 1]");
    if (clustering_threshold < 0.0 || clustering_threshold > 1.0)
        fail("clustering_threshold must lie in [0, 1]");
    if (mc_realizations < 1)
        fail("mc_realizations must be >= 1");
}

using nlohmann::json;

static void apply_json(NetworkConfig &cfg, const json &j)
{
    auto get = [&](const char *key, auto &field) {
        if (j.contains(key))
            field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    get("area_side_m", cfg.area_side_m);
    get("num_aps", cfg.num_aps);
    get("antennas_per_ap", cfg.antennas_per_ap);
    get("num_ues", cfg.num_ues);
    get("pilot_len", cfg.pilot_len);
    get("coherence_len", cfg.coherence_len);
    get("dl_fraction", cfg.dl_fraction);
    get("shadow_std_db", cfg.shadow_std_db);
    get("shadow_weight", cfg.shadow_weight);
    get("shadow_decorr_m", cfg.shadow_decorr_m);
    get("ap_height_m", cfg.ap_height_m);
    get("ue_height_m", cfg.ue_height_m);
    get("ap_power_mw", cfg.ap_power_mw);
    get("ue_power_mw", cfg.ue_power_mw);
    get("noise_dbm", cfg.noise_dbm);
    get("grouping_threshold", cfg.grouping_threshold);
    get("clustering_threshold", cfg.clustering_threshold);
    get("rng_seed", cfg.rng_seed);
    get("mc_realizations", cfg.mc_realizations);
}

NetworkConfig config_from_json_text(const std::string &text)
{
    NetworkConfig cfg;
    apply_json(cfg, json::parse(text));
    cfg.validate();
    return cfg;
}

NetworkConfig config_from_json_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

std::string config_to_json_text(const NetworkConfig &cfg)
{
    json j;
    j["area_side_m"] = cfg.area_side_m;
    j["num_aps"] = cfg.num_aps;
    j["antennas_per_ap"] = cfg.antennas_per_ap;
    j["num_ues"] = cfg.num_ues;
    j["pilot_len"] = cfg.pilot_len;
    j["coherence_len"] = cfg.coherence_len;
    j["dl_fraction"] = cfg.dl_fraction;
    j["shadow_std_db"] = cfg.shadow_std_db;
    j["shadow_weight"] = cfg.shadow_weight;
    j["shadow_decorr_m"] = cfg.shadow_decorr_m;
    j["ap_height_m"] = cfg.ap_height_m;
    j["ue_height_m"] = cfg.ue_height_m;
    j["ap_power_mw"] = cfg.ap_power_mw;
    j["ue_power_mw"] = cfg.ue_power_mw;
    j["noise_dbm"] = cfg.noise_dbm;
    j["grouping_threshold"] = cfg.grouping_threshold;
    j["clustering_threshold"] = cfg.clustering_threshold;
    j["rng_seed"] = cfg.rng_seed;
    j["mc_realizations"] = cfg.mc_realizations;
    return j.dump(2);
}

} // namespace cellfree
