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

#ifndef CELLFREE_CONFIG_HPP
#define CELLFREE_CONFIG_HPP

#include "cellfree/types.hpp"

#include <cstdint>
#include <string>

namespace cellfree
{

/// Scenario constants: geometry, frame structure, powers and the grouping /
/// clustering thresholds. Defaults follow the urban-microcell setup used
/// throughout the experiments (2 GHz carrier, 20 MHz channel, symmetric TDD
/// frame), scaled to a desk-size network.
struct NetworkConfig
{
    double area_side_m = 500.0;  // wrap-around square side D
    int num_aps = 30;            // L
    int antennas_per_ap = 8;     // M
    int num_ues = 10;            // K
    int pilot_len = 5;           // tau_p, mutually orthogonal pilots
    int coherence_len = 200;     // tau_c, samples per coherence block
    double dl_fraction = 0.5;    // xi, downlink share of the data samples
    double shadow_std_db = 4.0;
    double shadow_weight = 0.5;  // AP-vs-UE split of the shadowing variance
    double shadow_decorr_m = 9.0;
    double ap_height_m = 10.0;
    double ue_height_m = 1.5;
    double ap_power_mw = 200.0;
    double ue_power_mw = 100.0;
    double noise_dbm = -92.0;
    double grouping_threshold = 0.95;   // upsilon, strong-UE channel-gain share
    double clustering_threshold = 1.0;  // kappa, 1 = every AP serves every UE
    std::uint64_t rng_seed = 1;
    int mc_realizations = 20000;

    int data_len() const { return coherence_len - pilot_len; } // tau_d

    /// Per-AP downlink power budget, normalized by the noise power (linear).
    double ap_power_normalized() const
    {
        return db_to_linear(linear_to_db(ap_power_mw) - noise_dbm);
    }

    /// Uplink pilot power, normalized by the noise power (linear).
    double ue_power_normalized() const
    {
        return db_to_linear(linear_to_db(ue_power_mw) - noise_dbm);
    }

    /// Throws std::invalid_argument on the first violated invariant.
    void validate() const;
};

NetworkConfig config_from_json_file(const std::string &path);
NetworkConfig config_from_json_text(const std::string &text);
std::string config_to_json_text(const NetworkConfig &cfg);

} // namespace cellfree

#endif // CELLFREE_CONFIG_HPP
