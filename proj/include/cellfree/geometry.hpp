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

#ifndef CELLFREE_GEOMETRY_HPP
#define CELLFREE_GEOMETRY_HPP

#include "cellfree/config.hpp"
#include "cellfree/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cellfree
{

/// One realization of the network large-scale state: positions, large-scale
/// fading, pilot assignment, per-AP strong/weak UE grouping and per-UE AP
/// clusters. Everything downstream (channels, precoders, SINR tables) is a
/// deterministic function of a Snapshot plus a seed.
struct Snapshot
{
    NetworkConfig cfg;

    Matrix ap_positions; // L x 2, meters
    Matrix ue_positions; // K x 2, meters
    Matrix beta;         // L x K, linear power gain
    Matrix shadow_z;     // L x K, standard-normal shadowing terms

    std::vector<int> pilot_of_ue;      // K, pilot index in [0, tau_p)
    std::vector<IndexSet> copilot_ues; // per UE k: P_k, UEs sharing k's pilot (incl. k)
    std::vector<IndexSet> ues_on_pilot; // per pilot: UEs using it

    std::vector<IndexSet> strong_ues; // per AP l: S_l (subset of served UEs)
    std::vector<IndexSet> weak_ues;   // per AP l: W_l (served complement)
    std::vector<int> tau_strong;      // per AP l: distinct pilots in S_l
    std::vector<IndexSet> strong_pilots; // per AP l: R_{S_l}, ascending

    std::vector<IndexSet> ap_cluster; // per UE k: A_k, serving APs
    std::vector<IndexSet> served_ues; // per AP l: UEs with l in A_k

    Eigen::MatrixXi delta; // L x K, 1 iff UE k in S_l
    std::vector<IndexSet> zf_aps;  // per UE k: Z_k = {l : k in S_l}
    std::vector<IndexSet> mrt_aps; // per UE k: M_k = {l in A_k : k in W_l}

    Vector rho_max; // L, per-AP normalized power budget
    Vector p_ue;    // K, per-UE normalized pilot power

    std::vector<std::string> warnings;

    int num_aps() const { return cfg.num_aps; }
    int num_ues() const { return cfg.num_ues; }
    int antennas() const { return cfg.antennas_per_ap; }
    int pilot_len() const { return cfg.pilot_len; }

    bool serves(int l, int k) const;
};

/// 3-D distance between two points on the D x D wrap-around square, with a
/// fixed height difference. The planar part is the minimum over the nine
/// torus images.
double wrap_distance(double px, double py, double qx, double qy, double area_side,
                     double delta_h);

/// Urban-microcell pathloss at 2 GHz, in dB, for a 3-D distance in meters.
double pathloss_db(double distance_m);

/// Random pilot assignment: a random permutation guarantees every pilot is
/// used at least once, remaining UEs draw uniformly.
std::vector<int> assign_pilots(const NetworkConfig &cfg, std::uint64_t seed);

/// Per-UE AP clusters: smallest non-empty prefix of APs (by descending beta)
/// reaching a kappa share of the UE's total channel gain.
std::vector<IndexSet> cluster_aps(const Matrix &beta, double kappa);

/// Per-AP strong/weak UE split: smallest (possibly empty) prefix of served
/// UEs reaching an upsilon share of the AP's total served channel gain,
/// closed under co-pilot membership, then trimmed one whole pilot group at a
/// time (weakest first) until tau_strong <= M-1.
void group_ues(Snapshot &snap, double upsilon);

/// Generates a full Snapshot: positions, correlated log-normal shadowing,
/// pathloss, pilot assignment, clustering, grouping and normalized powers.
Snapshot generate_snapshot(const NetworkConfig &cfg, std::uint64_t seed);

std::string snapshot_to_json_text(const Snapshot &snap);

} // namespace cellfree

#endif // CELLFREE_GEOMETRY_HPP
