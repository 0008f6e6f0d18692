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

#ifndef CELLFREE_TEST_UTIL_HPP
#define CELLFREE_TEST_UTIL_HPP

#include "cellfree/channel.hpp"
#include "cellfree/geometry.hpp"

#include <vector>

namespace cellfree::test
{

/// Hand-built snapshot with explicit large-scale gains and pilot assignment;
/// full cooperation, grouping applied at the given threshold.
inline Snapshot manual_snapshot(int antennas, const Matrix &beta,
                                const std::vector<int> &pilots, int tau_p, double p_ue,
                                double rho_max, double upsilon = 0.95)
{
    const int L = static_cast<int>(beta.rows());
    const int K = static_cast<int>(beta.cols());

    Snapshot snap;
    snap.cfg.num_aps = L;
    snap.cfg.num_ues = K;
    snap.cfg.antennas_per_ap = antennas;
    snap.cfg.pilot_len = tau_p;
    snap.cfg.coherence_len = 200;
    snap.cfg.dl_fraction = 0.5;
    snap.cfg.grouping_threshold = upsilon;

    snap.ap_positions = Matrix::Zero(L, 2);
    snap.ue_positions = Matrix::Zero(K, 2);
    snap.beta = beta;
    snap.shadow_z = Matrix::Zero(L, K);
    snap.pilot_of_ue = pilots;
    snap.copilot_ues.assign(static_cast<size_t>(K), {});
    snap.ues_on_pilot.assign(static_cast<size_t>(tau_p), {});
    for (int k = 0; k < K; ++k)
        snap.ues_on_pilot[static_cast<size_t>(pilots[static_cast<size_t>(k)])].push_back(k);
    for (int k = 0; k < K; ++k)
        snap.copilot_ues[static_cast<size_t>(k)] =
            snap.ues_on_pilot[static_cast<size_t>(pilots[static_cast<size_t>(k)])];

    snap.ap_cluster.assign(static_cast<size_t>(K), {});
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l)
            snap.ap_cluster[static_cast<size_t>(k)].push_back(l);
    snap.served_ues.assign(static_cast<size_t>(L), {});
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < K; ++k)
            snap.served_ues[static_cast<size_t>(l)].push_back(k);

    group_ues(snap, upsilon);

    snap.rho_max = Vector::Constant(L, rho_max);
    snap.p_ue = Vector::Constant(K, p_ue);
    return snap;
}

} // namespace cellfree::test

#endif // CELLFREE_TEST_UTIL_HPP
