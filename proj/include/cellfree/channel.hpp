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

#ifndef CELLFREE_CHANNEL_HPP
#define CELLFREE_CHANNEL_HPP

#include "cellfree/geometry.hpp"
#include "cellfree/rng.hpp"
#include "cellfree/types.hpp"

#include <cstdint>
#include <vector>

namespace cellfree
{

/// Second-order statistics of the MMSE channel estimator, fixed per snapshot:
///   c      L x K   estimator gain applied to the correlated pilot block
///   gamma  L x K   per-antenna mean square of the estimate
///   theta  L x tau_p  per-antenna mean square of a pilot-book column,
///                     theta = gamma / c^2 for any UE on that pilot
struct EstimatorStats
{
    Matrix c;
    Matrix gamma;
    Matrix theta;                    // L x tau_p
    std::vector<bool> pilot_in_use;  // network-wide

    double theta_of_ue(int l, int k, const Snapshot &snap) const
    {
        return theta(l, snap.pilot_of_ue[static_cast<size_t>(k)]);
    }
};

EstimatorStats estimator_stats(const Snapshot &snap);

/// One coherence block: true channels, received pilot blocks and the MMSE
/// estimates derived from them. All per-AP matrices are indexed by the AP.
struct ChannelState
{
    std::vector<CMatrix> h;       // per AP: M x K true channels
    std::vector<CMatrix> y_pilot; // per AP: M x tau_p received pilot block
    std::vector<CMatrix> h_bar;   // per AP: M x tau_p full-rank estimate block
    std::vector<CMatrix> h_hat;   // per AP: M x K MMSE estimates
    EstimatorStats stats;
};

/// Draws one coherence block. The pilot book is sqrt(tau_p) * I, so the
/// correlated block h_bar equals sqrt(tau_p) * y_pilot and the estimate of UE
/// k is exactly c(l,k) * h_bar.col(pilot_of_ue[k]).
ChannelState realize_channels(const Snapshot &snap, std::uint64_t seed);

/// Same draw without materializing y_pilot / h_hat; used by the Monte-Carlo
/// hot loops. rng state advances exactly as in realize_channels.
void realize_channels_light(const Snapshot &snap, Rng &rng, std::vector<CMatrix> &h,
                            std::vector<CMatrix> &h_bar);

} // namespace cellfree

#endif // CELLFREE_CHANNEL_HPP
