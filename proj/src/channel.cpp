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

#include "cellfree/channel.hpp"

#include <cmath>

namespace cellfree
{

EstimatorStats estimator_stats(const Snapshot &snap)
{
    const int L = snap.num_aps();
    const int K = snap.num_ues();
    const int tau_p = snap.pilot_len();

    EstimatorStats st;
    st.c.resize(L, K);
    st.gamma.resize(L, K);
    st.theta.resize(L, tau_p);
    st.pilot_in_use.assign(static_cast<size_t>(tau_p), false);

    // denom(l, i) = tau_p * sum_{t on pilot i} p_t beta_{l,t} + 1
    Matrix denom = Matrix::Ones(L, tau_p);
    for (int i = 0; i < tau_p; ++i)
    {
        const auto &ues = snap.ues_on_pilot[static_cast<size_t>(i)];
        st.pilot_in_use[static_cast<size_t>(i)] = !ues.empty();
        for (int t : ues)
            denom.col(i) += static_cast<double>(tau_p) * snap.p_ue(t) * snap.beta.col(t);
    }

    for (int l = 0; l < L; ++l)
    {
        for (int k = 0; k < K; ++k)
        {
            const int i = snap.pilot_of_ue[static_cast<size_t>(k)];
            const double pk = snap.p_ue(k);
            const double b = snap.beta(l, k);
            st.c(l, k) = std::sqrt(pk) * b / denom(l, i);
            st.gamma(l, k) = pk * tau_p * b * b / denom(l, i);
        }
        for (int i = 0; i < tau_p; ++i)
            st.theta(l, i) = tau_p * denom(l, i);
    }
    return st;
}

void realize_channels_light(const Snapshot &snap, Rng &rng, std::vector<CMatrix> &h,
                            std::vector<CMatrix> &h_bar)
{
    const int L = snap.num_aps();
    const int K = snap.num_ues();
    const int M = snap.antennas();
    const int tau_p = snap.pilot_len();
    const double sqrt_tau = std::sqrt(static_cast<double>(tau_p));

    h.resize(static_cast<size_t>(L));
    h_bar.resize(static_cast<size_t>(L));
    for (int l = 0; l < L; ++l)
    {
        CMatrix &hl = h[static_cast<size_t>(l)];
        CMatrix &bl = h_bar[static_cast<size_t>(l)];
        hl.resize(M, K);
        bl.resize(M, tau_p);
        for (int k = 0; k < K; ++k)
        {
            const double var = snap.beta(l, k);
            for (int m = 0; m < M; ++m)
                hl(m, k) = rng.cnormal(var);
        }
        rng.fill_cnormal(bl); // pilot noise
        for (int k = 0; k < K; ++k)
        {
            const int i = snap.pilot_of_ue[static_cast<size_t>(k)];
            bl.col(i) += std::sqrt(snap.p_ue(k) * tau_p) * hl.col(k);
        }
        bl *= sqrt_tau; // h_bar = Y * Phi with Phi = sqrt(tau_p) I
    }
}

ChannelState realize_channels(const Snapshot &snap, std::uint64_t seed)
{
    const int L = snap.num_aps();
    const int K = snap.num_ues();
    const double inv_sqrt_tau = 1.0 / std::sqrt(static_cast<double>(snap.pilot_len()));

    ChannelState ch;
    ch.stats = estimator_stats(snap);
    Rng rng(derive_seed(seed, stream::channels));
    realize_channels_light(snap, rng, ch.h, ch.h_bar);

    ch.y_pilot.resize(static_cast<size_t>(L));
    ch.h_hat.resize(static_cast<size_t>(L));
    for (int l = 0; l < L; ++l)
    {
        ch.y_pilot[static_cast<size_t>(l)] = inv_sqrt_tau * ch.h_bar[static_cast<size_t>(l)];
        CMatrix &hat = ch.h_hat[static_cast<size_t>(l)];
        hat.resize(snap.antennas(), K);
        for (int k = 0; k < K; ++k)
        {
            const int i = snap.pilot_of_ue[static_cast<size_t>(k)];
            hat.col(k) = ch.stats.c(l, k) * ch.h_bar[static_cast<size_t>(l)].col(i);
        }
    }
    return ch;
}

} // namespace cellfree
