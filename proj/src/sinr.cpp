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

#include "cellfree/sinr.hpp"

#include <cmath>

namespace cellfree
{

SinrCoefficients sinr_coefficients(Scheme scheme, const Snapshot &snap,
                                   const EstimatorStats &stats)
{
    const int L = snap.num_aps();
    const int K = snap.num_ues();
    const int M = snap.antennas();
    const int tau_p = snap.pilot_len();

    if (scheme == Scheme::RZF)
        throw std::invalid_argument("no closed-form SINR coefficients exist for RZF");
    if (scheme == Scheme::FZF && M <= tau_p)
        throw InsufficientDofError(M, tau_p);

    SinrCoefficients coef;
    coef.scheme = scheme;
    coef.g.resize(static_cast<size_t>(L));
    coef.z.resize(static_cast<size_t>(L));
    for (int l = 0; l < L; ++l)
    {
        Matrix &g = coef.g[static_cast<size_t>(l)];
        Matrix &z = coef.z[static_cast<size_t>(l)];
        g.resize(K, K);
        z.resize(K, K);
        const int tau_s = snap.tau_strong[static_cast<size_t>(l)];
        if ((scheme == Scheme::PZF || scheme == Scheme::PPZF) && M <= tau_s)
            throw InsufficientDofError(M, tau_s);
        for (int k = 0; k < K; ++k)
        {
            const double gamma = stats.gamma(l, k);
            const double beta = snap.beta(l, k);
            const double dk = snap.delta(l, k);
            for (int t = 0; t < K; ++t)
            {
                const double dt = snap.delta(l, t);
                switch (scheme)
                {
                case Scheme::MRT:
                    g(k, t) = M * gamma;
                    z(k, t) = beta;
                    break;
                case Scheme::FZF:
                    g(k, t) = (M - tau_p) * gamma;
                    z(k, t) = beta - gamma;
                    break;
                case Scheme::PZF:
                    g(k, t) = (M - dt * tau_s) * gamma;
                    z(k, t) = beta - dk * dt * gamma;
                    break;
                case Scheme::PPZF:
                    g(k, t) = (M - tau_s) * gamma;
                    z(k, t) = beta - dk * gamma;
                    break;
                default:
                    break;
                }
            }
        }
    }
    return coef;
}

// Shared evaluator for the closed-form effective SINR; also used by the
// max-min solver, which owns coefficients but no Snapshot.
double sinr_closed_form_raw(const SinrCoefficients &coef,
                            const std::vector<IndexSet> &copilot_ues, const Matrix &rho, int ue)
{
    const int L = static_cast<int>(coef.g.size());
    const int K = static_cast<int>(coef.g.front().rows());

    double num_amp = 0.0;
    for (int l = 0; l < L; ++l)
        num_amp += std::sqrt(rho(l, ue) * coef.g[static_cast<size_t>(l)](ue, ue));

    double coherent = 0.0;
    for (int t : copilot_ues[static_cast<size_t>(ue)])
    {
        if (t == ue)
            continue;
        double amp = 0.0;
        for (int l = 0; l < L; ++l)
            amp += std::sqrt(rho(l, t) * coef.g[static_cast<size_t>(l)](ue, t));
        coherent += amp * amp;
    }

    double leakage = 0.0;
    for (int l = 0; l < L; ++l)
        for (int t = 0; t < K; ++t)
            leakage += rho(l, t) * coef.z[static_cast<size_t>(l)](ue, t);

    return num_amp * num_amp / (coherent + leakage + 1.0);
}

double sinr_closed_form(const SinrCoefficients &coef, const Snapshot &snap, const Matrix &rho,
                        int ue)
{
    return sinr_closed_form_raw(coef, snap.copilot_ues, rho, ue);
}

Vector sinr_closed_form_all(const SinrCoefficients &coef, const Snapshot &snap,
                            const Matrix &rho)
{
    Vector out(snap.num_ues());
    for (int k = 0; k < snap.num_ues(); ++k)
        out(k) = sinr_closed_form_raw(coef, snap.copilot_ues, rho, k);
    return out;
}

double se_from_sinr(double sinr, const NetworkConfig &cfg)
{
    if (sinr < 0.0)
        throw std::invalid_argument("se_from_sinr: negative SINR");
    const double prelog =
        cfg.dl_fraction * (1.0 - static_cast<double>(cfg.pilot_len) / cfg.coherence_len);
    return prelog * std::log2(1.0 + sinr);
}

} // namespace cellfree
