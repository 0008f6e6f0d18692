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

#ifndef CELLFREE_SINR_HPP
#define CELLFREE_SINR_HPP

#include "cellfree/channel.hpp"
#include "cellfree/geometry.hpp"
#include "cellfree/types.hpp"

#include <vector>

namespace cellfree
{

/// Unified closed-form SINR coefficients. For each AP l the matrices hold
///   g[l](k,t): coherent gain of AP l towards UE k when transmitting on UE
///              t's pilot,
///   z[l](k,t): non-coherent leakage power of that transmission at UE k.
/// One generic evaluator covers MRT, FZF, PZF and PPZF; the schemes differ
/// only in how g and z are filled.
struct SinrCoefficients
{
    Scheme scheme = Scheme::MRT;
    std::vector<Matrix> g; // per AP: K x K
    std::vector<Matrix> z; // per AP: K x K
};

SinrCoefficients sinr_coefficients(Scheme scheme, const Snapshot &snap,
                                   const EstimatorStats &stats);

/// Closed-form effective SINR of UE k under power allocation rho (L x K):
///   (sum_l sqrt(rho(l,k) g(k,k)))^2 /
///   (sum_{t copilot} (sum_l sqrt(rho(l,t) g(k,t)))^2
///     + sum_l sum_t rho(l,t) z(k,t) + 1)
double sinr_closed_form(const SinrCoefficients &coef, const Snapshot &snap, const Matrix &rho,
                        int ue);

/// Same evaluator on bare coefficients and co-pilot sets (no Snapshot).
double sinr_closed_form_raw(const SinrCoefficients &coef,
                            const std::vector<IndexSet> &copilot_ues, const Matrix &rho,
                            int ue);

Vector sinr_closed_form_all(const SinrCoefficients &coef, const Snapshot &snap,
                            const Matrix &rho);

/// Spectral efficiency from a linear SINR: xi (1 - tau_p/tau_c) log2(1+SINR).
double se_from_sinr(double sinr, const NetworkConfig &cfg);

/// Per-UE evaluation result. Closed-form results carry zero standard errors.
struct SEResult
{
    double sinr = 0.0;
    double se = 0.0;
    bool monte_carlo = false;
    double sinr_stderr = 0.0;
    double se_stderr = 0.0;
    double cp_stderr = 0.0; // coherent precoding gain block
    double pu_stderr = 0.0; // precoding gain uncertainty block
    double ui_stderr = 0.0; // multi-user interference block
};

} // namespace cellfree

#endif // CELLFREE_SINR_HPP
