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

#ifndef CELLFREE_MONTE_CARLO_HPP
#define CELLFREE_MONTE_CARLO_HPP

#include "cellfree/precoding.hpp"
#include "cellfree/sinr.hpp"
#include "cellfree/types.hpp"

#include <cstdint>
#include <vector>

namespace cellfree
{

/// One scheme/power combination to evaluate. For RZF, rho_reg supplies the
/// regularization coefficients; when absent the allocation itself is used.
struct McSchemeSpec
{
    Scheme scheme = Scheme::MRT;
    Matrix rho;     // L x K allocation entering the SINR
    Matrix rho_reg; // empty = use rho (RZF only)
};

struct McOptions
{
    int n_realizations = 20000;
    std::uint64_t seed = 1;
    int n_threads = 1;
    int chunk_size = 512;     // fixed chunking keeps reductions thread-count invariant
    int rzf_norm_draws = 1000;
};

/// Estimates the hardening-bound SINR of every UE for every requested scheme
/// by sample-averaging the coherent gain and the per-transmitter second
/// moments over shared channel realizations (common random numbers across
/// schemes). Standard errors come from the delta method on the jointly
/// accumulated sample covariance.
std::vector<std::vector<SEResult>> monte_carlo_se(const Snapshot &snap,
                                                  const std::vector<McSchemeSpec> &specs,
                                                  const McOptions &opt);

/// Single-UE convenience wrapper. Requires n_realizations >= 1000.
SEResult sinr_monte_carlo(Scheme scheme, const Snapshot &snap, const Matrix &rho, int ue,
                          int n_realizations, std::uint64_t seed, int n_threads = 1);

} // namespace cellfree

#endif // CELLFREE_MONTE_CARLO_HPP
