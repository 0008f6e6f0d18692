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

#ifndef CELLFREE_COMPLEXITY_HPP
#define CELLFREE_COMPLEXITY_HPP

#include <string>
#include <vector>

namespace cellfree
{

/// Per-coherence-block arithmetic cost of computing the precoding vectors at
/// one AP, plus the transmission cost, for one scheme.
struct ComplexityEntry
{
    std::string scheme;
    double multiplications = 0.0;
    double divisions = 0.0;
    double transmission_multiplications = 0.0;
    double normalized = 0.0; // (mults + divs) / FZF's (mults + divs)
};

struct ComplexityReport
{
    int antennas = 0;
    int pilot_len = 0;
    int tau_strong = 0;
    std::vector<ComplexityEntry> entries; // MRT, FZF, PZF, PPZF
};

/// Counts per coherence block: pseudo-inverse cost for the zero-forcing
/// family (FZF over tau_p directions, PZF/PPZF over tau_strong, PPZF paying
/// an extra 2 (tau_p - tau_strong) tau_strong M for the projected MRT
/// vectors), and tau_d M K transmission multiplications for every scheme.
ComplexityReport complexity(int antennas, int pilot_len, int tau_strong, int data_len,
                            int num_ues);

} // namespace cellfree

#endif // CELLFREE_COMPLEXITY_HPP
