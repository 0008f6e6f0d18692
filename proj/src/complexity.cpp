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

#include "cellfree/complexity.hpp"

#include <stdexcept>

namespace cellfree
{

// Pseudo-inverse cost over tau directions at an M-antenna AP.
static double pinv_mults(double tau, double m)
{
    return 1.5 * tau * tau * m + 0.5 * tau * m + (tau * tau * tau - tau) / 3.0;
}

ComplexityReport complexity(int antennas, int pilot_len, int tau_strong, int data_len,
                            int num_ues)
{
    if (tau_strong > pilot_len)
        throw std::invalid_argument("tau_strong must not exceed pilot_len");
    if (antennas < 1 || pilot_len < 1 || data_len < 0 || num_ues < 1)
        throw std::invalid_argument("bad complexity arguments");

    const double m = antennas;
    const double tp = pilot_len;
    const double ts = tau_strong;
    const double tx = static_cast<double>(data_len) * m * num_ues;

    ComplexityReport report;
    report.antennas = antennas;
    report.pilot_len = pilot_len;
    report.tau_strong = tau_strong;

    const double fzf_cost = pinv_mults(tp, m) + tp;

    auto push = [&](const std::string &name, double mults, double divs) {
        ComplexityEntry e;
        e.scheme = name;
        e.multiplications = mults;
        e.divisions = divs;
        e.transmission_multiplications = tx;
        e.normalized = (mults + divs) / fzf_cost;
        report.entries.push_back(e);
    };

    push("mrt", 0.0, 0.0);
    push("fzf", pinv_mults(tp, m), tp);
    push("pzf", pinv_mults(ts, m), ts);
    push("ppzf", pinv_mults(ts, m) + 2.0 * (tp - ts) * ts * m, ts);
    return report;
}

} // namespace cellfree
