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

#include "cellfree/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cellfree
{

double quantile(std::vector<double> values, double q)
{
    if (values.empty())
        throw std::invalid_argument("quantile of empty sample");
    if (q < 0.0 || q > 1.0)
        throw std::invalid_argument("quantile level outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<size_t>(std::floor(pos));
    const auto hi = static_cast<size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

CdfTable aggregate_cdf(std::vector<double> values)
{
    if (values.empty())
        throw std::invalid_argument("aggregate_cdf of empty sample");
    CdfTable table;
    table.median = quantile(values, 0.5);
    table.percentile5 = quantile(values, 0.05);
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    table.values = std::move(values);
    table.positions.resize(n);
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i)
    {
        table.positions[i] = static_cast<double>(i + 1) / static_cast<double>(n);
        sum += table.values[i];
    }
    table.mean = sum / static_cast<double>(n);
    return table;
}

} // namespace cellfree
