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

#ifndef CELLFREE_STATS_HPP
#define CELLFREE_STATS_HPP

#include <vector>

namespace cellfree
{

/// Empirical CDF: sorted values with plotting positions i/n.
struct CdfTable
{
    std::vector<double> values;    // ascending
    std::vector<double> positions; // i/n for i = 1..n
    double median = 0.0;
    double percentile5 = 0.0; // the 95%-likely value
    double mean = 0.0;
};

/// Linear-interpolation quantile on a sorted copy of the input (position
/// q * (n-1) between order statistics).
double quantile(std::vector<double> values, double q);

CdfTable aggregate_cdf(std::vector<double> values);

} // namespace cellfree

#endif // CELLFREE_STATS_HPP
