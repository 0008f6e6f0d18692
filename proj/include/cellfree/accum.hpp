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

#ifndef CELLFREE_ACCUM_HPP
#define CELLFREE_ACCUM_HPP

#include <cmath>

namespace cellfree
{

/// Neumaier compensated accumulator. Monte-Carlo reductions accumulate into
/// fixed-size chunks and merge chunk partials in ascending chunk order, so a
/// result never depends on how chunks were scheduled across worker threads.
struct Kahan
{
    double sum = 0.0;
    double comp = 0.0;

    void add(double v)
    {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }

    void merge(const Kahan &other)
    {
        add(other.sum);
        comp += other.comp;
    }

    double value() const { return sum + comp; }
};

} // namespace cellfree

#endif // CELLFREE_ACCUM_HPP
