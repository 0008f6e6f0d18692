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

#ifndef CELLFREE_VALIDATE_HPP
#define CELLFREE_VALIDATE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace cellfree
{

struct CheckResult
{
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs the runtime invariant suite: estimator identities, precoder
/// orthogonality, degenerations, power-control sanity and solver checks.
/// quick = true trims the Monte-Carlo draw counts.
std::vector<CheckResult> run_validation_suite(std::uint64_t seed, bool quick);

} // namespace cellfree

#endif // CELLFREE_VALIDATE_HPP
