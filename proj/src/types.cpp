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

#include "cellfree/types.hpp"

#include <algorithm>

namespace cellfree
{

std::string to_string(Scheme s)
{
    switch (s)
    {
    case Scheme::MRT:
        return "mrt";
    case Scheme::FZF:
        return "fzf";
    case Scheme::PZF:
        return "pzf";
    case Scheme::PPZF:
        return "ppzf";
    case Scheme::RZF:
        return "rzf";
    }
    return "?";
}

std::string to_string(Policy p)
{
    return p == Policy::Heuristic ? "heuristic" : "maxmin";
}

static std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

Scheme scheme_from_string(const std::string &name)
{
    const std::string n = lower(name);
    if (n == "mrt")
        return Scheme::MRT;
    if (n == "fzf")
        return Scheme::FZF;
    if (n == "pzf")
        return Scheme::PZF;
    if (n == "ppzf")
        return Scheme::PPZF;
    if (n == "rzf")
        return Scheme::RZF;
    throw std::invalid_argument("unknown scheme: " + name);
}

Policy policy_from_string(const std::string &name)
{
    const std::string n = lower(name);
    if (n == "heuristic")
        return Policy::Heuristic;
    if (n == "maxmin")
        return Policy::MaxMin;
    throw std::invalid_argument("unknown policy: " + name);
}

} // namespace cellfree
