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

#ifndef CELLFREE_RNG_HPP
#define CELLFREE_RNG_HPP

#include "cellfree/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace cellfree
{

// splitmix64 step, used to hash (seed, stream tag) tuples into engine seeds.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and up to three tags.
/// Every randomized stage of the simulator owns a distinct tag so that streams
/// never overlap and results stay reproducible under reordering of stages.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0)
{
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ splitmix64(a ^ 0x243f6a8885a308d3ULL));
    h = splitmix64(h ^ splitmix64(b ^ 0x13198a2e03707344ULL));
    h = splitmix64(h ^ splitmix64(c ^ 0xa4093822299f31d0ULL));
    return h;
}

// Stream tags for the simulator stages.
namespace stream
{
constexpr std::uint64_t ap_positions = 1;
constexpr std::uint64_t ue_positions = 2;
constexpr std::uint64_t shadow_ap = 3;
constexpr std::uint64_t shadow_ue = 4;
constexpr std::uint64_t pilots = 5;
constexpr std::uint64_t channels = 6;
constexpr std::uint64_t rzf_norm = 7;
constexpr std::uint64_t snapshot = 8;
constexpr std::uint64_t mc_chunk = 9;
} // namespace stream

/// Deterministic random stream: std::mt19937_64 raw bits with hand-rolled
/// uniform and Box-Muller transforms, so draws do not depend on the standard
/// library's unspecified distribution algorithms.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t bits() { return engine_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1], safe as a log argument
    double uniform_pos() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    double normal()
    {
        if (have_spare_)
        {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double phi = 2.0 * M_PI * uniform();
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

    // circularly-symmetric complex Gaussian with E{|x|^2} = var
    Complex cnormal(double var = 1.0)
    {
        const double r = std::sqrt(-std::log(uniform_pos()) * var);
        const double phi = 2.0 * M_PI * uniform();
        return Complex(r * std::cos(phi), r * std::sin(phi));
    }

    void fill_normal(Eigen::Ref<Matrix> m)
    {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                m(i, j) = normal();
    }

    void fill_cnormal(Eigen::Ref<CMatrix> m, double var = 1.0)
    {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                m(i, j) = cnormal(var);
    }

    /// Fisher-Yates shuffle of 0..n-1.
    std::vector<int> permutation(int n)
    {
        std::vector<int> p(n);
        for (int i = 0; i < n; ++i)
            p[i] = i;
        for (int i = n - 1; i > 0; --i)
        {
            const int j = static_cast<int>(below(static_cast<std::uint64_t>(i) + 1));
            std::swap(p[i], p[j]);
        }
        return p;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace cellfree

#endif // CELLFREE_RNG_HPP
