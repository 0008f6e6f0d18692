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

#ifndef CELLFREE_PRECODING_HPP
#define CELLFREE_PRECODING_HPP

#include "cellfree/channel.hpp"
#include "cellfree/geometry.hpp"
#include "cellfree/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace cellfree
{

// Gram matrices are inverted through an eigendecomposition; beyond this
// condition number the matrix is treated as rank deficient.
constexpr double kGramConditionLimit = 1e12;

/// Solves G X = B for Hermitian positive definite G through a rank-revealing
/// eigendecomposition. Throws RankDeficientError when the condition number
/// exceeds kGramConditionLimit.
CMatrix solve_gram(const CMatrix &gram, const CMatrix &rhs);

/// Per-AP precoding vectors for one coherence block. MRT/FZF/PZF/PPZF build
/// one vector per pilot (column i serves every UE on pilot i); RZF builds one
/// vector per UE. Every vector satisfies E{||w||^2} = 1 under the estimate
/// distribution.
struct PrecoderSet
{
    Scheme scheme = Scheme::MRT;
    std::vector<CMatrix> w; // per AP: M x tau_p, or M x K for RZF
    Eigen::MatrixXi delta;  // L x K, 1 iff UE k in S_l
    std::vector<int> tau_strong;
    std::vector<IndexSet> zf_aps;  // Z_k
    std::vector<IndexSet> mrt_aps; // M_k

    bool pilot_indexed() const { return scheme != Scheme::RZF; }

    /// Column used by AP l towards UE k.
    const CMatrix::ConstColXpr column_for_ue(int l, int k, const Snapshot &snap) const
    {
        const int j = pilot_indexed() ? snap.pilot_of_ue[static_cast<size_t>(k)] : k;
        return w[static_cast<size_t>(l)].col(j);
    }
};

// Single-vector constructions, one per scheme.
CVector mrt(const ChannelState &ch, int l, int pilot);
CVector fzf(const ChannelState &ch, int l, int pilot);
CVector pzf(const ChannelState &ch, const Snapshot &snap, int l, int pilot);
CVector ppzf_mrt(const ChannelState &ch, const Snapshot &snap, int l, int pilot);

/// RZF direction with a precomputed normalization constant (the root mean
/// square norm of the unnormalized direction, see rzf_normalization).
/// rho_reg supplies the per-(AP, UE) regularization coefficients; UEs with
/// rho_reg(l,k) = 0 are excluded before the inversion.
CVector rzf(const ChannelState &ch, const Snapshot &snap, const Matrix &rho_reg, int l, int ue,
            double norm_const);

/// Monte-Carlo estimate of sqrt(E{||Hhat (Hhat^H Hhat + P^-1)^-1 e_k||^2}),
/// drawn from the snapshot's estimate statistics. Entries for UEs with
/// rho_reg(l,k) = 0 are left at zero.
Matrix rzf_normalization(const Snapshot &snap, const Matrix &rho_reg, int n_draws,
                         std::uint64_t seed);

/// All precoders of one AP for one coherence block; shares one Gram
/// factorization across pilots.
CMatrix build_ap_precoders(Scheme scheme, const ChannelState &ch, const Snapshot &snap, int l,
                           const Matrix *rho_reg = nullptr, const Matrix *rzf_norm = nullptr);

/// Same construction from raw per-AP blocks; h_hat_l may be null for the
/// pilot-indexed schemes. This is the Monte-Carlo hot path.
CMatrix ap_precoders_from_blocks(Scheme scheme, const CMatrix &h_bar_l, const CMatrix *h_hat_l,
                                 const EstimatorStats &stats, const Snapshot &snap, int l,
                                 const Matrix *rho_reg = nullptr,
                                 const Matrix *rzf_norm = nullptr);

PrecoderSet build_precoders(Scheme scheme, const ChannelState &ch, const Snapshot &snap,
                            const Matrix *rho_reg = nullptr, const Matrix *rzf_norm = nullptr);

} // namespace cellfree

#endif // CELLFREE_PRECODING_HPP
