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

#include "cellfree/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cellfree
{

CMatrix solve_gram(const CMatrix &gram, const CMatrix &rhs)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
    const Vector &lambda = eig.eigenvalues();
    const double lmax = lambda(lambda.size() - 1);
    const double lmin = lambda(0);
    if (!(lmin > 0.0) || lmax / lmin > kGramConditionLimit)
        throw RankDeficientError(lmin > 0.0 ? lmax / lmin
                                            : std::numeric_limits<double>::infinity());
    const CMatrix projected = eig.eigenvectors().adjoint() * rhs;
    return eig.eigenvectors() *
           (lambda.cwiseInverse().cast<Complex>().asDiagonal() * projected);
}

static void require_pilot_in_use(const ChannelState &ch, int pilot)
{
    if (pilot < 0 || pilot >= static_cast<int>(ch.stats.pilot_in_use.size()) ||
        !ch.stats.pilot_in_use[static_cast<size_t>(pilot)])
        throw std::invalid_argument("pilot " + std::to_string(pilot + 1) + " is unused");
}

// One MRT column: h_bar e_i / sqrt(M theta).
static CVector mrt_column(const CMatrix &h_bar, const EstimatorStats &st, int l, int pilot)
{
    const double m = static_cast<double>(h_bar.rows());
    return h_bar.col(pilot) / std::sqrt(m * st.theta(l, pilot));
}

// Normalized zero-forcing columns over a pilot subset: column j is
//   h_bar E (E^H h_bar^H h_bar E)^{-1} eps_j * sqrt((M - tau_S) theta_j),
// unit mean-square norm by the Wishart inverse-moment identity.
static CMatrix zf_columns(const CMatrix &h_bar, const EstimatorStats &st, int l,
                          const IndexSet &pilots)
{
    const int m = static_cast<int>(h_bar.rows());
    const int tau_s = static_cast<int>(pilots.size());
    if (m < tau_s + 1)
        throw InsufficientDofError(m, tau_s);

    CMatrix sub(m, tau_s);
    for (int j = 0; j < tau_s; ++j)
        sub.col(j) = h_bar.col(pilots[static_cast<size_t>(j)]);
    const CMatrix gram = sub.adjoint() * sub;
    const CMatrix inv = solve_gram(gram, CMatrix::Identity(tau_s, tau_s));
    CMatrix w = sub * inv;
    for (int j = 0; j < tau_s; ++j)
        w.col(j) *= std::sqrt((m - tau_s) * st.theta(l, pilots[static_cast<size_t>(j)]));
    return w;
}

CVector mrt(const ChannelState &ch, int l, int pilot)
{
    require_pilot_in_use(ch, pilot);
    return mrt_column(ch.h_bar[static_cast<size_t>(l)], ch.stats, l, pilot);
}

CVector fzf(const ChannelState &ch, int l, int pilot)
{
    require_pilot_in_use(ch, pilot);
    const CMatrix &h_bar = ch.h_bar[static_cast<size_t>(l)];
    const int tau_p = static_cast<int>(h_bar.cols());
    if (static_cast<int>(h_bar.rows()) <= tau_p)
        throw InsufficientDofError(static_cast<int>(h_bar.rows()), tau_p);
    IndexSet all(static_cast<size_t>(tau_p));
    std::iota(all.begin(), all.end(), 0);
    return zf_columns(h_bar, ch.stats, l, all).col(pilot);
}

CVector pzf(const ChannelState &ch, const Snapshot &snap, int l, int pilot)
{
    require_pilot_in_use(ch, pilot);
    const IndexSet &strong = snap.strong_pilots[static_cast<size_t>(l)];
    const auto it = std::find(strong.begin(), strong.end(), pilot);
    if (it == strong.end())
        throw std::invalid_argument("pzf: pilot " + std::to_string(pilot + 1) +
                                    " is not a strong pilot at AP " + std::to_string(l));
    const int j = static_cast<int>(it - strong.begin());
    return zf_columns(ch.h_bar[static_cast<size_t>(l)], ch.stats, l, strong).col(j);
}

CVector ppzf_mrt(const ChannelState &ch, const Snapshot &snap, int l, int pilot)
{
    require_pilot_in_use(ch, pilot);
    const IndexSet &strong = snap.strong_pilots[static_cast<size_t>(l)];
    if (std::find(strong.begin(), strong.end(), pilot) != strong.end())
        throw std::invalid_argument("ppzf_mrt: pilot " + std::to_string(pilot + 1) +
                                    " belongs to the strong set at AP " + std::to_string(l));
    const CMatrix &h_bar = ch.h_bar[static_cast<size_t>(l)];
    const int m = static_cast<int>(h_bar.rows());
    const int tau_s = static_cast<int>(strong.size());
    if (tau_s == 0)
        return mrt_column(h_bar, ch.stats, l, pilot); // B = I, plain MRT
    if (m < tau_s + 1)
        throw InsufficientDofError(m, tau_s);

    CMatrix sub(m, tau_s);
    for (int j = 0; j < tau_s; ++j)
        sub.col(j) = h_bar.col(strong[static_cast<size_t>(j)]);
    const CMatrix gram = sub.adjoint() * sub;
    const CVector cross = sub.adjoint() * h_bar.col(pilot);
    const CVector projected = h_bar.col(pilot) - sub * solve_gram(gram, cross);
    return projected / std::sqrt((m - tau_s) * ch.stats.theta(l, pilot));
}

// Unnormalized RZF directions for all active UEs of one AP:
//   Hhat_D (Hhat_D^H Hhat_D + P_D^{-1})^{-1}
static CMatrix rzf_directions(const CMatrix &h_hat_active, const Vector &rho_active)
{
    const int n_active = static_cast<int>(h_hat_active.cols());
    CMatrix reg = h_hat_active.adjoint() * h_hat_active;
    reg += rho_active.cwiseInverse().cast<Complex>().asDiagonal();
    return h_hat_active * solve_gram(reg, CMatrix::Identity(n_active, n_active));
}

CVector rzf(const ChannelState &ch, const Snapshot &snap, const Matrix &rho_reg, int l, int ue,
            double norm_const)
{
    if (!(rho_reg(l, ue) > 0.0))
        throw std::invalid_argument("rzf: UE " + std::to_string(ue) +
                                    " has zero power at AP " + std::to_string(l));
    if (!(norm_const > 0.0))
        throw std::invalid_argument("rzf: normalization constant must be positive");

    IndexSet active;
    for (int k = 0; k < snap.num_ues(); ++k)
        if (rho_reg(l, k) > 0.0)
            active.push_back(k);
    const int n_active = static_cast<int>(active.size());
    CMatrix h_hat(snap.antennas(), n_active);
    Vector rho_active(n_active);
    int pos = -1;
    for (int j = 0; j < n_active; ++j)
    {
        h_hat.col(j) = ch.h_hat[static_cast<size_t>(l)].col(active[static_cast<size_t>(j)]);
        rho_active(j) = rho_reg(l, active[static_cast<size_t>(j)]);
        if (active[static_cast<size_t>(j)] == ue)
            pos = j;
    }
    return rzf_directions(h_hat, rho_active).col(pos) / norm_const;
}

Matrix rzf_normalization(const Snapshot &snap, const Matrix &rho_reg, int n_draws,
                         std::uint64_t seed)
{
    if (n_draws < 1)
        throw std::invalid_argument("rzf_normalization: n_draws must be >= 1");
    const int L = snap.num_aps();
    const int K = snap.num_ues();
    const int M = snap.antennas();
    const int tau_p = snap.pilot_len();
    const EstimatorStats st = estimator_stats(snap);

    Matrix norm = Matrix::Zero(L, K);
    for (int l = 0; l < L; ++l)
    {
        IndexSet active;
        for (int k = 0; k < K; ++k)
            if (rho_reg(l, k) > 0.0)
                active.push_back(k);
        if (active.empty())
            continue;
        const int n_active = static_cast<int>(active.size());
        Vector rho_active(n_active);
        for (int j = 0; j < n_active; ++j)
            rho_active(j) = rho_reg(l, active[static_cast<size_t>(j)]);

        Rng rng(derive_seed(seed, stream::rzf_norm, static_cast<std::uint64_t>(l)));
        CMatrix h_bar(M, tau_p);
        CMatrix h_hat(M, n_active);
        Vector acc = Vector::Zero(n_active);
        for (int draw = 0; draw < n_draws; ++draw)
        {
            for (int i = 0; i < tau_p; ++i)
                for (int m = 0; m < M; ++m)
                    h_bar(m, i) = rng.cnormal(st.theta(l, i));
            for (int j = 0; j < n_active; ++j)
            {
                const int k = active[static_cast<size_t>(j)];
                h_hat.col(j) =
                    st.c(l, k) * h_bar.col(snap.pilot_of_ue[static_cast<size_t>(k)]);
            }
            acc += rzf_directions(h_hat, rho_active).colwise().squaredNorm().transpose();
        }
        for (int j = 0; j < n_active; ++j)
            norm(l, active[static_cast<size_t>(j)]) = std::sqrt(acc(j) / n_draws);
    }
    return norm;
}

CMatrix build_ap_precoders(Scheme scheme, const ChannelState &ch, const Snapshot &snap, int l,
                           const Matrix *rho_reg, const Matrix *rzf_norm)
{
    const CMatrix *h_hat = ch.h_hat.empty() ? nullptr : &ch.h_hat[static_cast<size_t>(l)];
    return ap_precoders_from_blocks(scheme, ch.h_bar[static_cast<size_t>(l)], h_hat, ch.stats,
                                    snap, l, rho_reg, rzf_norm);
}

CMatrix ap_precoders_from_blocks(Scheme scheme, const CMatrix &h_bar, const CMatrix *h_hat_l,
                                 const EstimatorStats &stats, const Snapshot &snap, int l,
                                 const Matrix *rho_reg, const Matrix *rzf_norm)
{
    const int m = static_cast<int>(h_bar.rows());
    const int tau_p = static_cast<int>(h_bar.cols());

    auto mrt_all = [&]() {
        CMatrix w = CMatrix::Zero(m, tau_p);
        for (int i = 0; i < tau_p; ++i)
            if (stats.pilot_in_use[static_cast<size_t>(i)])
                w.col(i) = mrt_column(h_bar, stats, l, i);
        return w;
    };

    switch (scheme)
    {
    case Scheme::MRT:
        return mrt_all();

    case Scheme::FZF:
    {
        if (m <= tau_p)
            throw InsufficientDofError(m, tau_p);
        IndexSet all(static_cast<size_t>(tau_p));
        std::iota(all.begin(), all.end(), 0);
        return zf_columns(h_bar, stats, l, all);
    }

    case Scheme::PZF:
    {
        const IndexSet &strong = snap.strong_pilots[static_cast<size_t>(l)];
        CMatrix w = mrt_all();
        if (!strong.empty())
        {
            const CMatrix zf = zf_columns(h_bar, stats, l, strong);
            for (size_t j = 0; j < strong.size(); ++j)
                w.col(strong[j]) = zf.col(static_cast<Eigen::Index>(j));
        }
        return w;
    }

    case Scheme::PPZF:
    {
        const IndexSet &strong = snap.strong_pilots[static_cast<size_t>(l)];
        const int tau_s = static_cast<int>(strong.size());
        if (tau_s == 0)
            return mrt_all();
        if (m < tau_s + 1)
            throw InsufficientDofError(m, tau_s);

        CMatrix w = CMatrix::Zero(m, tau_p);
        const CMatrix zf = zf_columns(h_bar, stats, l, strong);
        std::vector<char> is_strong(static_cast<size_t>(tau_p), 0);
        for (size_t j = 0; j < strong.size(); ++j)
        {
            w.col(strong[j]) = zf.col(static_cast<Eigen::Index>(j));
            is_strong[static_cast<size_t>(strong[j])] = 1;
        }

        IndexSet weak_pilots;
        for (int i = 0; i < tau_p; ++i)
            if (stats.pilot_in_use[static_cast<size_t>(i)] &&
                !is_strong[static_cast<size_t>(i)])
                weak_pilots.push_back(i);
        if (!weak_pilots.empty())
        {
            CMatrix sub(m, tau_s);
            for (int j = 0; j < tau_s; ++j)
                sub.col(j) = h_bar.col(strong[static_cast<size_t>(j)]);
            const CMatrix gram = sub.adjoint() * sub;
            CMatrix cross(tau_s, static_cast<int>(weak_pilots.size()));
            for (size_t j = 0; j < weak_pilots.size(); ++j)
                cross.col(static_cast<Eigen::Index>(j)) =
                    sub.adjoint() * h_bar.col(weak_pilots[j]);
            const CMatrix coeff = solve_gram(gram, cross);
            for (size_t j = 0; j < weak_pilots.size(); ++j)
            {
                const int pilot = weak_pilots[j];
                w.col(pilot) =
                    (h_bar.col(pilot) - sub * coeff.col(static_cast<Eigen::Index>(j))) /
                    std::sqrt((m - tau_s) * stats.theta(l, pilot));
            }
        }
        return w;
    }

    case Scheme::RZF:
    {
        if (rho_reg == nullptr || rzf_norm == nullptr)
            throw std::invalid_argument("RZF needs regularization powers and normalization");
        if (h_hat_l == nullptr)
            throw std::invalid_argument("RZF needs the channel estimates");
        const int K = snap.num_ues();
        IndexSet active;
        for (int k = 0; k < K; ++k)
            if ((*rho_reg)(l, k) > 0.0)
                active.push_back(k);
        CMatrix w = CMatrix::Zero(m, K);
        if (active.empty())
            return w;
        const int n_active = static_cast<int>(active.size());
        CMatrix h_hat(m, n_active);
        Vector rho_active(n_active);
        for (int j = 0; j < n_active; ++j)
        {
            h_hat.col(j) = h_hat_l->col(active[static_cast<size_t>(j)]);
            rho_active(j) = (*rho_reg)(l, active[static_cast<size_t>(j)]);
        }
        const CMatrix dirs = rzf_directions(h_hat, rho_active);
        for (int j = 0; j < n_active; ++j)
        {
            const int k = active[static_cast<size_t>(j)];
            w.col(k) = dirs.col(j) / (*rzf_norm)(l, k);
        }
        return w;
    }
    }
    throw std::logic_error("unreachable");
}

PrecoderSet build_precoders(Scheme scheme, const ChannelState &ch, const Snapshot &snap,
                            const Matrix *rho_reg, const Matrix *rzf_norm)
{
    PrecoderSet set;
    set.scheme = scheme;
    set.delta = snap.delta;
    set.tau_strong = snap.tau_strong;
    set.zf_aps = snap.zf_aps;
    set.mrt_aps = snap.mrt_aps;
    set.w.reserve(static_cast<size_t>(snap.num_aps()));
    for (int l = 0; l < snap.num_aps(); ++l)
        set.w.push_back(build_ap_precoders(scheme, ch, snap, l, rho_reg, rzf_norm));
    return set;
}

} // namespace cellfree
