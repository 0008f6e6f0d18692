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

#include "cellfree/monte_carlo.hpp"

#include "cellfree/accum.hpp"
#include "cellfree/parallel.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace cellfree
{

namespace
{

// Per-UE raw moments of one chunk. The moment vector per realization is
//   v = (Re m1_kk, Im m1_kk, |m1_k0|^2, ..., |m1_k,K-1|^2)
// where m1_kt = sum_l sqrt(rho_lt) h_lk^H w_lt. The full second-moment matrix
// feeds the delta-method standard errors.
struct ChunkMoments
{
    Matrix sum;                // (K+2) x K, column per UE
    std::vector<Matrix> sum2;  // per UE: (K+2) x (K+2)

    void init(int K)
    {
        sum = Matrix::Zero(K + 2, K);
        sum2.assign(static_cast<size_t>(K), Matrix::Zero(K + 2, K + 2));
    }
};

struct GlobalMoments
{
    std::vector<std::vector<Kahan>> sum;               // per UE: K+2
    std::vector<std::vector<std::vector<Kahan>>> sum2; // per UE: (K+2)^2

    void init(int K)
    {
        sum.assign(static_cast<size_t>(K), std::vector<Kahan>(static_cast<size_t>(K + 2)));
        sum2.assign(static_cast<size_t>(K),
                    std::vector<std::vector<Kahan>>(
                        static_cast<size_t>(K + 2),
                        std::vector<Kahan>(static_cast<size_t>(K + 2))));
    }

    void merge(const ChunkMoments &chunk)
    {
        const int K = static_cast<int>(sum.size());
        for (int k = 0; k < K; ++k)
        {
            for (int i = 0; i < K + 2; ++i)
                sum[static_cast<size_t>(k)][static_cast<size_t>(i)].add(chunk.sum(i, k));
            const Matrix &s2 = chunk.sum2[static_cast<size_t>(k)];
            for (int i = 0; i < K + 2; ++i)
                for (int j = 0; j <= i; ++j)
                    sum2[static_cast<size_t>(k)][static_cast<size_t>(i)][static_cast<size_t>(j)]
                        .add(s2(i, j));
        }
    }
};

} // namespace

std::vector<std::vector<SEResult>> monte_carlo_se(const Snapshot &snap,
                                                  const std::vector<McSchemeSpec> &specs,
                                                  const McOptions &opt)
{
    const int L = snap.num_aps();
    const int K = snap.num_ues();
    const int M = snap.antennas();
    const int n_specs = static_cast<int>(specs.size());
    if (n_specs == 0 || opt.n_realizations < 1)
        throw std::invalid_argument("monte_carlo_se: nothing to evaluate");

    const EstimatorStats stats = estimator_stats(snap);

    // upfront validation and per-spec constants
    std::vector<Matrix> sqrt_rho(static_cast<size_t>(n_specs));
    std::vector<Matrix> rho_reg(static_cast<size_t>(n_specs));
    std::vector<Matrix> rzf_norm(static_cast<size_t>(n_specs));
    bool any_rzf = false;
    for (int s = 0; s < n_specs; ++s)
    {
        const McSchemeSpec &spec = specs[static_cast<size_t>(s)];
        if (spec.rho.rows() != L || spec.rho.cols() != K)
            throw std::invalid_argument("monte_carlo_se: rho must be L x K");
        if (spec.scheme == Scheme::FZF && M <= snap.pilot_len())
            throw InsufficientDofError(M, snap.pilot_len());
        sqrt_rho[static_cast<size_t>(s)] = spec.rho.cwiseMax(0.0).cwiseSqrt();
        if (spec.scheme == Scheme::RZF)
        {
            any_rzf = true;
            rho_reg[static_cast<size_t>(s)] = spec.rho_reg.size() ? spec.rho_reg : spec.rho;
            rzf_norm[static_cast<size_t>(s)] =
                rzf_normalization(snap, rho_reg[static_cast<size_t>(s)], opt.rzf_norm_draws,
                                  derive_seed(opt.seed, stream::rzf_norm,
                                              static_cast<std::uint64_t>(s)));
        }
    }

    const int chunk_size = std::max(1, opt.chunk_size);
    const int n_chunks = (opt.n_realizations + chunk_size - 1) / chunk_size;

    std::vector<GlobalMoments> global(static_cast<size_t>(n_specs));
    for (auto &g : global)
        g.init(K);

    // chunks are merged strictly in index order; completed chunks park their
    // partials until their turn comes up
    std::mutex merge_mutex;
    std::map<int, std::vector<ChunkMoments>> parked;
    int next_to_merge = 0;

    parallel_for_index(n_chunks, std::max(1, opt.n_threads), [&](int c) {
        const int base = c * chunk_size;
        const int count = std::min(chunk_size, opt.n_realizations - base);

        Rng rng(derive_seed(opt.seed, stream::mc_chunk, static_cast<std::uint64_t>(c)));
        std::vector<CMatrix> h, h_bar;
        std::vector<CMatrix> h_hat;
        if (any_rzf)
            h_hat.assign(static_cast<size_t>(L), CMatrix(M, K));

        std::vector<ChunkMoments> moments(static_cast<size_t>(n_specs));
        for (auto &m : moments)
            m.init(K);

        CMatrix m1(K, K);
        Vector v(K + 2);
        for (int r = 0; r < count; ++r)
        {
            realize_channels_light(snap, rng, h, h_bar);
            if (any_rzf)
                for (int l = 0; l < L; ++l)
                    for (int k = 0; k < K; ++k)
                        h_hat[static_cast<size_t>(l)].col(k) =
                            stats.c(l, k) *
                            h_bar[static_cast<size_t>(l)].col(
                                snap.pilot_of_ue[static_cast<size_t>(k)]);

            for (int s = 0; s < n_specs; ++s)
            {
                const McSchemeSpec &spec = specs[static_cast<size_t>(s)];
                const Matrix &sr = sqrt_rho[static_cast<size_t>(s)];
                m1.setZero();
                for (int l = 0; l < L; ++l)
                {
                    const CMatrix *hat =
                        any_rzf ? &h_hat[static_cast<size_t>(l)] : nullptr;
                    const CMatrix w = ap_precoders_from_blocks(
                        spec.scheme, h_bar[static_cast<size_t>(l)], hat, stats, snap, l,
                        spec.scheme == Scheme::RZF ? &rho_reg[static_cast<size_t>(s)] : nullptr,
                        spec.scheme == Scheme::RZF ? &rzf_norm[static_cast<size_t>(s)]
                                                   : nullptr);
                    const CMatrix recv = h[static_cast<size_t>(l)].adjoint() * w; // K x cols
                    for (int t = 0; t < K; ++t)
                    {
                        const double a = sr(l, t);
                        if (a == 0.0)
                            continue;
                        const int col = spec.scheme == Scheme::RZF
                                            ? t
                                            : snap.pilot_of_ue[static_cast<size_t>(t)];
                        m1.col(t) += a * recv.col(col);
                    }
                }
                ChunkMoments &cm = moments[static_cast<size_t>(s)];
                for (int k = 0; k < K; ++k)
                {
                    v(0) = m1(k, k).real();
                    v(1) = m1(k, k).imag();
                    for (int t = 0; t < K; ++t)
                        v(2 + t) = std::norm(m1(k, t));
                    cm.sum.col(k) += v;
                    cm.sum2[static_cast<size_t>(k)]
                        .selfadjointView<Eigen::Lower>()
                        .rankUpdate(v);
                }
            }
        }

        std::lock_guard<std::mutex> lock(merge_mutex);
        parked.emplace(c, std::move(moments));
        while (!parked.empty() && parked.begin()->first == next_to_merge)
        {
            for (int s = 0; s < n_specs; ++s)
                global[static_cast<size_t>(s)].merge(parked.begin()->second[static_cast<size_t>(s)]);
            parked.erase(parked.begin());
            ++next_to_merge;
        }
    });

    // finalize: means, covariance of the means, delta-method errors
    const double n = static_cast<double>(opt.n_realizations);
    const double prelog_dlog = 1.0 / std::log(2.0);
    std::vector<std::vector<SEResult>> results(
        static_cast<size_t>(n_specs), std::vector<SEResult>(static_cast<size_t>(K)));
    for (int s = 0; s < n_specs; ++s)
    {
        for (int k = 0; k < K; ++k)
        {
            const auto &gsum = global[static_cast<size_t>(s)].sum[static_cast<size_t>(k)];
            const auto &gsum2 = global[static_cast<size_t>(s)].sum2[static_cast<size_t>(k)];
            Vector mean(K + 2);
            for (int i = 0; i < K + 2; ++i)
                mean(i) = gsum[static_cast<size_t>(i)].value() / n;
            Matrix cov(K + 2, K + 2);
            for (int i = 0; i < K + 2; ++i)
                for (int j = 0; j <= i; ++j)
                {
                    const double m2 =
                        gsum2[static_cast<size_t>(i)][static_cast<size_t>(j)].value() / n;
                    double c2 = m2 - mean(i) * mean(j);
                    cov(i, j) = cov(j, i) = c2;
                }
            if (n > 1.5)
                cov *= 1.0 / (n - 1.0); // covariance of the sample means
            else
                cov.setZero();

            const double num = mean(0) * mean(0) + mean(1) * mean(1);
            const double total2 = mean.tail(K).sum();
            const double den = total2 - num + 1.0;
            const double sinr = num / den;

            // gradients of SINR, CP, PU, UI w.r.t. the moment vector
            Vector g_sinr = Vector::Zero(K + 2);
            g_sinr(0) = 2.0 * mean(0) * (den + num) / (den * den);
            g_sinr(1) = 2.0 * mean(1) * (den + num) / (den * den);
            for (int t = 0; t < K; ++t)
                g_sinr(2 + t) = -num / (den * den);

            Vector g_cp = Vector::Zero(K + 2);
            g_cp(0) = 2.0 * mean(0);
            g_cp(1) = 2.0 * mean(1);

            Vector g_pu = Vector::Zero(K + 2);
            g_pu(0) = -2.0 * mean(0);
            g_pu(1) = -2.0 * mean(1);
            g_pu(2 + k) = 1.0;

            Vector g_ui = Vector::Zero(K + 2);
            for (int t = 0; t < K; ++t)
                if (t != k)
                    g_ui(2 + t) = 1.0;

            auto propagate = [&](const Vector &g) {
                const double var = g.dot(cov * g);
                return var > 0.0 ? std::sqrt(var) : 0.0;
            };

            SEResult &res = results[static_cast<size_t>(s)][static_cast<size_t>(k)];
            res.monte_carlo = true;
            res.sinr = sinr;
            res.se = se_from_sinr(sinr, snap.cfg);
            res.sinr_stderr = propagate(g_sinr);
            res.cp_stderr = propagate(g_cp);
            res.pu_stderr = propagate(g_pu);
            res.ui_stderr = propagate(g_ui);
            const double prelog = snap.cfg.dl_fraction *
                                  (1.0 - static_cast<double>(snap.cfg.pilot_len) /
                                             snap.cfg.coherence_len);
            res.se_stderr = prelog * prelog_dlog * res.sinr_stderr / (1.0 + sinr);
        }
    }
    return results;
}

SEResult sinr_monte_carlo(Scheme scheme, const Snapshot &snap, const Matrix &rho, int ue,
                          int n_realizations, std::uint64_t seed, int n_threads)
{
    if (n_realizations < 1000)
        throw std::invalid_argument("sinr_monte_carlo: need at least 1000 realizations");
    if (ue < 0 || ue >= snap.num_ues())
        throw std::invalid_argument("sinr_monte_carlo: bad UE index");
    McOptions opt;
    opt.n_realizations = n_realizations;
    opt.seed = seed;
    opt.n_threads = n_threads;
    std::vector<McSchemeSpec> specs(1);
    specs[0].scheme = scheme;
    specs[0].rho = rho;
    return monte_carlo_se(snap, specs, opt)[0][static_cast<size_t>(ue)];
}

} // namespace cellfree
