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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cellfree/channel.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace cellfree;

TEST_CASE("single-link estimator gain")
{
    // tau_p = 1, p = 1, beta = 1: gamma = tau_p p beta^2 / (tau_p p beta + 1) = 0.5
    const Snapshot snap = test::manual_snapshot(1, Matrix::Constant(1, 1, 1.0), {0}, 1, 1.0, 1.0);
    const EstimatorStats st = estimator_stats(snap);
    CHECK(st.gamma(0, 0) == doctest::Approx(0.5));
    CHECK(st.c(0, 0) == doctest::Approx(0.5));
    CHECK(st.theta(0, 0) == doctest::Approx(2.0)); // gamma / c^2
}

TEST_CASE("perfect CSI limit")
{
    // without contamination gamma -> beta as the pilot power grows
    const Snapshot snap =
        test::manual_snapshot(2, Matrix::Constant(1, 1, 2.5e-9), {0}, 1, 1e15, 1.0);
    const EstimatorStats st = estimator_stats(snap);
    CHECK(st.gamma(0, 0) == doctest::Approx(2.5e-9).epsilon(1e-5));
}

TEST_CASE("estimate statistics match the Monte-Carlo average")
{
    NetworkConfig cfg;
    cfg.num_aps = 2;
    cfg.antennas_per_ap = 4;
    cfg.num_ues = 3;
    cfg.pilot_len = 2;
    cfg.area_side_m = 300;
    const Snapshot snap = generate_snapshot(cfg, 7);
    const EstimatorStats st = estimator_stats(snap);

    const int n_draws = 100000;
    Matrix sum = Matrix::Zero(cfg.num_aps, cfg.num_ues);
    Matrix sum2 = Matrix::Zero(cfg.num_aps, cfg.num_ues);
    Rng rng(derive_seed(3, stream::channels));
    std::vector<CMatrix> h, h_bar;
    for (int n = 0; n < n_draws; ++n)
    {
        realize_channels_light(snap, rng, h, h_bar);
        for (int l = 0; l < cfg.num_aps; ++l)
            for (int k = 0; k < cfg.num_ues; ++k)
            {
                const double v =
                    (st.c(l, k) *
                     h_bar[static_cast<size_t>(l)].col(snap.pilot_of_ue[static_cast<size_t>(k)]))
                        .squaredNorm() /
                    cfg.antennas_per_ap;
                sum(l, k) += v;
                sum2(l, k) += v * v;
            }
    }
    for (int l = 0; l < cfg.num_aps; ++l)
        for (int k = 0; k < cfg.num_ues; ++k)
        {
            const double mean = sum(l, k) / n_draws;
            const double var = sum2(l, k) / n_draws - mean * mean;
            const double stderr_mean = std::sqrt(var / n_draws);
            CHECK(std::abs(mean - st.gamma(l, k)) <= 3.0 * stderr_mean);
        }
}

TEST_CASE("co-pilot estimates are proportional to machine precision")
{
    NetworkConfig cfg;
    cfg.num_aps = 3;
    cfg.antennas_per_ap = 4;
    cfg.num_ues = 6;
    cfg.pilot_len = 2;
    const Snapshot snap = generate_snapshot(cfg, 21);
    const ChannelState ch = realize_channels(snap, 22);
    for (int l = 0; l < cfg.num_aps; ++l)
        for (int k = 0; k < cfg.num_ues; ++k)
            for (int t : snap.copilot_ues[static_cast<size_t>(k)])
            {
                if (t == k)
                    continue;
                const double ratio = std::sqrt(snap.p_ue(k)) * snap.beta(l, k) /
                                     (std::sqrt(snap.p_ue(t)) * snap.beta(l, t));
                const double err = (ch.h_hat[static_cast<size_t>(l)].col(k) -
                                    ratio * ch.h_hat[static_cast<size_t>(l)].col(t))
                                       .norm();
                CHECK(err <= 1e-12 * ch.h_hat[static_cast<size_t>(l)].col(k).norm());
            }
}

TEST_CASE("estimates come from the correlated pilot block exactly")
{
    NetworkConfig cfg;
    cfg.num_aps = 2;
    cfg.antennas_per_ap = 3;
    cfg.num_ues = 4;
    cfg.pilot_len = 3;
    const Snapshot snap = generate_snapshot(cfg, 31);
    const ChannelState ch = realize_channels(snap, 32);
    for (int l = 0; l < cfg.num_aps; ++l)
        for (int k = 0; k < cfg.num_ues; ++k)
        {
            const CVector expected =
                ch.stats.c(l, k) *
                ch.h_bar[static_cast<size_t>(l)].col(snap.pilot_of_ue[static_cast<size_t>(k)]);
            CHECK((ch.h_hat[static_cast<size_t>(l)].col(k) - expected).norm() == 0.0);
        }
}

TEST_CASE("estimate and error are uncorrelated with the right variances")
{
    const double beta = 3.2e-9;
    const Snapshot snap =
        test::manual_snapshot(2, Matrix::Constant(1, 1, beta), {0}, 1, 2e11, 1.0);
    const EstimatorStats st = estimator_stats(snap);
    const int n_draws = 20000;

    Rng rng(derive_seed(5, stream::channels));
    std::vector<CMatrix> h, h_bar;
    Complex cross_sum = 0.0;
    double err_sq_sum = 0.0;
    double est_sq_sum = 0.0;
    for (int n = 0; n < n_draws; ++n)
    {
        realize_channels_light(snap, rng, h, h_bar);
        const CVector est = st.c(0, 0) * h_bar[0].col(0);
        const CVector err = h[0].col(0) - est;
        cross_sum += (est.adjoint() * err)(0);
        err_sq_sum += err.squaredNorm();
        est_sq_sum += est.squaredNorm();
    }
    const int M = 2;
    const double n_samples = static_cast<double>(n_draws) * M;
    const double mean_err_var = err_sq_sum / n_samples;
    const double mean_est_var = est_sq_sum / n_samples;
    // per-sample std of est * conj(err) is about sqrt(gamma (beta - gamma))
    const double cross_std = std::sqrt(st.gamma(0, 0) * (beta - st.gamma(0, 0)) / n_samples);
    CHECK(std::abs(cross_sum.real() / n_samples) <= 4.0 * cross_std);
    CHECK(std::abs(cross_sum.imag() / n_samples) <= 4.0 * cross_std);
    const double err_var_expected = beta - st.gamma(0, 0);
    CHECK(std::abs(mean_err_var - err_var_expected) <=
          4.0 * err_var_expected / std::sqrt(n_samples));
    CHECK(std::abs(mean_est_var - st.gamma(0, 0)) <=
          4.0 * st.gamma(0, 0) / std::sqrt(n_samples));
}

TEST_CASE("channel realizations are deterministic in the seed")
{
    NetworkConfig cfg;
    cfg.num_aps = 2;
    cfg.antennas_per_ap = 3;
    cfg.num_ues = 3;
    cfg.pilot_len = 2;
    const Snapshot snap = generate_snapshot(cfg, 50);
    const ChannelState a = realize_channels(snap, 51);
    const ChannelState b = realize_channels(snap, 51);
    const ChannelState c = realize_channels(snap, 52);
    CHECK((a.h[0] - b.h[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.h_bar[1] - b.h_bar[1]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.h[0] - c.h[0]).cwiseAbs().maxCoeff() > 0.0);
}
