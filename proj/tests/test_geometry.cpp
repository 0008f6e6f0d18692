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

#include "cellfree/geometry.hpp"
#include "cellfree/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace cellfree;

TEST_CASE("wrap-around distance")
{
    CHECK(wrap_distance(0, 0, 999, 0, 1000, 0) == doctest::Approx(1.0));
    CHECK(wrap_distance(3, 7, 3, 7, 1000, 8.5) == doctest::Approx(8.5));
    CHECK(wrap_distance(0, 0, 500, 500, 1000, 0) == doctest::Approx(500 * std::sqrt(2.0)));
    // wrap in both axes
    CHECK(wrap_distance(1, 1, 999, 999, 1000, 0) == doctest::Approx(2 * std::sqrt(2.0)));
}

TEST_CASE("pathloss model")
{
    CHECK(pathloss_db(1.0) == doctest::Approx(-30.5));
    CHECK(pathloss_db(10.0) == doctest::Approx(-67.2));
}

TEST_CASE("normalized transmit powers")
{
    NetworkConfig cfg;
    cfg.ap_power_mw = 200.0;
    cfg.ue_power_mw = 100.0;
    cfg.noise_dbm = -92.0;
    CHECK(cfg.ap_power_normalized() == doctest::Approx(3.1698e11).epsilon(1e-3));
    CHECK(cfg.ue_power_normalized() == doctest::Approx(std::pow(10.0, 11.2)).epsilon(1e-9));
}

TEST_CASE("pilot assignment")
{
    NetworkConfig cfg;
    cfg.num_aps = 4;
    cfg.antennas_per_ap = 4;

    SUBCASE("no reuse when tau_p = K")
    {
        cfg.num_ues = 6;
        cfg.pilot_len = 6;
        const auto pilots = assign_pilots(cfg, 3);
        std::set<int> used(pilots.begin(), pilots.end());
        CHECK(used.size() == 6);
    }
    SUBCASE("full contamination when tau_p = 1")
    {
        cfg.num_ues = 5;
        cfg.pilot_len = 1;
        const auto pilots = assign_pilots(cfg, 3);
        for (int p : pilots)
            CHECK(p == 0);
    }
    SUBCASE("every pilot used at least once")
    {
        cfg.num_ues = 11;
        cfg.pilot_len = 4;
        for (std::uint64_t seed = 0; seed < 50; ++seed)
        {
            const auto pilots = assign_pilots(cfg, seed);
            std::set<int> used(pilots.begin(), pilots.end());
            CHECK(used.size() == 4);
        }
    }
}

TEST_CASE("co-pilot sets from a fixed assignment")
{
    // assignment (1,2,1,2) -> P_1 = {1,3}, P_2 = {2,4} in 1-based terms
    Matrix beta = Matrix::Constant(2, 4, 1e-8);
    const auto snap = [&] {
        NetworkConfig cfg;
        cfg.num_aps = 2;
        cfg.num_ues = 4;
        cfg.antennas_per_ap = 4;
        cfg.pilot_len = 2;
        Snapshot s;
        s.cfg = cfg;
        s.beta = beta;
        s.pilot_of_ue = {0, 1, 0, 1};
        s.ues_on_pilot = {{0, 2}, {1, 3}};
        s.copilot_ues = {{0, 2}, {1, 3}, {0, 2}, {1, 3}};
        return s;
    }();
    CHECK(snap.copilot_ues[0] == IndexSet{0, 2});
    CHECK(snap.copilot_ues[1] == IndexSet{1, 3});
}

TEST_CASE("AP clustering prefix rule")
{
    Matrix beta(3, 1);
    beta << 0.5, 0.3, 0.2;

    SUBCASE("kappa = 1 keeps all APs")
    {
        const auto clusters = cluster_aps(beta, 1.0);
        CHECK(clusters[0] == IndexSet{0, 1, 2});
    }
    SUBCASE("kappa = 0 keeps the strongest AP only")
    {
        const auto clusters = cluster_aps(beta, 0.0);
        CHECK(clusters[0] == IndexSet{0});
    }
    SUBCASE("kappa = 0.75 keeps the smallest prefix")
    {
        const auto clusters = cluster_aps(beta, 0.75);
        CHECK(clusters[0] == IndexSet{0, 1});
    }
}

TEST_CASE("UE grouping prefix rule and closure")
{
    NetworkConfig cfg;
    cfg.num_aps = 1;
    cfg.num_ues = 3;
    cfg.antennas_per_ap = 8;
    cfg.pilot_len = 3;

    Snapshot snap;
    snap.cfg = cfg;
    snap.beta = Matrix(1, 3);
    snap.beta << 0.9, 0.08, 0.02;
    snap.pilot_of_ue = {0, 1, 2};
    snap.ues_on_pilot = {{0}, {1}, {2}};
    snap.copilot_ues = {{0}, {1}, {2}};
    snap.ap_cluster = {{0}, {0}, {0}};
    snap.served_ues = {{0, 1, 2}};
    snap.rho_max = Vector::Constant(1, 1.0);
    snap.p_ue = Vector::Constant(3, 1.0);

    SUBCASE("upsilon = 0.95 takes the smallest prefix")
    {
        group_ues(snap, 0.95);
        CHECK(snap.strong_ues[0] == IndexSet{0, 1});
        CHECK(snap.weak_ues[0] == IndexSet{2});
        CHECK(snap.tau_strong[0] == 2);
    }
    SUBCASE("upsilon = 0 empties the strong set")
    {
        group_ues(snap, 0.0);
        CHECK(snap.strong_ues[0].empty());
        CHECK(snap.tau_strong[0] == 0);
    }
    SUBCASE("upsilon = 1 takes everyone")
    {
        group_ues(snap, 1.0);
        CHECK(snap.strong_ues[0] == IndexSet{0, 1, 2});
    }
}

TEST_CASE("grouping respects the antenna budget and co-pilot closure")
{
    NetworkConfig cfg;
    cfg.num_aps = 6;
    cfg.antennas_per_ap = 3; // tight: tau_strong must stay <= 2
    cfg.num_ues = 12;
    cfg.pilot_len = 6;
    cfg.area_side_m = 300;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const Snapshot snap = generate_snapshot(cfg, seed);
        for (int l = 0; l < cfg.num_aps; ++l)
        {
            CHECK(snap.tau_strong[static_cast<size_t>(l)] <= cfg.antennas_per_ap - 1);
            for (int k : snap.strong_ues[static_cast<size_t>(l)])
                for (int t : snap.copilot_ues[static_cast<size_t>(k)])
                {
                    if (snap.serves(l, t))
                        CHECK(snap.delta(l, t) == 1);
                }
            // S and W partition the served set
            CHECK(snap.strong_ues[static_cast<size_t>(l)].size() +
                      snap.weak_ues[static_cast<size_t>(l)].size() ==
                  snap.served_ues[static_cast<size_t>(l)].size());
        }
        for (int k = 0; k < cfg.num_ues; ++k)
            CHECK(snap.zf_aps[static_cast<size_t>(k)].size() +
                      snap.mrt_aps[static_cast<size_t>(k)].size() ==
                  snap.ap_cluster[static_cast<size_t>(k)].size());
    }
}

TEST_CASE("single-antenna APs cannot zero-force")
{
    NetworkConfig cfg;
    cfg.num_aps = 8;
    cfg.antennas_per_ap = 1;
    cfg.num_ues = 4;
    cfg.pilot_len = 2;
    const Snapshot snap = generate_snapshot(cfg, 5);
    for (int l = 0; l < cfg.num_aps; ++l)
        CHECK(snap.strong_ues[static_cast<size_t>(l)].empty());
    CHECK(!snap.warnings.empty());
}

TEST_CASE("shadowing weight 1 gives pure per-AP shadowing")
{
    NetworkConfig cfg;
    cfg.num_aps = 5;
    cfg.antennas_per_ap = 4;
    cfg.num_ues = 4;
    cfg.pilot_len = 2;
    cfg.shadow_weight = 1.0;
    const Snapshot snap = generate_snapshot(cfg, 11);
    for (int l = 0; l < cfg.num_aps; ++l)
        for (int k = 1; k < cfg.num_ues; ++k)
            CHECK(snap.shadow_z(l, k) == doctest::Approx(snap.shadow_z(l, 0)).epsilon(1e-12));
}

TEST_CASE("shadowing spatial correlation follows the distance kernel")
{
    // with shadow_weight = 1, z(l, 0) = a_l; bin AP pairs by distance and
    // compare the empirical product mean with 2^(-d / 9)
    NetworkConfig cfg;
    cfg.num_aps = 16;
    cfg.antennas_per_ap = 4;
    cfg.num_ues = 4;
    cfg.pilot_len = 2;
    cfg.shadow_weight = 1.0;
    cfg.area_side_m = 70.0;

    constexpr int n_bins = 8;
    constexpr double bin_width = 3.0;
    std::vector<double> sum(n_bins, 0.0), count(n_bins, 0.0);
    for (std::uint64_t seed = 0; seed < 1200; ++seed)
    {
        const Snapshot snap = generate_snapshot(cfg, seed);
        for (int l = 0; l < cfg.num_aps; ++l)
            for (int i = l + 1; i < cfg.num_aps; ++i)
            {
                const double d = wrap_distance(snap.ap_positions(l, 0), snap.ap_positions(l, 1),
                                               snap.ap_positions(i, 0), snap.ap_positions(i, 1),
                                               cfg.area_side_m, 0.0);
                const int bin = static_cast<int>(d / bin_width);
                if (bin < n_bins)
                {
                    sum[static_cast<size_t>(bin)] += snap.shadow_z(l, 0) * snap.shadow_z(i, 0);
                    count[static_cast<size_t>(bin)] += 1.0;
                }
            }
    }
    for (int bin = 0; bin < n_bins; ++bin)
    {
        REQUIRE(count[static_cast<size_t>(bin)] > 500);
        const double expected = std::exp2(-(bin + 0.5) * bin_width / 9.0);
        const double measured = sum[static_cast<size_t>(bin)] / count[static_cast<size_t>(bin)];
        CHECK(std::abs(measured - expected) < 0.05);
    }
}

TEST_CASE("snapshot determinism")
{
    NetworkConfig cfg;
    cfg.num_aps = 6;
    cfg.antennas_per_ap = 4;
    cfg.num_ues = 5;
    cfg.pilot_len = 3;
    const Snapshot a = generate_snapshot(cfg, 42);
    const Snapshot b = generate_snapshot(cfg, 42);
    CHECK((a.beta - b.beta).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.ap_positions - b.ap_positions).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.pilot_of_ue == b.pilot_of_ue);
    const Snapshot c = generate_snapshot(cfg, 43);
    CHECK((a.beta - c.beta).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("snapshot JSON dump")
{
    NetworkConfig cfg;
    cfg.num_aps = 3;
    cfg.antennas_per_ap = 4;
    cfg.num_ues = 3;
    cfg.pilot_len = 2;
    const Snapshot snap = generate_snapshot(cfg, 9);
    const std::string text = snapshot_to_json_text(snap);
    CHECK(text.find("beta_db") != std::string::npos);
    CHECK(text.find("pilot_index") != std::string::npos);
}

TEST_CASE("config validation refuses bad setups")
{
    NetworkConfig cfg;
    cfg.num_aps = 2;
    cfg.antennas_per_ap = 2;
    cfg.num_ues = 8;
    cfg.pilot_len = 4;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument); // L*M <= K

    cfg.num_aps = 10;
    cfg.pilot_len = 8;
    CHECK_NOTHROW(cfg.validate());
    cfg.pilot_len = 9;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument); // tau_p > K
}
