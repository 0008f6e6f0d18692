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

#include "cellfree/geometry.hpp"
#include "cellfree/rng.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

namespace cellfree
{

bool Snapshot::serves(int l, int k) const
{
    const auto &cluster = ap_cluster[static_cast<size_t>(k)];
    return std::find(cluster.begin(), cluster.end(), l) != cluster.end();
}

double wrap_distance(double px, double py, double qx, double qy, double area_side,
                     double delta_h)
{
    // per-axis torus minimum equals the minimum over the nine images
    double dx = std::abs(px - qx);
    double dy = std::abs(py - qy);
    dx = std::min(dx, area_side - dx);
    dy = std::min(dy, area_side - dy);
    return std::sqrt(dx * dx + dy * dy + delta_h * delta_h);
}

double pathloss_db(double distance_m)
{
    return -30.5 - 36.7 * std::log10(distance_m);
}

std::vector<int> assign_pilots(const NetworkConfig &cfg, std::uint64_t seed)
{
    if (cfg.pilot_len > cfg.num_ues)
        throw std::invalid_argument("assign_pilots: tau_p must not exceed K");
    Rng rng(derive_seed(seed, stream::pilots));
    const std::vector<int> order = rng.permutation(cfg.num_ues);
    std::vector<int> pilot(static_cast<size_t>(cfg.num_ues), -1);
    for (int r = 0; r < cfg.num_ues; ++r)
    {
        const int ue = order[static_cast<size_t>(r)];
        if (r < cfg.pilot_len)
            pilot[static_cast<size_t>(ue)] = r; // each pilot used at least once
        else
            pilot[static_cast<size_t>(ue)] = static_cast<int>(rng.below(cfg.pilot_len));
    }
    return pilot;
}

std::vector<IndexSet> cluster_aps(const Matrix &beta, double kappa)
{
    const int L = static_cast<int>(beta.rows());
    const int K = static_cast<int>(beta.cols());
    std::vector<IndexSet> clusters(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k)
    {
        IndexSet &cluster = clusters[static_cast<size_t>(k)];
        if (kappa >= 1.0)
        {
            cluster.resize(static_cast<size_t>(L));
            std::iota(cluster.begin(), cluster.end(), 0);
            continue;
        }
        std::vector<int> order(static_cast<size_t>(L));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return beta(a, k) > beta(b, k); });
        const double total = beta.col(k).sum();
        const double target = kappa * total;
        double cum = 0.0;
        for (int idx : order)
        {
            cluster.push_back(idx);
            cum += beta(idx, k);
            if (cum >= target)
                break; // smallest non-empty prefix
        }
        std::sort(cluster.begin(), cluster.end());
    }
    return clusters;
}

void group_ues(Snapshot &snap, double upsilon)
{
    const int L = snap.num_aps();
    const int K = snap.num_ues();
    const int M = snap.antennas();

    snap.strong_ues.assign(static_cast<size_t>(L), {});
    snap.weak_ues.assign(static_cast<size_t>(L), {});
    snap.tau_strong.assign(static_cast<size_t>(L), 0);
    snap.strong_pilots.assign(static_cast<size_t>(L), {});
    snap.delta = Eigen::MatrixXi::Zero(L, K);

    for (int l = 0; l < L; ++l)
    {
        const IndexSet &served = snap.served_ues[static_cast<size_t>(l)];
        std::vector<char> in_strong(static_cast<size_t>(K), 0);

        if (M == 1 && upsilon > 0.0)
        {
            // a single antenna leaves no degrees of freedom for zero-forcing
            snap.warnings.push_back("AP " + std::to_string(l) +
                                    ": M=1 forces an empty strong set, PZF degenerates to MRT");
        }
        else if (!served.empty() && upsilon > 0.0)
        {
            if (upsilon >= 1.0)
            {
                for (int k : served)
                    in_strong[static_cast<size_t>(k)] = 1;
            }
            else
            {
                std::vector<int> order(served);
                std::stable_sort(order.begin(), order.end(),
                                 [&](int a, int b) { return snap.beta(l, a) > snap.beta(l, b); });
                double total = 0.0;
                for (int k : served)
                    total += snap.beta(l, k);
                const double target = upsilon * total;
                double cum = 0.0;
                for (int k : order)
                {
                    if (cum >= target)
                        break;
                    in_strong[static_cast<size_t>(k)] = 1;
                    cum += snap.beta(l, k);
                }
            }
            // close under co-pilot membership, restricted to served UEs
            for (int k : served)
                if (in_strong[static_cast<size_t>(k)])
                    for (int t : snap.copilot_ues[static_cast<size_t>(k)])
                        if (snap.serves(l, t))
                            in_strong[static_cast<size_t>(t)] = 1;

            // count distinct strong pilots; trim whole pilot groups (weakest
            // first) until tau_strong <= M - 1
            auto strong_pilot_groups = [&]() {
                std::vector<std::pair<double, int>> groups; // (max beta, pilot)
                std::vector<char> seen(static_cast<size_t>(snap.pilot_len()), 0);
                for (int k : served)
                {
                    if (!in_strong[static_cast<size_t>(k)])
                        continue;
                    const int pi = snap.pilot_of_ue[static_cast<size_t>(k)];
                    if (!seen[static_cast<size_t>(pi)])
                    {
                        seen[static_cast<size_t>(pi)] = 1;
                        groups.emplace_back(snap.beta(l, k), pi);
                    }
                    else
                    {
                        for (auto &g : groups)
                            if (g.second == pi)
                                g.first = std::max(g.first, snap.beta(l, k));
                    }
                }
                return groups;
            };
            auto groups = strong_pilot_groups();
            while (static_cast<int>(groups.size()) >= M)
            {
                const auto weakest = std::min_element(
                    groups.begin(), groups.end(), [](const auto &a, const auto &b) {
                        return a.first != b.first ? a.first < b.first : a.second < b.second;
                    });
                const int drop = weakest->second;
                for (int k : served)
                    if (snap.pilot_of_ue[static_cast<size_t>(k)] == drop)
                        in_strong[static_cast<size_t>(k)] = 0;
                groups.erase(weakest);
            }
        }

        IndexSet &strong = snap.strong_ues[static_cast<size_t>(l)];
        IndexSet &weak = snap.weak_ues[static_cast<size_t>(l)];
        std::vector<char> pilot_strong(static_cast<size_t>(snap.pilot_len()), 0);
        for (int k : served)
        {
            if (in_strong[static_cast<size_t>(k)])
            {
                strong.push_back(k);
                snap.delta(l, k) = 1;
                pilot_strong[static_cast<size_t>(snap.pilot_of_ue[static_cast<size_t>(k)])] = 1;
            }
            else
            {
                weak.push_back(k);
            }
        }
        IndexSet &pilots = snap.strong_pilots[static_cast<size_t>(l)];
        for (int i = 0; i < snap.pilot_len(); ++i)
            if (pilot_strong[static_cast<size_t>(i)])
                pilots.push_back(i);
        snap.tau_strong[static_cast<size_t>(l)] = static_cast<int>(pilots.size());
    }

    snap.zf_aps.assign(static_cast<size_t>(K), {});
    snap.mrt_aps.assign(static_cast<size_t>(K), {});
    for (int k = 0; k < K; ++k)
        for (int l : snap.ap_cluster[static_cast<size_t>(k)])
        {
            if (snap.delta(l, k))
                snap.zf_aps[static_cast<size_t>(k)].push_back(l);
            else
                snap.mrt_aps[static_cast<size_t>(k)].push_back(l);
        }
}

// Joint draw of n correlated standard normals with covariance 2^(-d/decorr).
// The torus metric can push the kernel marginally outside PSD; eigenvalues
// within a relative roundoff band are clamped, anything worse is an error.
static Vector correlated_shadowing(const Matrix &positions, double area_side, double decorr,
                                   Rng &rng)
{
    const int n = static_cast<int>(positions.rows());
    Matrix cov(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
        {
            const double d = wrap_distance(positions(i, 0), positions(i, 1), positions(j, 0),
                                           positions(j, 1), area_side, 0.0);
            cov(i, j) = cov(j, i) = std::exp2(-d / decorr);
        }
    cov = 0.5 * (cov + cov.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    const Vector &lambda = eig.eigenvalues();
    const double lmax = lambda(n - 1);
    const double lmin = lambda(0);
    if (lmin < -1e-6 * std::max(1.0, lmax))
        throw NotPsdError(lmin);

    Vector iid(n);
    for (int i = 0; i < n; ++i)
        iid(i) = rng.normal();
    const Vector scale = lambda.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * scale.asDiagonal() * iid;
}

Snapshot generate_snapshot(const NetworkConfig &cfg, std::uint64_t seed)
{
    cfg.validate();
    const int L = cfg.num_aps;
    const int K = cfg.num_ues;

    Snapshot snap;
    snap.cfg = cfg;

    Rng rng_ap(derive_seed(seed, stream::ap_positions));
    Rng rng_ue(derive_seed(seed, stream::ue_positions));
    snap.ap_positions.resize(L, 2);
    for (int l = 0; l < L; ++l)
    {
        snap.ap_positions(l, 0) = rng_ap.uniform(0.0, cfg.area_side_m);
        snap.ap_positions(l, 1) = rng_ap.uniform(0.0, cfg.area_side_m);
    }
    snap.ue_positions.resize(K, 2);
    for (int k = 0; k < K; ++k)
    {
        snap.ue_positions(k, 0) = rng_ue.uniform(0.0, cfg.area_side_m);
        snap.ue_positions(k, 1) = rng_ue.uniform(0.0, cfg.area_side_m);
    }

    Rng rng_sa(derive_seed(seed, stream::shadow_ap));
    Rng rng_sb(derive_seed(seed, stream::shadow_ue));
    const Vector shadow_ap = correlated_shadowing(snap.ap_positions, cfg.area_side_m,
                                                  cfg.shadow_decorr_m, rng_sa);
    const Vector shadow_ue = correlated_shadowing(snap.ue_positions, cfg.area_side_m,
                                                  cfg.shadow_decorr_m, rng_sb);
    const double wa = std::sqrt(cfg.shadow_weight);
    const double wb = std::sqrt(1.0 - cfg.shadow_weight);

    const double dh = cfg.ap_height_m - cfg.ue_height_m;
    snap.beta.resize(L, K);
    snap.shadow_z.resize(L, K);
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < K; ++k)
        {
            const double d =
                wrap_distance(snap.ap_positions(l, 0), snap.ap_positions(l, 1),
                              snap.ue_positions(k, 0), snap.ue_positions(k, 1),
                              cfg.area_side_m, dh);
            const double z = wa * shadow_ap(l) + wb * shadow_ue(k);
            snap.shadow_z(l, k) = z;
            snap.beta(l, k) = db_to_linear(pathloss_db(d) + cfg.shadow_std_db * z);
        }

    snap.pilot_of_ue = assign_pilots(cfg, seed);
    snap.copilot_ues.assign(static_cast<size_t>(K), {});
    snap.ues_on_pilot.assign(static_cast<size_t>(cfg.pilot_len), {});
    for (int k = 0; k < K; ++k)
        snap.ues_on_pilot[static_cast<size_t>(snap.pilot_of_ue[static_cast<size_t>(k)])]
            .push_back(k);
    for (int k = 0; k < K; ++k)
        snap.copilot_ues[static_cast<size_t>(k)] =
            snap.ues_on_pilot[static_cast<size_t>(snap.pilot_of_ue[static_cast<size_t>(k)])];

    snap.ap_cluster = cluster_aps(snap.beta, cfg.clustering_threshold);
    snap.served_ues.assign(static_cast<size_t>(L), {});
    for (int k = 0; k < K; ++k)
        for (int l : snap.ap_cluster[static_cast<size_t>(k)])
            snap.served_ues[static_cast<size_t>(l)].push_back(k);

    group_ues(snap, cfg.grouping_threshold);

    snap.rho_max = Vector::Constant(L, cfg.ap_power_normalized());
    snap.p_ue = Vector::Constant(K, cfg.ue_power_normalized());
    return snap;
}

std::string snapshot_to_json_text(const Snapshot &snap)
{
    using nlohmann::json;
    json j;
    j["config"] = json::parse(config_to_json_text(snap.cfg));
    auto mat_to_json = [](const Matrix &m) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i)
        {
            json row = json::array();
            for (Eigen::Index k = 0; k < m.cols(); ++k)
                row.push_back(m(i, k));
            rows.push_back(row);
        }
        return rows;
    };
    j["ap_positions"] = mat_to_json(snap.ap_positions);
    j["ue_positions"] = mat_to_json(snap.ue_positions);
    Matrix beta_db = snap.beta.unaryExpr([](double b) { return linear_to_db(b); });
    j["beta_db"] = mat_to_json(beta_db);
    // pilot indices reported 1-based, matching the usual convention
    json pilots = json::array();
    for (int p : snap.pilot_of_ue)
        pilots.push_back(p + 1);
    j["pilot_index"] = pilots;
    auto sets_to_json = [](const std::vector<IndexSet> &sets) {
        json out = json::array();
        for (const auto &s : sets)
        {
            json inner = json::array();
            for (int v : s)
                inner.push_back(v);
            out.push_back(inner);
        }
        return out;
    };
    j["copilot_ues"] = sets_to_json(snap.copilot_ues);
    j["strong_ues"] = sets_to_json(snap.strong_ues);
    j["weak_ues"] = sets_to_json(snap.weak_ues);
    j["ap_cluster"] = sets_to_json(snap.ap_cluster);
    j["tau_strong"] = snap.tau_strong;
    j["rho_max"] = std::vector<double>(snap.rho_max.data(), snap.rho_max.data() + snap.rho_max.size());
    j["p_ue"] = std::vector<double>(snap.p_ue.data(), snap.p_ue.data() + snap.p_ue.size());
    j["warnings"] = snap.warnings;
    return j.dump(2);
}

} // namespace cellfree
