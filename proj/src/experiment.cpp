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

#include "cellfree/experiment.hpp"

#include "cellfree/channel.hpp"
#include "cellfree/monte_carlo.hpp"
#include "cellfree/parallel.hpp"
#include "cellfree/power.hpp"
#include "cellfree/precoding.hpp"
#include "cellfree/rng.hpp"
#include "cellfree/sinr.hpp"
#include "cellfree/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <tuple>

namespace cellfree
{

SweepVar sweep_from_string(const std::string &name)
{
    if (name == "none")
        return SweepVar::None;
    if (name == "M" || name == "antennas")
        return SweepVar::Antennas;
    if (name == "tau_p" || name == "pilot_len")
        return SweepVar::PilotLen;
    if (name == "upsilon" || name == "grouping")
        return SweepVar::Grouping;
    if (name == "kappa" || name == "clustering")
        return SweepVar::Clustering;
    if (name == "K" || name == "num_ues")
        return SweepVar::NumUes;
    throw std::invalid_argument("unknown sweep variable: " + name);
}

std::string to_string(SweepVar v)
{
    switch (v)
    {
    case SweepVar::None:
        return "none";
    case SweepVar::Antennas:
        return "M";
    case SweepVar::PilotLen:
        return "tau_p";
    case SweepVar::Grouping:
        return "upsilon";
    case SweepVar::Clustering:
        return "kappa";
    case SweepVar::NumUes:
        return "K";
    }
    return "?";
}

static NetworkConfig config_at(const ExperimentSpec &spec, int sweep_index)
{
    NetworkConfig cfg = spec.base;
    if (spec.sweep == SweepVar::None)
        return cfg;
    const double v = spec.sweep_values[static_cast<size_t>(sweep_index)];
    switch (spec.sweep)
    {
    case SweepVar::Antennas:
        cfg.antennas_per_ap = static_cast<int>(std::lround(v));
        break;
    case SweepVar::PilotLen:
        cfg.pilot_len = static_cast<int>(std::lround(v));
        break;
    case SweepVar::Grouping:
        cfg.grouping_threshold = v;
        break;
    case SweepVar::Clustering:
        cfg.clustering_threshold = v;
        break;
    case SweepVar::NumUes:
        cfg.num_ues = static_cast<int>(std::lround(v));
        break;
    case SweepVar::None:
        break;
    }
    return cfg;
}

void ExperimentSpec::validate() const
{
    if (num_snapshots < 1)
        throw std::invalid_argument("experiment: need at least one snapshot");
    if (schemes.empty() || policies.empty())
        throw std::invalid_argument("experiment: schemes and policies must be non-empty");
    if (sweep != SweepVar::None && sweep_values.empty())
        throw std::invalid_argument("experiment: sweep grid is empty");
    const int n_points = sweep == SweepVar::None ? 1 : static_cast<int>(sweep_values.size());
    for (int i = 0; i < n_points; ++i)
    {
        const NetworkConfig cfg = config_at(*this, i);
        cfg.validate();
        for (Scheme s : schemes)
            if (s == Scheme::FZF && cfg.antennas_per_ap <= cfg.pilot_len)
                throw std::invalid_argument(
                    "experiment: FZF requires M > tau_p, violated at sweep point " +
                    std::to_string(i));
    }
}

namespace
{

struct SnapshotOutput
{
    std::vector<ResultRow> rows;
};

// PPZF \ {MRT}: the weak-set transmissions are dropped, the corresponding
// power stays unused.
Matrix effective_rho(const Snapshot &snap, Scheme scheme, const Matrix &rho, bool drop_mrt)
{
    if (scheme != Scheme::PPZF || !drop_mrt)
        return rho;
    return rho.cwiseProduct(snap.delta.cast<double>());
}

} // namespace

ExperimentResult run_experiment(const ExperimentSpec &spec)
{
    spec.validate();
    const int n_points = spec.sweep == SweepVar::None
                             ? 1
                             : static_cast<int>(spec.sweep_values.size());
    const int n_jobs = n_points * spec.num_snapshots;
    const int n_threads = resolve_thread_count(spec.num_threads);

    const bool want_maxmin =
        std::find(spec.policies.begin(), spec.policies.end(), Policy::MaxMin) !=
        spec.policies.end();

    std::vector<SnapshotOutput> slots(static_cast<size_t>(n_jobs));

    parallel_for_index(n_jobs, n_threads, [&](int job) {
        const int point = job / spec.num_snapshots;
        const int snap_idx = job % spec.num_snapshots;
        const NetworkConfig cfg = config_at(spec, point);
        const double sweep_value =
            spec.sweep == SweepVar::None ? 0.0 : spec.sweep_values[static_cast<size_t>(point)];

        // the snapshot stream depends only on the snapshot index, so sweeps
        // that leave the geometry dimensions unchanged reuse the same draw
        const std::uint64_t snap_seed =
            derive_seed(cfg.rng_seed, stream::snapshot, static_cast<std::uint64_t>(snap_idx));
        const Snapshot snap = generate_snapshot(cfg, snap_seed);
        const EstimatorStats stats = estimator_stats(snap);
        const PowerAllocation heuristic = heuristic_power(snap, stats);

        std::map<Scheme, SinrCoefficients> coef;
        for (Scheme s : spec.schemes)
            if (s != Scheme::RZF)
                coef.emplace(s, sinr_coefficients(s, snap, stats));

        // max-min allocations per closed-form scheme; RZF reuses PPZF's
        std::map<Scheme, PowerAllocation> maxmin;
        if (want_maxmin)
        {
            std::vector<Scheme> needed;
            for (Scheme s : spec.schemes)
                needed.push_back(s == Scheme::RZF ? Scheme::PPZF : s);
            std::sort(needed.begin(), needed.end());
            needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
            for (Scheme s : needed)
            {
                MaxMinProblem problem = make_maxmin_problem(s, snap, stats);
                maxmin.emplace(s, maxmin_power(problem, &heuristic.rho));
            }
        }

        auto rho_for = [&](Scheme s, Policy p) -> const Matrix & {
            if (p == Policy::Heuristic)
                return heuristic.rho;
            return maxmin.at(s == Scheme::RZF ? Scheme::PPZF : s).rho;
        };

        // Monte-Carlo specs for this snapshot (RZF always, others on request),
        // evaluated on common random numbers
        std::vector<McSchemeSpec> mc_specs;
        std::vector<std::pair<Scheme, Policy>> mc_tags;
        for (Policy p : spec.policies)
            for (Scheme s : spec.schemes)
            {
                if (s != Scheme::RZF && !spec.monte_carlo)
                    continue;
                McSchemeSpec mc;
                mc.scheme = s;
                mc.rho = effective_rho(snap, s, rho_for(s, p), spec.ppzf_drop_mrt);
                if (s == Scheme::RZF)
                    mc.rho_reg = heuristic.rho; // regularize with the heuristic coefficients
                mc_specs.push_back(std::move(mc));
                mc_tags.emplace_back(s, p);
            }
        std::vector<std::vector<SEResult>> mc_results;
        if (!mc_specs.empty())
        {
            McOptions opt;
            opt.n_realizations = cfg.mc_realizations;
            opt.seed = derive_seed(cfg.rng_seed, stream::mc_chunk,
                                   static_cast<std::uint64_t>(snap_idx), 0xE5);
            opt.n_threads = 1; // jobs already run in parallel
            mc_results = monte_carlo_se(snap, mc_specs, opt);
        }

        SnapshotOutput &out = slots[static_cast<size_t>(job)];
        auto push_row = [&](Scheme s, Policy p, int ue, const SEResult &res) {
            ResultRow row;
            row.sweep_index = point;
            row.sweep_value = sweep_value;
            row.snapshot = snap_idx;
            row.scheme = s;
            row.policy = p;
            row.ue = ue;
            row.sinr = res.sinr;
            row.se = res.se;
            row.se_stderr = res.se_stderr;
            row.monte_carlo = res.monte_carlo;
            out.rows.push_back(row);
        };

        for (Policy p : spec.policies)
            for (Scheme s : spec.schemes)
            {
                if (s == Scheme::RZF)
                    continue;
                const Matrix rho = effective_rho(snap, s, rho_for(s, p), spec.ppzf_drop_mrt);
                for (int k = 0; k < snap.num_ues(); ++k)
                {
                    SEResult res;
                    res.sinr = sinr_closed_form(coef.at(s), snap, rho, k);
                    res.se = se_from_sinr(res.sinr, cfg);
                    push_row(s, p, k, res);
                }
            }
        for (size_t i = 0; i < mc_specs.size(); ++i)
            for (int k = 0; k < snap.num_ues(); ++k)
                push_row(mc_tags[i].first, mc_tags[i].second, k,
                         mc_results[i][static_cast<size_t>(k)]);
    });

    ExperimentResult result;
    for (auto &slot : slots)
        for (auto &row : slot.rows)
            result.rows.push_back(row);

    // aggregate per (sweep point, scheme, policy, method)
    struct Key
    {
        int point;
        int scheme;
        int policy;
        int mc;
        bool operator<(const Key &o) const
        {
            return std::tie(point, scheme, policy, mc) <
                   std::tie(o.point, o.scheme, o.policy, o.mc);
        }
    };
    std::map<Key, std::vector<double>> pooled;
    std::map<Key, std::map<int, double>> sums; // snapshot -> sum SE
    for (const ResultRow &row : result.rows)
    {
        const Key key{row.sweep_index, static_cast<int>(row.scheme),
                      static_cast<int>(row.policy), row.monte_carlo ? 1 : 0};
        pooled[key].push_back(row.se);
        sums[key][row.snapshot] += row.se;
    }
    for (const auto &[key, values] : pooled)
    {
        AggregateRow agg;
        agg.sweep_index = key.point;
        agg.sweep_value = spec.sweep == SweepVar::None
                              ? 0.0
                              : spec.sweep_values[static_cast<size_t>(key.point)];
        agg.scheme = static_cast<Scheme>(key.scheme);
        agg.policy = static_cast<Policy>(key.policy);
        agg.monte_carlo = key.mc != 0;
        agg.n_values = static_cast<int>(values.size());
        const CdfTable table = aggregate_cdf(values);
        agg.median_se = table.median;
        agg.p5_se = table.percentile5;
        agg.mean_se = table.mean;
        std::vector<double> snapshot_sums;
        for (const auto &[snap_idx, sum] : sums[key])
            snapshot_sums.push_back(sum);
        agg.n_snapshots = static_cast<int>(snapshot_sums.size());
        agg.median_sum_se = quantile(snapshot_sums, 0.5);
        result.aggregates.push_back(agg);
    }
    return result;
}

namespace
{

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

void write_experiment_outputs(const ExperimentSpec &spec, const ExperimentResult &result)
{
    namespace fs = std::filesystem;
    fs::create_directories(spec.output_dir);
    const std::string sweep_name = to_string(spec.sweep);

    {
        std::ofstream out(fs::path(spec.output_dir) / "results.csv");
        out << "sweep_var,sweep_value,snapshot,scheme,policy,method,ue,sinr,se,se_stderr\n";
        for (const ResultRow &row : result.rows)
            out << sweep_name << ',' << fmt(row.sweep_value) << ',' << row.snapshot << ','
                << to_string(row.scheme) << ',' << to_string(row.policy) << ','
                << (row.monte_carlo ? "mc" : "cf") << ',' << row.ue << ',' << fmt(row.sinr)
                << ',' << fmt(row.se) << ',' << fmt(row.se_stderr) << '\n';
    }
    {
        std::ofstream out(fs::path(spec.output_dir) / "aggregate.csv");
        out << "sweep_var,sweep_value,scheme,policy,method,n_values,median_se,p5_se,mean_se,"
               "n_snapshots,median_sum_se\n";
        for (const AggregateRow &agg : result.aggregates)
            out << sweep_name << ',' << fmt(agg.sweep_value) << ',' << to_string(agg.scheme)
                << ',' << to_string(agg.policy) << ',' << (agg.monte_carlo ? "mc" : "cf") << ','
                << agg.n_values << ',' << fmt(agg.median_se) << ',' << fmt(agg.p5_se) << ','
                << fmt(agg.mean_se) << ',' << agg.n_snapshots << ',' << fmt(agg.median_sum_se)
                << '\n';
    }
    {
        // empirical CDF of the per-UE SE per aggregate group
        std::ofstream out(fs::path(spec.output_dir) / "cdf.csv");
        out << "sweep_var,sweep_value,scheme,policy,method,se,cdf\n";
        for (const AggregateRow &agg : result.aggregates)
        {
            std::vector<double> values;
            for (const ResultRow &row : result.rows)
                if (row.sweep_index == agg.sweep_index && row.scheme == agg.scheme &&
                    row.policy == agg.policy && row.monte_carlo == agg.monte_carlo)
                    values.push_back(row.se);
            const CdfTable table = aggregate_cdf(std::move(values));
            for (size_t i = 0; i < table.values.size(); ++i)
                out << sweep_name << ',' << fmt(agg.sweep_value) << ','
                    << to_string(agg.scheme) << ',' << to_string(agg.policy) << ','
                    << (agg.monte_carlo ? "mc" : "cf") << ',' << fmt(table.values[i]) << ','
                    << fmt(table.positions[i]) << '\n';
        }
    }
    {
        using nlohmann::json;
        json j;
        j["config"] = json::parse(config_to_json_text(spec.base));
        j["sweep_var"] = sweep_name;
        j["num_snapshots"] = spec.num_snapshots;
        json rows = json::array();
        for (const ResultRow &row : result.rows)
            rows.push_back({{"sweep_value", row.sweep_value},
                            {"snapshot", row.snapshot},
                            {"scheme", to_string(row.scheme)},
                            {"policy", to_string(row.policy)},
                            {"method", row.monte_carlo ? "mc" : "cf"},
                            {"ue", row.ue},
                            {"sinr", row.sinr},
                            {"se", row.se},
                            {"se_stderr", row.se_stderr}});
        j["results"] = rows;
        json aggs = json::array();
        for (const AggregateRow &agg : result.aggregates)
            aggs.push_back({{"sweep_value", agg.sweep_value},
                            {"scheme", to_string(agg.scheme)},
                            {"policy", to_string(agg.policy)},
                            {"method", agg.monte_carlo ? "mc" : "cf"},
                            {"n_values", agg.n_values},
                            {"median_se", agg.median_se},
                            {"p5_se", agg.p5_se},
                            {"mean_se", agg.mean_se},
                            {"n_snapshots", agg.n_snapshots},
                            {"median_sum_se", agg.median_sum_se}});
        j["aggregates"] = aggs;
        std::ofstream out(fs::path(spec.output_dir) / "results.json");
        out << j.dump(1) << '\n';
    }
}

} // namespace cellfree
