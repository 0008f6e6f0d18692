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

#include "cellfree/complexity.hpp"
#include "cellfree/experiment.hpp"
#include "cellfree/geometry.hpp"
#include "cellfree/validate.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

namespace
{

struct ConfigFlags
{
    std::string config_path;
    cellfree::NetworkConfig cfg;

    void attach(CLI::App *app)
    {
        app->add_option("--config", config_path, "JSON config file (overrides flags)");
        app->add_option("--area-side", cfg.area_side_m, "square side D in meters");
        app->add_option("--num-aps,-L", cfg.num_aps, "number of APs");
        app->add_option("--antennas,-M", cfg.antennas_per_ap, "antennas per AP");
        app->add_option("--num-ues,-K", cfg.num_ues, "number of UEs");
        app->add_option("--pilot-len", cfg.pilot_len, "pilot sequence length tau_p");
        app->add_option("--coherence-len", cfg.coherence_len, "coherence block length tau_c");
        app->add_option("--dl-fraction", cfg.dl_fraction, "downlink share xi of data samples");
        app->add_option("--shadow-std-db", cfg.shadow_std_db, "shadow fading std dev in dB");
        app->add_option("--shadow-weight", cfg.shadow_weight, "AP/UE shadowing weight");
        app->add_option("--grouping-threshold", cfg.grouping_threshold,
                        "strong-UE channel gain share (upsilon)");
        app->add_option("--clustering-threshold", cfg.clustering_threshold,
                        "AP cluster channel gain share (kappa)");
        app->add_option("--ap-power-mw", cfg.ap_power_mw, "per-AP power in mW");
        app->add_option("--ue-power-mw", cfg.ue_power_mw, "per-UE pilot power in mW");
        app->add_option("--noise-dbm", cfg.noise_dbm, "noise power in dBm");
        app->add_option("--seed", cfg.rng_seed, "master RNG seed");
        app->add_option("--mc-realizations", cfg.mc_realizations,
                        "Monte-Carlo channel realizations");
    }

    cellfree::NetworkConfig resolve() const
    {
        if (config_path.empty())
            return cfg;
        // the config file takes precedence over flags
        std::ifstream in(config_path);
        if (!in)
            throw std::runtime_error("cannot open config file: " + config_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        nlohmann::json merged = nlohmann::json::parse(cellfree::config_to_json_text(cfg));
        const nlohmann::json file = nlohmann::json::parse(ss.str());
        for (auto it = file.begin(); it != file.end(); ++it)
            merged[it.key()] = it.value();
        return cellfree::config_from_json_text(merged.dump());
    }
};

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"cell-free massive MIMO downlink precoding simulator"};
    app.require_subcommand(1);

    // snapshot
    auto *snap_cmd = app.add_subcommand("snapshot", "generate one network snapshot as JSON");
    ConfigFlags snap_flags;
    snap_flags.attach(snap_cmd);
    std::string snap_out = "-";
    std::uint64_t snap_seed_override = 0;
    bool snap_seed_given = false;
    snap_cmd->add_option("--out", snap_out, "output path, - for stdout");
    snap_cmd->add_option("--snapshot-seed", snap_seed_override, "override the snapshot seed")
        ->each([&](const std::string &) { snap_seed_given = true; });

    // run
    auto *run_cmd = app.add_subcommand("run", "run a snapshot sweep experiment");
    ConfigFlags run_flags;
    run_flags.attach(run_cmd);
    std::string schemes_arg = "mrt,fzf,pzf,ppzf";
    std::string policies_arg = "heuristic";
    std::string sweep_arg = "none";
    std::string grid_arg;
    std::string out_dir = "out";
    int num_snapshots = 100;
    int num_threads = 0;
    bool with_mc = false;
    bool drop_mrt = false;
    run_cmd->add_option("--schemes", schemes_arg, "comma list: mrt,fzf,pzf,ppzf,rzf");
    run_cmd->add_option("--policies", policies_arg, "comma list: heuristic,maxmin");
    run_cmd->add_option("--sweep", sweep_arg, "sweep variable: none,M,tau_p,upsilon,kappa,K");
    run_cmd->add_option("--grid", grid_arg, "comma list of sweep values");
    run_cmd->add_option("--snapshots", num_snapshots, "number of network snapshots");
    run_cmd->add_option("--out-dir", out_dir, "output directory");
    run_cmd->add_option("--threads", num_threads, "worker threads (0 = auto)");
    run_cmd->add_flag("--mc", with_mc, "also estimate SE by Monte-Carlo for every scheme");
    run_cmd->add_flag("--ppzf-drop-mrt", drop_mrt, "PPZF variant with no service to weak UEs");

    // complexity
    auto *cx_cmd = app.add_subcommand("complexity", "evaluate the per-block complexity model");
    int cx_m = 16, cx_tau_p = 10, cx_tau_c = 200, cx_k = 20;
    std::string cx_tau_s_arg;
    cx_cmd->add_option("--antennas,-M", cx_m, "antennas per AP");
    cx_cmd->add_option("--pilot-len", cx_tau_p, "pilot length tau_p");
    cx_cmd->add_option("--coherence-len", cx_tau_c, "coherence block length tau_c");
    cx_cmd->add_option("--num-ues,-K", cx_k, "number of UEs");
    cx_cmd->add_option("--tau-strong", cx_tau_s_arg,
                       "comma list of tau_S values (default 0..tau_p)");

    // validate
    auto *val_cmd = app.add_subcommand("validate", "run the runtime invariant suite");
    std::uint64_t val_seed = 1;
    bool val_quick = false;
    val_cmd->add_option("--seed", val_seed, "suite seed");
    val_cmd->add_flag("--quick", val_quick, "reduced Monte-Carlo draw counts");

    CLI11_PARSE(app, argc, argv);

    auto split_list = [](const std::string &arg) {
        std::vector<std::string> out;
        std::stringstream ss(arg);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty())
                out.push_back(item);
        return out;
    };

    try
    {
        if (*snap_cmd)
        {
            const cellfree::NetworkConfig cfg = snap_flags.resolve();
            const std::uint64_t seed = snap_seed_given ? snap_seed_override : cfg.rng_seed;
            const cellfree::Snapshot snap = cellfree::generate_snapshot(cfg, seed);
            const std::string text = cellfree::snapshot_to_json_text(snap);
            if (snap_out == "-")
                std::cout << text << "\n";
            else
            {
                std::ofstream out(snap_out);
                out << text << "\n";
                std::cerr << "snapshot written to " << snap_out << "\n";
            }
        }
        else if (*run_cmd)
        {
            cellfree::ExperimentSpec spec;
            spec.base = run_flags.resolve();
            spec.schemes.clear();
            for (const auto &s : split_list(schemes_arg))
                spec.schemes.push_back(cellfree::scheme_from_string(s));
            spec.policies.clear();
            for (const auto &p : split_list(policies_arg))
                spec.policies.push_back(cellfree::policy_from_string(p));
            spec.sweep = cellfree::sweep_from_string(sweep_arg);
            for (const auto &v : split_list(grid_arg))
                spec.sweep_values.push_back(std::stod(v));
            spec.num_snapshots = num_snapshots;
            spec.monte_carlo = with_mc;
            spec.output_dir = out_dir;
            spec.num_threads = num_threads;
            spec.ppzf_drop_mrt = drop_mrt;
            const cellfree::ExperimentResult result = cellfree::run_experiment(spec);
            cellfree::write_experiment_outputs(spec, result);
            std::cerr << "wrote " << result.rows.size() << " result rows to " << out_dir
                      << "\n";
        }
        else if (*cx_cmd)
        {
            std::vector<int> tau_s_values;
            if (cx_tau_s_arg.empty())
                for (int t = 0; t <= cx_tau_p; ++t)
                    tau_s_values.push_back(t);
            else
                for (const auto &v : split_list(cx_tau_s_arg))
                    tau_s_values.push_back(std::stoi(v));
            std::printf("tau_strong,scheme,multiplications,divisions,transmission,normalized\n");
            for (int tau_s : tau_s_values)
            {
                const cellfree::ComplexityReport report =
                    cellfree::complexity(cx_m, cx_tau_p, tau_s, cx_tau_c - cx_tau_p, cx_k);
                for (const auto &e : report.entries)
                    std::printf("%d,%s,%.12g,%.12g,%.12g,%.12g\n", tau_s, e.scheme.c_str(),
                                e.multiplications, e.divisions,
                                e.transmission_multiplications, e.normalized);
            }
        }
        else if (*val_cmd)
        {
            const auto results = cellfree::run_validation_suite(val_seed, val_quick);
            bool all_ok = true;
            for (const auto &res : results)
            {
                std::printf("[%s] %-34s %s\n", res.passed ? "PASS" : "FAIL", res.name.c_str(),
                            res.detail.c_str());
                all_ok = all_ok && res.passed;
            }
            return all_ok ? 0 : 1;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
