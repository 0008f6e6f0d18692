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

#ifndef CELLFREE_EXPERIMENT_HPP
#define CELLFREE_EXPERIMENT_HPP

#include "cellfree/config.hpp"
#include "cellfree/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cellfree
{

enum class SweepVar
{
    None,
    Antennas,   // M
    PilotLen,   // tau_p
    Grouping,   // upsilon
    Clustering, // kappa
    NumUes      // K
};

SweepVar sweep_from_string(const std::string &name);
std::string to_string(SweepVar v);

struct ExperimentSpec
{
    NetworkConfig base;
    std::vector<Scheme> schemes = {Scheme::MRT, Scheme::FZF, Scheme::PZF, Scheme::PPZF};
    std::vector<Policy> policies = {Policy::Heuristic};
    int num_snapshots = 100;
    SweepVar sweep = SweepVar::None;
    std::vector<double> sweep_values; // ignored when sweep == None
    bool monte_carlo = false;         // MC rows for the closed-form schemes too
    std::string output_dir = "out";
    int num_threads = 0; // 0 = resolve from environment / hardware
    bool ppzf_drop_mrt = false; // PPZF variant: no service towards weak UEs

    /// Throws std::invalid_argument on bad scheme/policy/sweep combinations
    /// before any computation starts.
    void validate() const;
};

struct ResultRow
{
    int sweep_index = 0;
    double sweep_value = 0.0;
    int snapshot = 0;
    Scheme scheme = Scheme::MRT;
    Policy policy = Policy::Heuristic;
    int ue = 0;
    double sinr = 0.0;
    double se = 0.0;
    double se_stderr = 0.0; // 0 for closed form
    bool monte_carlo = false;
};

struct AggregateRow
{
    int sweep_index = 0;
    double sweep_value = 0.0;
    Scheme scheme = Scheme::MRT;
    Policy policy = Policy::Heuristic;
    bool monte_carlo = false;
    int n_values = 0;
    double median_se = 0.0;
    double p5_se = 0.0; // 95%-likely SE
    double mean_se = 0.0;
    int n_snapshots = 0;
    double median_sum_se = 0.0;
};

struct ExperimentResult
{
    std::vector<ResultRow> rows;
    std::vector<AggregateRow> aggregates;
};

/// Runs the full snapshot sweep. Deterministic for a fixed (spec, base seed):
/// snapshot-level work is scheduled on a pool but every output slot is keyed
/// by index and merged in order, so thread count never changes the bytes.
ExperimentResult run_experiment(const ExperimentSpec &spec);

/// Writes results.csv, aggregate.csv, cdf.csv and results.json under
/// spec.output_dir. Formats are documented in the README.
void write_experiment_outputs(const ExperimentSpec &spec, const ExperimentResult &result);

} // namespace cellfree

#endif // CELLFREE_EXPERIMENT_HPP
