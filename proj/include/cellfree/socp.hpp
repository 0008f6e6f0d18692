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

#ifndef CELLFREE_SOCP_HPP
#define CELLFREE_SOCP_HPP

#include "cellfree/types.hpp"

#include <Eigen/SparseCore>
#include <string>
#include <vector>

namespace cellfree
{

/// One second-order cone constraint ||A x + b|| <= c^T x + d.
struct SocConstraint
{
    Eigen::SparseMatrix<double> A; // m x n
    Vector b;                      // m
    Vector c;                      // n
    double d = 0.0;
    std::string label;

    double violation(const Vector &x) const
    {
        return (A * x + b).norm() - (c.dot(x) + d);
    }
};

/// Conjunction of SOC constraints over x >= 0. Variables flagged in
/// fixed_zero are pinned to zero. var_scale is a solver hint holding the
/// natural magnitude of each variable; it does not change the problem.
struct SocpInstance
{
    int n = 0;
    std::vector<SocConstraint> constraints;
    std::vector<bool> fixed_zero; // empty = none
    Vector var_scale;             // empty = all ones

    double max_violation(const Vector &x) const;
};

struct FeasibilityReport
{
    enum class Status
    {
        Feasible,
        Infeasible,
        Undecided
    };
    Status status = Status::Undecided;
    Vector witness;           // best iterate, x >= 0 with fixed_zero respected
    double max_violation = 0; // of the witness, replayable on the instance
    int iterations = 0;
};

struct SolverOptions
{
    double eps_feas = 1e-6;
    int iter_cap = 150000;
    int check_interval = 5;   // candidate evaluation cadence, in iterations
    int stall_patience = 400; // checks without progress before declaring infeasible
};

/// Approximately minimizes max_i violation_i(x) over x >= 0 by
/// Douglas-Rachford splitting between the affine graph of the constraint
/// maps and the product of the second-order cones. Deterministic given
/// (instance, x0, options). Returns Feasible as soon as an iterate has
/// max violation <= eps_feas, Infeasible when the best violation stalls
/// above it, Undecided at the iteration cap.
FeasibilityReport min_max_violation(const SocpInstance &inst, const Vector &x0,
                                    const SolverOptions &opt = {});

std::string socp_to_json_text(const SocpInstance &inst);
SocpInstance socp_from_json_text(const std::string &text);

} // namespace cellfree

#endif // CELLFREE_SOCP_HPP
