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

#ifndef CELLFREE_POWER_HPP
#define CELLFREE_POWER_HPP

#include "cellfree/sinr.hpp"
#include "cellfree/socp.hpp"
#include "cellfree/types.hpp"

#include <string>
#include <vector>

namespace cellfree
{

struct BisectionStep
{
    double nu = 0.0;
    FeasibilityReport::Status status = FeasibilityReport::Status::Undecided;
    int solver_iterations = 0;
    double max_violation = 0.0;
};

struct PowerAllocation
{
    Matrix rho; // L x K, linear normalized power
    Policy policy = Policy::Heuristic;

    // max-min only
    double nu_achieved = 0.0; // last feasible bracket point
    double nu_upper = 0.0;    // final infeasible bracket point
    std::vector<BisectionStep> trace;
    std::vector<std::string> warnings;
};

/// Channel-gain proportional allocation: every AP transmits at full power,
/// split across its served UEs proportionally to gamma.
PowerAllocation heuristic_power(const Snapshot &snap, const EstimatorStats &stats);

/// Max-min fairness problem data. The SINR coefficients fix the precoding
/// scheme; clusters pin out-of-cluster coefficients to zero.
struct MaxMinProblem
{
    SinrCoefficients coef;
    Vector rho_max;                   // L
    std::vector<IndexSet> copilot_ues; // P_k
    std::vector<IndexSet> ap_cluster;  // empty = all APs serve all UEs
    double eps_nu = 1e-3;   // relative bisection bracket tolerance
    double eps_feas = 1e-6; // cone violation tolerance (normalized constraints)
    int max_bisect_iters = 64;
    int solver_iter_cap = 150000;
};

MaxMinProblem make_maxmin_problem(Scheme scheme, const Snapshot &snap,
                                  const EstimatorStats &stats);

/// Minimum closed-form SINR over the UEs for a given allocation, evaluated
/// from the problem's own coefficients.
double min_sinr(const MaxMinProblem &problem, const Matrix &rho);

/// Cone feasibility instance for a fixed SINR target nu, in the variables
/// u(l,t) = sqrt(rho(l,t)) stacked column-major (index t*L + l). Every
/// constraint is normalized by its largest coefficient, so feasibility
/// tolerances act on relative violations.
SocpInstance build_socp(const MaxMinProblem &problem, double nu);

FeasibilityReport solve_feasibility(const SocpInstance &inst, double eps_feas,
                                    const Vector *warm_start = nullptr,
                                    int iter_cap = 150000);

/// Bisection over build_socp feasibility. rho_init, when given, must be a
/// feasible allocation; its min-SINR seeds the lower bracket and its square
/// root warm-starts the solver.
PowerAllocation maxmin_power(const MaxMinProblem &problem, const Matrix *rho_init = nullptr);

} // namespace cellfree

#endif // CELLFREE_POWER_HPP
