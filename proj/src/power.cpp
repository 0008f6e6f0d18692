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

#include "cellfree/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cellfree
{

PowerAllocation heuristic_power(const Snapshot &snap, const EstimatorStats &stats)
{
    const int L = snap.num_aps();
    const int K = snap.num_ues();
    PowerAllocation alloc;
    alloc.policy = Policy::Heuristic;
    alloc.rho = Matrix::Zero(L, K);
    for (int l = 0; l < L; ++l)
    {
        const IndexSet &served = snap.served_ues[static_cast<size_t>(l)];
        if (served.empty())
        {
            alloc.warnings.push_back("AP " + std::to_string(l) + " serves no UE");
            continue;
        }
        double total = 0.0;
        for (int k : served)
            total += stats.gamma(l, k);
        for (int k : served)
            alloc.rho(l, k) = stats.gamma(l, k) / total * snap.rho_max(l);
    }
    return alloc;
}

MaxMinProblem make_maxmin_problem(Scheme scheme, const Snapshot &snap,
                                  const EstimatorStats &stats)
{
    MaxMinProblem problem;
    problem.coef = sinr_coefficients(scheme, snap, stats);
    problem.rho_max = snap.rho_max;
    problem.copilot_ues = snap.copilot_ues;
    problem.ap_cluster = snap.ap_cluster;
    return problem;
}

double min_sinr(const MaxMinProblem &problem, const Matrix &rho)
{
    const int K = static_cast<int>(problem.coef.g.front().rows());
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k)
        worst = std::min(worst, sinr_closed_form_raw(problem.coef, problem.copilot_ues, rho, k));
    return worst;
}

SocpInstance build_socp(const MaxMinProblem &problem, double nu)
{
    if (nu < 0.0)
        throw std::invalid_argument("build_socp: nu must be >= 0");
    const int L = static_cast<int>(problem.coef.g.size());
    const int K = static_cast<int>(problem.coef.g.front().rows());
    const int n = L * K;
    const double sqrt_nu = std::sqrt(nu);
    auto idx = [L](int l, int t) { return t * L + l; };

    SocpInstance inst;
    inst.n = n;
    inst.fixed_zero.assign(static_cast<size_t>(n), false);
    if (!problem.ap_cluster.empty())
    {
        for (int k = 0; k < K; ++k)
        {
            std::vector<char> in(static_cast<size_t>(L), 0);
            for (int l : problem.ap_cluster[static_cast<size_t>(k)])
                in[static_cast<size_t>(l)] = 1;
            for (int l = 0; l < L; ++l)
                if (!in[static_cast<size_t>(l)])
                    inst.fixed_zero[static_cast<size_t>(idx(l, k))] = true;
        }
    }
    inst.var_scale.resize(n);
    for (int t = 0; t < K; ++t)
        for (int l = 0; l < L; ++l)
            inst.var_scale(idx(l, t)) = std::sqrt(problem.rho_max(l));

    auto masked = [&](int l, int t) { return inst.fixed_zero[static_cast<size_t>(idx(l, t))]; };

    // scale-aware normalization keeps every constraint's coefficients O(1)
    auto normalize = [&](SocConstraint &con) {
        double s = std::abs(con.d);
        for (int col = 0; col < con.A.outerSize(); ++col)
            for (Eigen::SparseMatrix<double>::InnerIterator it(con.A, col); it; ++it)
                s = std::max(s, std::abs(it.value()) * inst.var_scale(col));
        for (Eigen::Index i = 0; i < con.b.size(); ++i)
            s = std::max(s, std::abs(con.b(i)));
        for (Eigen::Index i = 0; i < con.c.size(); ++i)
            s = std::max(s, std::abs(con.c(i)) * inst.var_scale(i));
        if (s <= 0.0)
            return;
        const double inv = 1.0 / s;
        con.A *= inv;
        con.b *= inv;
        con.c *= inv;
        con.d *= inv;
    };

    // per-UE SINR cones: sqrt(nu) * (co-pilot coherent rows, all K Hadamard
    // leakage rows flattened to one row per (l,t), the noise constant)
    // bounded by the coherent gain towards UE k
    for (int k = 0; k < K; ++k)
    {
        SocConstraint con;
        con.label = "ue:" + std::to_string(k);
        const IndexSet &copilot = problem.copilot_ues[static_cast<size_t>(k)];
        const int n_copilot = static_cast<int>(copilot.size()) - 1;
        const int m = n_copilot + n + 1;
        con.A.resize(m, n);
        con.b = Vector::Zero(m);
        con.c = Vector::Zero(n);

        std::vector<Eigen::Triplet<double>> trip;
        int row = 0;
        for (int t : copilot)
        {
            if (t == k)
                continue;
            for (int l = 0; l < L; ++l)
                if (!masked(l, t))
                    trip.emplace_back(
                        row, idx(l, t),
                        sqrt_nu * std::sqrt(problem.coef.g[static_cast<size_t>(l)](k, t)));
            ++row;
        }
        for (int t = 0; t < K; ++t)
            for (int l = 0; l < L; ++l)
            {
                if (!masked(l, t))
                    trip.emplace_back(
                        row, idx(l, t),
                        sqrt_nu * std::sqrt(problem.coef.z[static_cast<size_t>(l)](k, t)));
                ++row;
            }
        con.b(row) = sqrt_nu; // noise term
        con.A.setFromTriplets(trip.begin(), trip.end());
        for (int l = 0; l < L; ++l)
            if (!masked(l, k))
                con.c(idx(l, k)) = std::sqrt(problem.coef.g[static_cast<size_t>(l)](k, k));
        con.d = 0.0;
        normalize(con);
        inst.constraints.push_back(std::move(con));
    }

    // per-AP power cones: ||u'_l|| <= sqrt(rho_max_l)
    for (int l = 0; l < L; ++l)
    {
        SocConstraint con;
        con.label = "ap:" + std::to_string(l);
        con.A.resize(K, n);
        con.b = Vector::Zero(K);
        con.c = Vector::Zero(n);
        con.d = std::sqrt(problem.rho_max(l));
        std::vector<Eigen::Triplet<double>> trip;
        for (int t = 0; t < K; ++t)
            if (!masked(l, t))
                trip.emplace_back(t, idx(l, t), 1.0);
        con.A.setFromTriplets(trip.begin(), trip.end());
        normalize(con);
        inst.constraints.push_back(std::move(con));
    }
    return inst;
}

FeasibilityReport solve_feasibility(const SocpInstance &inst, double eps_feas,
                                    const Vector *warm_start, int iter_cap)
{
    SolverOptions opt;
    opt.eps_feas = eps_feas;
    opt.iter_cap = iter_cap;
    const Vector x0 = warm_start != nullptr ? *warm_start : Vector::Zero(inst.n);
    return min_max_violation(inst, x0, opt);
}

PowerAllocation maxmin_power(const MaxMinProblem &problem, const Matrix *rho_init)
{
    const int L = static_cast<int>(problem.coef.g.size());
    const int K = static_cast<int>(problem.coef.g.front().rows());
    auto idx = [L](int l, int t) { return t * L + l; };

    PowerAllocation alloc;
    alloc.policy = Policy::MaxMin;

    // interference-free single-UE upper bound
    double nu_hi = 0.0;
    for (int k = 0; k < K; ++k)
    {
        double amp = 0.0;
        for (int l = 0; l < L; ++l)
        {
            const bool served =
                problem.ap_cluster.empty() ||
                std::find(problem.ap_cluster[static_cast<size_t>(k)].begin(),
                          problem.ap_cluster[static_cast<size_t>(k)].end(),
                          l) != problem.ap_cluster[static_cast<size_t>(k)].end();
            if (served)
                amp += std::sqrt(problem.rho_max(l) *
                                 problem.coef.g[static_cast<size_t>(l)](k, k));
        }
        nu_hi = std::max(nu_hi, amp * amp);
    }
    nu_hi *= 1.0 + 1e-9;

    double nu_lo = 0.0;
    Vector witness = Vector::Zero(L * K);
    if (rho_init != nullptr)
    {
        nu_lo = min_sinr(problem, *rho_init) * (1.0 - 1e-12);
        for (int t = 0; t < K; ++t)
            for (int l = 0; l < L; ++l)
                witness(idx(l, t)) = std::sqrt(std::max(0.0, (*rho_init)(l, t)));
    }

    for (int iter = 0; iter < problem.max_bisect_iters; ++iter)
    {
        if (nu_hi - nu_lo <= problem.eps_nu * std::max(1.0, nu_lo))
            break;
        const double nu_mid = 0.5 * (nu_lo + nu_hi);
        const SocpInstance inst = build_socp(problem, nu_mid);
        const FeasibilityReport report =
            solve_feasibility(inst, problem.eps_feas, &witness, problem.solver_iter_cap);

        BisectionStep step;
        step.nu = nu_mid;
        step.status = report.status;
        step.solver_iterations = report.iterations;
        step.max_violation = report.max_violation;
        alloc.trace.push_back(step);

        if (report.status == FeasibilityReport::Status::Feasible)
        {
            nu_lo = nu_mid;
            witness = report.witness;
        }
        else
        {
            if (report.status == FeasibilityReport::Status::Undecided)
                alloc.warnings.push_back("feasibility undecided at nu=" +
                                         std::to_string(nu_mid) + ", treated as infeasible");
            nu_hi = nu_mid;
        }
    }

    alloc.rho = Matrix::Zero(L, K);
    for (int t = 0; t < K; ++t)
        for (int l = 0; l < L; ++l)
            alloc.rho(l, t) = witness(idx(l, t)) * witness(idx(l, t));
    // the eps-feasible witness may overshoot a power budget by a sliver;
    // rescale those rows so the hard constraint holds exactly
    for (int l = 0; l < L; ++l)
    {
        const double used = alloc.rho.row(l).sum();
        if (used > problem.rho_max(l))
            alloc.rho.row(l) *= problem.rho_max(l) / used;
    }
    alloc.nu_achieved = nu_lo;
    alloc.nu_upper = nu_hi;
    return alloc;
}

} // namespace cellfree
