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

#include "cellfree/socp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>

namespace cellfree
{

double SocpInstance::max_violation(const Vector &x) const
{
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto &con : constraints)
        worst = std::max(worst, con.violation(x));
    return worst;
}

namespace
{

struct Stacked
{
    // rows of all constraints, [A_i; c_i^T] blocks, variables pre-scaled
    Eigen::SparseMatrix<double> mat;
    Vector offsetb;            // [b_i; d_i]
    std::vector<int> offsets;  // row offset of each block
    std::vector<int> sizes;    // m_i (cone part, excluding the c row)
};

Stacked stack_constraints(const SocpInstance &inst, const Vector &scale)
{
    Stacked st;
    int rows = 0;
    for (const auto &con : inst.constraints)
    {
        st.offsets.push_back(rows);
        st.sizes.push_back(static_cast<int>(con.A.rows()));
        rows += static_cast<int>(con.A.rows()) + 1;
    }
    st.mat.resize(rows, inst.n);
    st.offsetb.resize(rows);

    std::vector<Eigen::Triplet<double>> trip;
    for (size_t i = 0; i < inst.constraints.size(); ++i)
    {
        const auto &con = inst.constraints[i];
        const int off = st.offsets[i];
        const int m = st.sizes[i];
        for (int col = 0; col < con.A.outerSize(); ++col)
            for (Eigen::SparseMatrix<double>::InnerIterator it(con.A, col); it; ++it)
                trip.emplace_back(off + static_cast<int>(it.row()), col,
                                  it.value() * scale(col));
        st.offsetb.segment(off, m) = con.b;
        for (int col = 0; col < inst.n; ++col)
            if (con.c(col) != 0.0)
                trip.emplace_back(off + m, col, con.c(col) * scale(col));
        st.offsetb(off + m) = con.d;
    }
    st.mat.setFromTriplets(trip.begin(), trip.end());
    st.mat.makeCompressed();
    return st;
}

// Projection onto the second-order cone {(s, r): ||s|| <= r}; the block's
// last entry is r = c^T x + d.
void project_soc_block(Eigen::Ref<Vector> block)
{
    const int m = static_cast<int>(block.size()) - 1;
    const double r = block(m);
    const double ns = block.head(m).norm();
    if (ns <= r)
        return; // inside
    if (ns <= -r)
    {
        block.setZero();
        return;
    }
    const double t = 0.5 * (ns + r);
    if (ns > 0.0)
        block.head(m) *= t / ns;
    block(m) = t;
}

} // namespace

FeasibilityReport min_max_violation(const SocpInstance &inst, const Vector &x0,
                                    const SolverOptions &opt)
{
    const int n = inst.n;
    if (n < 1)
        throw std::invalid_argument("min_max_violation: empty instance");
    if (x0.size() != n)
        throw std::invalid_argument("min_max_violation: bad x0 size");

    Vector scale = inst.var_scale.size() == n ? inst.var_scale : Vector::Ones(n);
    for (int j = 0; j < n; ++j)
        if (!(scale(j) > 0.0))
            scale(j) = 1.0;

    const bool has_mask = static_cast<int>(inst.fixed_zero.size()) == n;
    auto clamp_x = [&](Vector &x) {
        for (int j = 0; j < n; ++j)
        {
            if (x(j) < 0.0)
                x(j) = 0.0;
            if (has_mask && inst.fixed_zero[static_cast<size_t>(j)])
                x(j) = 0.0;
        }
    };

    const Stacked st = stack_constraints(inst, scale);
    const int rows = static_cast<int>(st.mat.rows());

    const Eigen::SparseMatrix<double> normal_sparse = st.mat.transpose() * st.mat;
    Matrix gram = normal_sparse.toDense();
    gram.diagonal().array() += 1.0;
    const Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("min_max_violation: normal-equation factorization failed");

    // state: x part and stacked cone part
    Vector zx = x0.cwiseQuotient(scale);
    clamp_x(zx);
    Vector zv = st.mat * zx + st.offsetb;

    Vector yx(n), yv(rows), ux(n), uv(rows), wx(n), wv(rows);
    Vector cand(n), cand_scaled(n);

    FeasibilityReport report;
    report.max_violation = std::numeric_limits<double>::infinity();
    int checks_since_improvement = 0;

    const int cap = std::max(1, opt.iter_cap);
    for (int iter = 1; iter <= cap; ++iter)
    {
        // project onto the cone product
        yx = zx;
        clamp_x(yx);
        yv = zv;
        for (size_t i = 0; i < st.offsets.size(); ++i)
            project_soc_block(yv.segment(st.offsets[i], st.sizes[i] + 1));

        // reflect, project onto the affine graph
        ux = 2.0 * yx - zx;
        uv = 2.0 * yv - zv;
        wx = llt.solve(ux + st.mat.transpose() * (uv - st.offsetb));
        wv = st.mat * wx + st.offsetb;

        zx += wx - yx;
        zv += wv - yv;

        if (iter % opt.check_interval == 0 || iter == cap)
        {
            cand = wx;
            clamp_x(cand);
            cand_scaled = cand.cwiseProduct(scale);
            const double viol = inst.max_violation(cand_scaled);
            const double improvement = report.max_violation - viol;
            if (viol < report.max_violation)
            {
                report.max_violation = viol;
                report.witness = cand_scaled;
            }
            report.iterations = iter;
            if (report.max_violation <= opt.eps_feas)
            {
                report.status = FeasibilityReport::Status::Feasible;
                return report;
            }
            if (improvement > std::max(1e-14, 1e-9 * std::abs(report.max_violation)))
                checks_since_improvement = 0;
            else if (++checks_since_improvement >= opt.stall_patience)
            {
                report.status = FeasibilityReport::Status::Infeasible;
                return report;
            }
        }
    }
    report.status = FeasibilityReport::Status::Undecided;
    return report;
}

using nlohmann::json;

std::string socp_to_json_text(const SocpInstance &inst)
{
    json j;
    j["n"] = inst.n;
    if (inst.var_scale.size())
        j["var_scale"] = std::vector<double>(inst.var_scale.data(),
                                             inst.var_scale.data() + inst.var_scale.size());
    if (!inst.fixed_zero.empty())
        j["fixed_zero"] = inst.fixed_zero;
    json cons = json::array();
    for (const auto &con : inst.constraints)
    {
        json jc;
        jc["label"] = con.label;
        jc["m"] = static_cast<int>(con.A.rows());
        json rows = json::array(), cols = json::array(), vals = json::array();
        for (int col = 0; col < con.A.outerSize(); ++col)
            for (Eigen::SparseMatrix<double>::InnerIterator it(con.A, col); it; ++it)
            {
                rows.push_back(static_cast<int>(it.row()));
                cols.push_back(col);
                vals.push_back(it.value());
            }
        jc["A"] = {{"rows", rows}, {"cols", cols}, {"vals", vals}};
        jc["b"] = std::vector<double>(con.b.data(), con.b.data() + con.b.size());
        jc["c"] = std::vector<double>(con.c.data(), con.c.data() + con.c.size());
        jc["d"] = con.d;
        cons.push_back(jc);
    }
    j["constraints"] = cons;
    return j.dump();
}

SocpInstance socp_from_json_text(const std::string &text)
{
    const json j = json::parse(text);
    SocpInstance inst;
    inst.n = j.at("n").get<int>();
    if (j.contains("var_scale"))
    {
        const auto v = j.at("var_scale").get<std::vector<double>>();
        inst.var_scale = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    if (j.contains("fixed_zero"))
        inst.fixed_zero = j.at("fixed_zero").get<std::vector<bool>>();
    for (const auto &jc : j.at("constraints"))
    {
        SocConstraint con;
        con.label = jc.value("label", "");
        const int m = jc.at("m").get<int>();
        con.A.resize(m, inst.n);
        const auto rows = jc.at("A").at("rows").get<std::vector<int>>();
        const auto cols = jc.at("A").at("cols").get<std::vector<int>>();
        const auto vals = jc.at("A").at("vals").get<std::vector<double>>();
        std::vector<Eigen::Triplet<double>> trip;
        for (size_t i = 0; i < vals.size(); ++i)
            trip.emplace_back(rows[i], cols[i], vals[i]);
        con.A.setFromTriplets(trip.begin(), trip.end());
        const auto b = jc.at("b").get<std::vector<double>>();
        con.b = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
        const auto c = jc.at("c").get<std::vector<double>>();
        con.c = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
        con.d = jc.at("d").get<double>();
        inst.constraints.push_back(std::move(con));
    }
    return inst;
}

} // namespace cellfree
