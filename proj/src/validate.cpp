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

#include "cellfree/validate.hpp"

#include "cellfree/channel.hpp"
#include "cellfree/complexity.hpp"
#include "cellfree/monte_carlo.hpp"
#include "cellfree/power.hpp"
#include "cellfree/precoding.hpp"
#include "cellfree/sinr.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace cellfree
{

namespace
{

NetworkConfig small_config()
{
    NetworkConfig cfg;
    cfg.num_aps = 4;
    cfg.antennas_per_ap = 6;
    cfg.num_ues = 5;
    cfg.pilot_len = 3;
    cfg.area_side_m = 400.0;
    return cfg;
}

} // namespace

std::vector<CheckResult> run_validation_suite(std::uint64_t seed, bool quick)
{
    std::vector<CheckResult> results;
    auto run = [&](const std::string &name, const std::function<std::string()> &fn) {
        CheckResult res;
        res.name = name;
        try
        {
            res.detail = fn();
            res.passed = true;
        }
        catch (const std::exception &e)
        {
            res.passed = false;
            res.detail = e.what();
        }
        results.push_back(res);
    };
    auto require = [](bool ok, const std::string &msg) {
        if (!ok)
            throw std::runtime_error(msg);
    };

    const NetworkConfig cfg = small_config();
    const Snapshot snap = generate_snapshot(cfg, seed);
    const EstimatorStats stats = estimator_stats(snap);
    const ChannelState ch = realize_channels(snap, derive_seed(seed, 77));

    run("wrap-around distance", [&] {
        require(std::abs(wrap_distance(0, 0, 999, 0, 1000, 0) - 1.0) < 1e-12, "wrap image");
        require(std::abs(wrap_distance(3, 4, 3, 4, 1000, 8.5) - 8.5) < 1e-12, "height only");
        require(std::abs(wrap_distance(0, 0, 500, 500, 1000, 0) - 500 * std::sqrt(2.0)) < 1e-9,
                "interior");
        return std::string("9-image minimum");
    });

    run("pathloss model", [&] {
        require(std::abs(pathloss_db(1.0) + 30.5) < 1e-12, "1 m");
        require(std::abs(pathloss_db(10.0) + 67.2) < 1e-12, "10 m");
        return std::string("-30.5 dB at 1 m, -36.7 dB/decade");
    });

    run("normalized powers", [&] {
        NetworkConfig c;
        c.ap_power_mw = 200.0;
        c.noise_dbm = -92.0;
        require(std::abs(c.ap_power_normalized() - 3.1698e11) / 3.1698e11 < 1e-3,
                "200 mW over -92 dBm");
        return std::string("rho_max ~ 3.17e11");
    });

    run("co-pilot estimate proportionality", [&] {
        double worst = 0.0;
        for (int l = 0; l < snap.num_aps(); ++l)
            for (int k = 0; k < snap.num_ues(); ++k)
                for (int t : snap.copilot_ues[static_cast<size_t>(k)])
                {
                    if (t == k)
                        continue;
                    const double ratio = std::sqrt(snap.p_ue(k)) * snap.beta(l, k) /
                                         (std::sqrt(snap.p_ue(t)) * snap.beta(l, t));
                    const double err =
                        (ch.h_hat[static_cast<size_t>(l)].col(k) -
                         ratio * ch.h_hat[static_cast<size_t>(l)].col(t))
                            .norm() /
                        ch.h_hat[static_cast<size_t>(l)].col(k).norm();
                    worst = std::max(worst, err);
                }
        require(worst < 1e-12, "proportionality violated: " + std::to_string(worst));
        return "max relative error " + std::to_string(worst);
    });

    run("zero-forcing orthogonality", [&] {
        double worst = 0.0;
        for (int l = 0; l < snap.num_aps(); ++l)
        {
            const CMatrix w = build_ap_precoders(Scheme::FZF, ch, snap, l);
            const CMatrix inner = ch.h_hat[static_cast<size_t>(l)].adjoint() * w;
            for (int k = 0; k < snap.num_ues(); ++k)
                for (int i = 0; i < snap.pilot_len(); ++i)
                {
                    if (i == snap.pilot_of_ue[static_cast<size_t>(k)])
                        continue;
                    const double rel = std::abs(inner(k, i)) /
                                       (ch.h_hat[static_cast<size_t>(l)].col(k).norm() + 1e-300);
                    worst = std::max(worst, rel);
                }
        }
        require(worst < 1e-10, "FZF orthogonality violated: " + std::to_string(worst));
        return "max relative inner product " + std::to_string(worst);
    });

    run("protective projection", [&] {
        double worst = 0.0;
        for (int l = 0; l < snap.num_aps(); ++l)
        {
            const CMatrix w = build_ap_precoders(Scheme::PPZF, ch, snap, l);
            for (int k : snap.strong_ues[static_cast<size_t>(l)])
                for (int i = 0; i < snap.pilot_len(); ++i)
                {
                    if (i == snap.pilot_of_ue[static_cast<size_t>(k)])
                        continue;
                    if (!ch.stats.pilot_in_use[static_cast<size_t>(i)])
                        continue;
                    const double rel =
                        std::abs((ch.h_hat[static_cast<size_t>(l)].col(k).adjoint() * w.col(i))(0)) /
                        (ch.h_hat[static_cast<size_t>(l)].col(k).norm() + 1e-300);
                    worst = std::max(worst, rel);
                }
        }
        require(worst < 1e-10, "PPZF protection violated: " + std::to_string(worst));
        return "max relative inner product " + std::to_string(worst);
    });

    run("grouping closure and dof bound", [&] {
        for (int l = 0; l < snap.num_aps(); ++l)
        {
            require(snap.tau_strong[static_cast<size_t>(l)] <= snap.antennas() - 1,
                    "tau_strong bound violated");
            for (int k : snap.strong_ues[static_cast<size_t>(l)])
                for (int t : snap.copilot_ues[static_cast<size_t>(k)])
                    if (snap.serves(l, t))
                        require(snap.delta(l, t) == 1, "co-pilot closure violated");
        }
        return std::string("S_l closed under co-pilot membership, tau_S <= M-1");
    });

    run("degeneration to FZF / MRT", [&] {
        NetworkConfig c = cfg;
        c.grouping_threshold = 1.0;
        const Snapshot full = generate_snapshot(c, seed);
        const ChannelState chf = realize_channels(full, derive_seed(seed, 78));
        for (int l = 0; l < full.num_aps(); ++l)
        {
            const CMatrix pzf_w = build_ap_precoders(Scheme::PZF, chf, full, l);
            const CMatrix fzf_w = build_ap_precoders(Scheme::FZF, chf, full, l);
            require((pzf_w - fzf_w).cwiseAbs().maxCoeff() == 0.0, "PZF != FZF at upsilon=1");
        }
        c.grouping_threshold = 0.0;
        const Snapshot empty = generate_snapshot(c, seed);
        const ChannelState che = realize_channels(empty, derive_seed(seed, 79));
        for (int l = 0; l < empty.num_aps(); ++l)
        {
            const CMatrix pzf_w = build_ap_precoders(Scheme::PZF, che, empty, l);
            const CMatrix ppzf_w = build_ap_precoders(Scheme::PPZF, che, empty, l);
            const CMatrix mrt_w = build_ap_precoders(Scheme::MRT, che, empty, l);
            require((pzf_w - mrt_w).cwiseAbs().maxCoeff() == 0.0, "PZF != MRT at upsilon=0");
            require((ppzf_w - mrt_w).cwiseAbs().maxCoeff() == 0.0, "PPZF != MRT at upsilon=0");
        }
        return std::string("bit-identical precoders at upsilon in {0, 1}");
    });

    run("precoder unit mean-square norm", [&] {
        const int draws = quick ? 2000 : 10000;
        const PowerAllocation heuristic = heuristic_power(snap, stats);
        const Matrix rzf_norm =
            rzf_normalization(snap, heuristic.rho, quick ? 400 : 1000, derive_seed(seed, 80));
        std::vector<Scheme> schemes = {Scheme::MRT, Scheme::FZF, Scheme::PZF, Scheme::PPZF,
                                       Scheme::RZF};
        Rng rng(derive_seed(seed, 81));
        std::vector<CMatrix> h, h_bar;
        std::vector<double> sums(schemes.size(), 0.0);
        std::vector<int> counts(schemes.size(), 0);
        for (int d = 0; d < draws; ++d)
        {
            realize_channels_light(snap, rng, h, h_bar);
            std::vector<CMatrix> h_hat(static_cast<size_t>(snap.num_aps()));
            for (int l = 0; l < snap.num_aps(); ++l)
            {
                h_hat[static_cast<size_t>(l)].resize(snap.antennas(), snap.num_ues());
                for (int k = 0; k < snap.num_ues(); ++k)
                    h_hat[static_cast<size_t>(l)].col(k) =
                        stats.c(l, k) *
                        h_bar[static_cast<size_t>(l)].col(snap.pilot_of_ue[static_cast<size_t>(k)]);
            }
            for (size_t si = 0; si < schemes.size(); ++si)
            {
                for (int l = 0; l < snap.num_aps(); ++l)
                {
                    const CMatrix w = ap_precoders_from_blocks(
                        schemes[si], h_bar[static_cast<size_t>(l)],
                        &h_hat[static_cast<size_t>(l)], stats, snap, l, &heuristic.rho,
                        &rzf_norm);
                    for (int col = 0; col < w.cols(); ++col)
                    {
                        const double nn = w.col(col).squaredNorm();
                        if (nn > 0.0)
                        {
                            sums[si] += nn;
                            counts[si]++;
                        }
                    }
                }
            }
        }
        std::ostringstream detail;
        for (size_t si = 0; si < schemes.size(); ++si)
        {
            const double mean = sums[si] / counts[si];
            detail << to_string(schemes[si]) << "=" << mean << " ";
            const double tol = quick ? 0.03 : 0.01;
            require(std::abs(mean - 1.0) < tol,
                    to_string(schemes[si]) + " mean-square norm " + std::to_string(mean));
        }
        return detail.str();
    });

    run("heuristic power sums", [&] {
        const PowerAllocation alloc = heuristic_power(snap, stats);
        for (int l = 0; l < snap.num_aps(); ++l)
        {
            const double used = alloc.rho.row(l).sum();
            require(std::abs(used - snap.rho_max(l)) <= 1e-9 * snap.rho_max(l),
                    "AP does not transmit at full power");
        }
        return std::string("per-AP sums equal rho_max");
    });

    run("closed form vs Monte-Carlo", [&] {
        const PowerAllocation heuristic = heuristic_power(snap, stats);
        const int n_mc = quick ? 20000 : 50000;
        std::vector<McSchemeSpec> specs;
        for (Scheme s : {Scheme::MRT, Scheme::FZF, Scheme::PZF, Scheme::PPZF})
        {
            McSchemeSpec mc;
            mc.scheme = s;
            mc.rho = heuristic.rho;
            specs.push_back(mc);
        }
        McOptions opt;
        opt.n_realizations = n_mc;
        opt.seed = derive_seed(seed, 82);
        const auto mc = monte_carlo_se(snap, specs, opt);
        std::ostringstream detail;
        for (size_t si = 0; si < specs.size(); ++si)
        {
            const SinrCoefficients coef = sinr_coefficients(specs[si].scheme, snap, stats);
            for (int k = 0; k < snap.num_ues(); ++k)
            {
                const double cf = sinr_closed_form(coef, snap, heuristic.rho, k);
                const SEResult &res = mc[si][static_cast<size_t>(k)];
                const double dev = std::abs(cf - res.sinr);
                require(dev <= 4.0 * res.sinr_stderr + 1e-9,
                        to_string(specs[si].scheme) + " UE " + std::to_string(k) +
                            " deviates by " + std::to_string(dev / res.sinr_stderr) + " sigma");
            }
        }
        return std::string("all schemes within 4 MC standard errors");
    });

    run("cone solver scalar boundary", [&] {
        // nu (z u^2 + 1) <= g u^2 with u^2 <= rho: feasible iff
        // nu <= g rho / (z rho + 1)
        const double g = 2.5e-8, z = 1.2e-8, rho = 3e11;
        const double nu_star = g * rho / (z * rho + 1.0);
        SinrCoefficients coef;
        coef.scheme = Scheme::MRT;
        coef.g = {Matrix::Constant(1, 1, g)};
        coef.z = {Matrix::Constant(1, 1, z)};
        MaxMinProblem problem;
        problem.coef = coef;
        problem.rho_max = Vector::Constant(1, rho);
        problem.copilot_ues = {{0}};
        const auto feas =
            solve_feasibility(build_socp(problem, 0.99 * nu_star), 1e-6, nullptr, 100000);
        require(feas.status == FeasibilityReport::Status::Feasible, "0.99 nu* infeasible");
        const auto infeas =
            solve_feasibility(build_socp(problem, 1.01 * nu_star), 1e-6, nullptr, 100000);
        require(infeas.status == FeasibilityReport::Status::Infeasible, "1.01 nu* feasible");
        return std::string("scalar threshold bracketed");
    });

    run("complexity table", [&] {
        const ComplexityReport report = complexity(16, 10, 5, 190, 20);
        require(std::abs(report.entries[1].multiplications - 2810.0) < 1e-9, "FZF mults");
        require(std::abs(report.entries[1].divisions - 10.0) < 1e-9, "FZF divisions");
        require(report.entries[3].multiplications >= report.entries[2].multiplications,
                "PPZF cheaper than PZF");
        return std::string("FZF at M=16, tau_p=10: 2810 mults, 10 divisions");
    });

    return results;
}

} // namespace cellfree
