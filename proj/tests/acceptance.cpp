// Acceptance run: one PASS/FAIL line per criterion, with the worst observed
// value of every pinned quantity and the wall time against its budget.

#include "eqp/parallel.hpp"
#include "eqp/trajectory.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

using namespace eqp;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [violated: " << what << "]";
        }
    }
    // records max value and checks it against a bound
    void bound(const char* name, double value, double limit) {
        detail << ' ' << name << '=' << value;
        std::ostringstream os;
        os << name << " <= " << limit;
        require(value <= limit, os.str());
    }
};

int run(int id, const char* title, double budget_s, const std::function<void(Verdict&)>& body) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(v);
    } catch (const std::exception& e) {
        v.pass = false;
        v.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s) {
        v.pass = false;
        v.detail << " [over time budget]";
    }
    std::printf("%s  %d. %s:%s (%.2f s, budget %.0f s)\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.str().c_str(), secs,
                budget_s);
    std::fflush(stdout);
    return v.pass ? 0 : 1;
}

// max_{a, b in g} dist(ab, g)
double closure_defect(const std::vector<cplx>& g) {
    double worst = 0.0;
    for (cplx a : g)
        for (cplx b : g) {
            double best = 1e300;
            for (cplx c : g) best = std::min(best, std::abs(a * b - c));
            worst = std::max(worst, best);
        }
    return worst;
}

// ||K p - p K p|| over the Kraus operators of a transfer matrix
double invariance_defect(const CMat& transfer, const CMat& p) {
    double worst = 0.0;
    const KrausChannel ch = kraus_from_transfer(transfer);
    for (const auto& k : ch.kraus()) worst = std::max(worst, op_norm(k * p - p * k * p));
    return worst;
}

struct FiniteInstance {
    std::string label;
    ProcessInstance process;
};

std::vector<FiniteInstance> finite_instances() {
    std::vector<FiniteInstance> out;
    const std::vector<std::pair<std::size_t, std::vector<long>>> cases2{{1, {1}}, {2, {1, 0}}, {3, {1, 1, 1}}};
    const std::vector<std::pair<std::size_t, std::vector<long>>> cases3{
        {5, {1, 0, 2, 0, 1}}, {8, {1, 1, 0, 2, 0, 0, 1, 0}}, {4, {0, 0, 1, 0}}};
    std::uint64_t seed = 100;
    for (const auto& [n, s] : cases2) out.push_back({"decorated n=" + std::to_string(n) + " d=2", decorated_cycle(n, 2, s, seed++)});
    for (const auto& [n, s] : cases3) out.push_back({"decorated n=" + std::to_string(n) + " d=3", decorated_cycle(n, 3, s, seed++)});
    out.push_back({"block swap n=3", block_swap_cycle({true, false, false}, seed++)});
    out.push_back({"block swap n=5", block_swap_cycle({true, true, false, true, false}, seed++)});
    return out;
}

} // namespace

int main() {
    int failures = 0;
    std::printf("eqp acceptance run (threads: %zu)\n", worker_count());

    failures += run(1, "cyclic shift, d = 2..6", 5.0, [](Verdict& v) {
        double group = 0.0, rho_err = 0.0, part_err = 0.0, shift_err = 0.0, slowest = 0.0;
        bool simple = true;
        for (Index d = 2; d <= 6; ++d) {
            const auto t0 = std::chrono::steady_clock::now();
            const KrausChannel ch = channels::cyclic_shift(d);
            const PFResult r = ehk_partition(ch);
            v.require(r.irreducible && r.peripheral_group.size() == static_cast<std::size_t>(d), "|Gamma| = d");
            for (Index j = 0; j < d; ++j) {
                const cplx root = expi_n(static_cast<std::size_t>(d), static_cast<double>(j));
                double best = 1e300;
                for (cplx z : r.peripheral_group) best = std::min(best, std::abs(z - root));
                group = std::max(group, best);
                simple = simple && certify_eigenvalue(ch.transfer(), root).simple;
            }
            rho_err = std::max(rho_err, op_norm(*r.steady_state - identity(d) / static_cast<double>(d)));
            // every p_k is a basis projection, all distinct, and phi(p_k) = p_{k+1}
            std::set<Index> used;
            for (Index k = 0; k < d; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                Index j = 0;
                r.partition[ku].diagonal().real().maxCoeff(&j);
                used.insert(j);
                CMat e = CMat::Zero(d, d);
                e(j, j) = 1.0;
                part_err = std::max(part_err, op_norm(r.partition[ku] - e));
                shift_err = std::max(shift_err, op_norm(ch.apply(r.partition[ku]) - r.partition[(ku + 1) % r.m]));
            }
            v.require(used.size() == static_cast<std::size_t>(d), "partition covers every basis vector");
            slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        v.bound("group", group, 1e-8);
        v.require(simple, "every peripheral eigenvalue simple");
        v.detail << " simple=" << (simple ? "yes" : "no");
        v.bound("basis_projection", part_err, 1e-8);
        v.bound("shift", shift_err, 1e-8);
        v.bound("rho", rho_err, 1e-10);
        v.bound("slowest_d_seconds", slowest, 1.0);
    });

    failures += run(2, "random irreducible channels, 100 per d in {2,3,4}", 60.0, [](Verdict& v) {
        struct Row {
            double closure = 0, containment = 0, decomposition = 0;
            std::size_t m = 0;
            Index d = 0;
            bool agree = false;
        };
        const std::size_t per_d = 100;
        const auto rows = parallel_map<Row>(3 * per_d, [&](std::size_t i) {
            Row row;
            row.d = static_cast<Index>(2 + i / per_d);
            Rng rng = Rng::stream(2024, i);
            const auto m = static_cast<Index>(1 + rng.below(static_cast<std::size_t>(row.d)));
            const KrausChannel ch = random_block_cyclic_channel(rng, row.d, m);
            const PFResult r = ehk_partition(ch);
            row.m = r.m;
            row.closure = closure_defect(r.peripheral_group);
            const auto res = check_partition(ch, r.partition, *r.steady_state, rng);
            row.containment = res.containment;
            row.decomposition = res.decomposition;
            row.agree = is_primitive(ch).primitive == (r.m == 1);
            return row;
        });
        double closure = 0, containment = 0, decomposition = 0;
        std::size_t agree = 0, m_ok = 0, periodic = 0;
        for (const auto& r : rows) {
            closure = std::max(closure, r.closure);
            containment = std::max(containment, r.containment);
            decomposition = std::max(decomposition, r.decomposition);
            agree += r.agree;
            m_ok += static_cast<Index>(r.m) <= r.d;
            periodic += r.m > 1;
        }
        v.bound("closure", closure, 1e-8);
        v.bound("containment", containment, 1e-8);
        v.bound("decomposition", decomposition, 1e-8);
        v.detail << " m<=d=" << m_ok << "/" << rows.size() << " primitivity_agrees=" << agree << "/" << rows.size()
                 << " (periodic: " << periodic << ")";
        v.require(m_ok == rows.size(), "m <= d on every channel");
        v.require(agree == rows.size(), "primitivity verdict agrees with m == 1 on every channel");
    });

    const auto finite = finite_instances();

    failures += run(3, "finite-base structure (decorated cycles, block swaps)", 30.0, [&](Verdict& v) {
        double inclusion = 0, match = 0, shift = 0, weight = 0;
        bool sizes = true, skew = true, birkhoff = true;
        std::size_t partitions = 0;
        for (const auto& inst : finite) {
            const auto& p = inst.process;
            const SpectralReport rep = peripheral_and_gamma(p);
            inclusion = std::max(inclusion, rep.koopman_inclusion);
            sizes = sizes && rep.gamma.size() <= static_cast<std::size_t>(p.dim * p.dim);
            for (const auto& c : rep.gamma) {
                sizes = sizes && c.order <= static_cast<std::size_t>(p.dim);
                const Eigentuple e = eigentuple(p, rep, c.representative);
                const PeriodicPartition part = build_partition(e, p.cycle(), rep.rho);
                Rng rng = Rng::stream(3, partitions++);
                const auto res = verify_partition_theorem(p, part, rep.rho, rng, 5);
                match = std::max(match, part.match_distance);
                shift = std::max(shift, verify_shift_relation(p, part));
                weight = std::max(weight, res.block_weight);
                const auto sk = skew_ergodicity(part, p.cycle());
                skew = skew && sk.ergodic;
                birkhoff = birkhoff && sk.birkhoff_error == 0.0;
            }
        }
        v.detail << " instances=" << finite.size() << " partitions=" << partitions;
        v.bound("koopman_inclusion", inclusion, 1e-8);
        v.require(sizes, "|Gamma| <= d^2 and N_alpha <= d");
        v.bound("root_matching", match, 1e-7);
        v.bound("shift", shift, 1e-8);
        v.bound("block_weight", weight, 1e-8);
        v.require(skew, "skew product is a single cycle");
        v.require(birkhoff, "Birkhoff frequency exactly 1/N_alpha");
        v.detail << " skew_single_cycle=" << (skew && birkhoff ? "yes" : "no");
    });

    failures += run(4, "quasiperiodic process, t = 0.6180339887, horizon 1e5, 8 seeds", 30.0, [](Verdict& v) {
        const double t = 0.6180339887;
        const auto reps = parallel_map<QuasiperiodicReport>(8, [&](std::size_t s) { return quasiperiodic_experiment(t, 100000, 40 + s); });
        double eig = 0, ptau = 0, dens = 0;
        for (const auto& r : reps) {
            eig = std::max(eig, r.max_eigen_residual);
            ptau = std::max(ptau, std::abs(r.p_tau_one - t));
            dens = std::max(dens, std::abs(r.tau_density - 0.5));
        }
        v.bound("eigen_residual", eig, 1e-10);
        v.bound("|P(tau=1)-t|", ptau, 2e-2);
        v.bound("|density-1/2|", dens, 2e-2);
    });

    failures += run(5, "Haar conjugations, d in {2,3}, n = 100, 8 seeds", 60.0, [](Verdict& v) {
        const auto reps = parallel_map<HaarReport>(16, [](std::size_t i) {
            return haar_experiment(static_cast<Index>(2 + i / 8), 100, 500 + i, 1, 10000);
        });
        double deficit = 0, deviation_margin = 1e300;
        bool alpha = false;
        for (const auto& r : reps) {
            deficit = std::max(deficit, r.max_deficit_error);
            deviation_margin = std::min(deviation_margin, r.min_deviation - 1.0 / static_cast<double>(r.d));
            alpha = alpha || r.nontrivial_alpha;
        }
        std::size_t probe_alpha = 0;
        for (Index d : {2, 3}) probe_alpha += iid_determinism_probe(iid_haar(d, 6, 77 + static_cast<std::uint64_t>(d)), 10, 1).nontrivial_alpha;
        v.bound("deficit", deficit, 1e-8);
        v.detail << " min(deviation - 1/d)=" << deviation_margin;
        v.require(deviation_margin >= -1e-12, "deviation >= 1/d");
        v.require(!alpha && probe_alpha == 0, "no nontrivial alpha");
        v.detail << " nontrivial_alpha=" << (alpha || probe_alpha ? "found" : "none");
    });

    failures += run(6, "i.i.d. phase-decorated shifts, d = 3, 1e4 samples", 60.0, [](Verdict& v) {
        const auto r = iid_determinism_probe(iid_decorated_shift(3, 4, 606), 10000, 607);
        v.require(r.nontrivial_alpha && r.order == 3, "N_alpha = 3");
        v.bound("u_variance", r.u_variance, 1e-8);
        v.bound("projection_deviation", r.projection_deviation, 1e-8);
        v.detail << " sigma={";
        for (long s : r.sigma_values) v.detail << s;
        v.detail << "} tau={";
        for (auto t : r.tau_values) v.detail << t;
        v.detail << "}";
        v.require(r.sigma_constant, "sigma constant");
        v.require(r.tau_values.size() == 1 && *r.tau_values.begin() == r.order, "tau = N_alpha at every sample");
    });

    failures += run(7, "Cesaro projector on every finite-base instance", 60.0, [&](Verdict& v) {
        std::vector<FiniteInstance> all = finite;
        for (Index d = 2; d <= 6; ++d) all.push_back({"cyclic shift", trivial_base(channels::cyclic_shift(d))});
        std::vector<CesaroChecks> checks(all.size());
        parallel_for(all.size(), [&](std::size_t i) {
            const auto& p = all[i].process;
            const SpectralReport rep = peripheral_and_gamma(p);
            const Eigentuple e = eigentuple(p, rep, rep.gamma[generator_coset(rep)].representative);
            const PeriodicPartition part = build_partition(e, p.cycle(), rep.rho);
            Rng rng = Rng::stream(7, i);
            checks[i] = check_cesaro(cesaro_projector(p, part), rep.rho, rng, 50);
        });
        double idem = 0, inner = 0, faithful = 1e300;
        for (const auto& c : checks) {
            idem = std::max(idem, c.idempotency);
            inner = std::max(inner, c.inner_product);
            faithful = std::min(faithful, c.faithfulness_min);
        }
        v.detail << " instances=" << all.size();
        v.bound("idempotency", idem, 1e-6);
        v.bound("inner_product", inner, 1e-6);
        v.detail << " min_point_norm=" << faithful;
        v.require(faithful > 1e-10, "E(x) nonzero at every point");
    });

    failures += run(8, "aperiodicity on trivial-base and i.i.d. instances", 60.0, [](Verdict& v) {
        std::vector<ProcessInstance> inst;
        for (Index d = 2; d <= 6; ++d) inst.push_back(trivial_base(channels::cyclic_shift(d)));
        inst.push_back(trivial_base(channels::depolarizing(3, 0.5)));
        for (std::uint64_t s = 0; s < 6; ++s) {
            Rng rng(800 + s);
            const Index d = 3 + static_cast<Index>(s % 2);
            inst.push_back(trivial_base(random_block_cyclic_channel(rng, d, 1 + static_cast<Index>(s % 3))));
        }
        inst.push_back(iid_haar(2, 6, 810));
        inst.push_back(iid_haar(3, 6, 811));
        inst.push_back(iid_decorated_shift(3, 4, 812));
        inst.push_back(iid_decorated_shift(2, 3, 813));
        inst.push_back(iid_block_cyclic(4, 2, 3, 814));
        inst.push_back(iid_block_cyclic(3, 3, 3, 815));

        std::size_t aperiodic = 0, periodic = 0, agree = 0;
        double witness = 0;
        for (std::size_t i = 0; i < inst.size(); ++i) {
            const auto& p = inst[i];
            const KrausChannel avg = averaged_channel(p);
            const PFResult r = ehk_partition(avg);
            const auto a = aperiodicity_check(p, 8);
            if (r.m == 1) {
                ++aperiodic;
                agree += !a.first_reducible.has_value();
                continue;
            }
            ++periodic;
            agree += a.first_reducible.has_value() && *a.first_reducible <= r.m;
            // P_alpha witness: p_0 reduces the averaged power and sampled m-step compositions
            CMat tm = CMat::Identity(avg.transfer().rows(), avg.transfer().cols());
            for (std::size_t k = 0; k < r.m; ++k) tm = avg.transfer() * tm;
            witness = std::max(witness, invariance_defect(tm, r.partition[0]));
            Rng rng = Rng::stream(88, i);
            for (int s = 0; s < 20; ++s) {
                CMat t = CMat::Identity(tm.rows(), tm.cols());
                for (std::size_t k = 0; k < r.m; ++k) t = p.channels[p.assignment[rng.categorical(p.is_iid() ? std::get<IIDBase>(p.base).probs : std::vector<double>{1.0})]].transfer() * t;
                witness = std::max(witness, invariance_defect(t, r.partition[0]));
            }
        }
        v.detail << " aperiodic=" << aperiodic << " periodic=" << periodic << " agree=" << agree << "/" << inst.size();
        v.require(agree == inst.size(), "reducible power exists iff |Gamma| > 1, first one at most m");
        v.bound("witness", witness, 1e-8);
    });

    std::printf("%s: %d of 8 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
