// analyses.hpp: the analysis suites behind the command-line verbs, each
// returning JSON results, acceptance checks and optional per-step series.

#pragma once

#include "eqp/io/report.hpp"
#include "eqp/trajectory.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace eqp::io {

struct RunOptions {
    double tol = 1e-8;
    std::uint64_t seed = 0;
    std::size_t horizon = 1000;
    std::size_t samples = 10000;
    std::size_t n_avg = 2000;
    std::size_t n_max = 8;
    std::vector<std::string> analyses;   // empty: every analysis valid for the base

    bool wants(const std::string& a) const {
        return analyses.empty() || std::find(analyses.begin(), analyses.end(), a) != analyses.end();
    }
};

inline RunOptions options_from(const ProcessConfig& c) {
    return {c.tolerances.tol, c.seed, c.horizon, c.samples, c.n_avg, c.n_max, c.analyses};
}

inline json to_json(const RandomMatrix& r) {
    json a = json::array();
    for (const auto& b : r.blocks) a.push_back(to_json(b));
    return a;
}

inline const char* to_json_name(Minimality m) { return to_string(m); }

// ---------------------------------------------------------------------------
// Finite cycle base

inline Outcome run_finite(const ProcessInstance& process, const RunOptions& opt) {
    Outcome out;
    const FiniteCycleBase& base = process.cycle();
    const Index d = process.dim;
    out.results["base_size"] = base.size();
    out.results["dim"] = d;
    if (static_cast<Index>(base.size()) * d * d > kMaxGlobalSize)
        fail(ErrorKind::InvalidArgument, "global operator exceeds the size cap n d^2 <= 4096");

    const SteadyState ss = steady_state(process, opt.tol);
    out.results["irreducible"] = ss.irreducible;
    out.results["fixed_dimension"] = ss.fixed_dimension;
    out.checks.truth("irreducible", ss.irreducible);
    if (!ss.irreducible) {
        if (ss.witness) out.results["witness"] = to_json(*ss.witness);
        out.results["witness_search_failed"] = ss.witness_search_failed;
        return out;
    }
    out.results["steady_state"] = to_json(ss.rho);
    out.checks.le("steady_state.transport", ss.transport_residual, 1e-9);

    const SpectralReport rep = peripheral_and_gamma(process, opt.tol);
    {
        json g = json::array();
        for (const auto& c : rep.gamma)
            g.push_back({{"representative", to_json(c.representative)},
                         {"order", c.order},
                         {"coset_members", to_json(c.members)},
                         {"certificate", {c.certificate_smallest, c.certificate_next}}});
        out.results["spectral"] = {{"peripheral", to_json(rep.peripheral)},
                                   {"koopman", to_json(rep.koopman)},
                                   {"gamma", g},
                                   {"spectral_radius", rep.spectral_radius}};
        out.checks.le("spectral.koopman_inclusion", rep.koopman_inclusion, 1e-8);
        out.checks.le("spectral.gamma_size", static_cast<double>(rep.gamma.size()), static_cast<double>(d * d));
        out.checks.le("spectral.radius_excess", std::abs(rep.spectral_radius - 1.0), 1e-9);
        std::size_t max_order = 0;
        for (const auto& c : rep.gamma) max_order = std::max(max_order, c.order);
        out.checks.le("spectral.max_order", static_cast<double>(max_order), static_cast<double>(d));
    }
    json tuples = json::array();
    for (const auto& c : rep.gamma) {
        const Eigentuple e = eigentuple(process, rep, c.representative);
        const std::string tag = "eigentuple[" + std::to_string(tuples.size()) + "].";
        out.checks.le(tag + "eigen", e.eigen_residual, 1e-8);
        out.checks.le(tag + "unitarity", e.unitarity_residual, 1e-9);
        out.checks.le(tag + "power", e.power_residual, 1e-8);
        out.checks.le(tag + "factorization", factorization_residual(process, e, rep.rho), 1e-8);
        tuples.push_back({{"alpha", to_json(e.alpha)}, {"beta", to_json(e.beta)}, {"order", e.order}, {"a_f", e.a_f}});
    }
    out.results["eigentuples"] = tuples;

    const Eigentuple gen = eigentuple(process, rep, rep.gamma[generator_coset(rep)].representative);
    const PeriodicPartition part = build_partition(gen, base, rep.rho);
    if (opt.wants("partition")) {
        json ps = json::array();
        for (const auto& p : part.projections) ps.push_back(to_json(p));
        Rng rng = Rng::stream(opt.seed, 3);
        const auto r = verify_partition_theorem(process, part, rep.rho, rng);
        const auto sk = skew_ergodicity(part, base);
        out.results["partition"] = {{"alpha", to_json(part.alpha)},
                                    {"N_alpha", part.order},
                                    {"sigma_table", part.sigma},
                                    {"xi", part.xi},
                                    {"projections", ps},
                                    {"match_distance", part.match_distance},
                                    {"skew_cycle_length", sk.cycle_length},
                                    {"residuals",
                                     {{"shift", verify_shift_relation(process, part)},
                                      {"containment", r.containment},
                                      {"decomposition", r.decomposition},
                                      {"block_weight", r.block_weight},
                                      {"conditional_transport", r.conditional_transport},
                                      {"partition_of_unity", r.partition_of_unity}}}};
        out.checks.le("partition.match_distance", part.match_distance, 1e-7);
        out.checks.le("partition.shift", verify_shift_relation(process, part), 1e-8);
        out.checks.le("partition.containment", r.containment, 1e-8);
        out.checks.le("partition.decomposition", r.decomposition, 1e-8);
        out.checks.le("partition.block_weight", r.block_weight, 1e-8);
        out.checks.le("partition.conditional_transport", r.conditional_transport, 1e-8);
        out.checks.truth("partition.skew_single_cycle", sk.ergodic);
        out.checks.eq("partition.birkhoff_error", sk.birkhoff_error, 0.0);
    }
    if (opt.wants("stopping_times")) {
        const auto tr = stopping_times(part, base, 0, opt.horizon);
        const auto avg = cesaro_phase_average(gen, tr, 0);
        out.results["stopping_times"] = {{"horizon", tr.horizon},
                                         {"count", tr.taus.size()},
                                         {"tau_density", tr.density},
                                         {"first", std::vector<std::size_t>(tr.taus.begin(), tr.taus.begin() + static_cast<long>(std::min<std::size_t>(tr.taus.size(), 16)))},
                                         {"phase_average", to_json(avg.estimate)},
                                         {"phase_expected", to_json(avg.expected)}};
        out.checks.le("stopping_times.density", std::abs(tr.density - 1.0 / static_cast<double>(part.order)), 2e-2);
        out.checks.le("stopping_times.phase_average", std::abs(avg.estimate - avg.expected), 5e-2);
        out.series.columns = {"n", "cumulative_shift"};
        for (std::size_t j = 0; j < tr.cumulative.size(); ++j)
            out.series.rows.push_back({static_cast<double>(j + 1), static_cast<double>(tr.cumulative[j])});
    }
    if (opt.wants("cesaro")) {
        const auto c = cesaro_projector(process, part, opt.n_avg);
        Rng rng = Rng::stream(opt.seed, 4);
        const auto chk = check_cesaro(c, rep.rho, rng, 50);
        out.results["cesaro"] = {{"warmup", c.warmup},
                                 {"averaging_length", c.averaging_length},
                                 {"idempotency", chk.idempotency},
                                 {"commutation", chk.commutation},
                                 {"positivity", chk.positivity},
                                 {"inner_product", chk.inner_product},
                                 {"faithfulness_min", chk.faithfulness_min}};
        out.checks.le("cesaro.idempotency", chk.idempotency, 1e-6);
        out.checks.le("cesaro.commutation", chk.commutation, 1e-6);
        out.checks.ge("cesaro.positivity", chk.positivity, -1e-8);
        out.checks.le("cesaro.inner_product", chk.inner_product, 1e-6);
        out.checks.ge("cesaro.faithfulness_min", chk.faithfulness_min, 1e-8);
    }
    if (opt.wants("minimality")) {
        json v = json::array();
        for (const auto& m : minimality_check(process, part))
            v.push_back({{"verdict", to_string(m.verdict)}, {"rank", m.rank}});
        out.results["minimality"] = v;
    }
    if (opt.wants("aperiodicity")) {
        const auto a = aperiodicity_check(process, opt.n_max);
        out.results["aperiodicity"] = {{"n_max", opt.n_max},
                                       {"first_reducible", a.first_reducible ? json(*a.first_reducible) : json(nullptr)}};
    }
    return out;
}

// ---------------------------------------------------------------------------
// i.i.d. base

inline Outcome run_iid(const ProcessInstance& process, const RunOptions& opt) {
    Outcome out;
    const KrausChannel avg = averaged_channel(process);
    const PFResult pf = is_irreducible(avg, opt.tol);
    out.results["averaged_irreducible"] = pf.irreducible;
    out.checks.truth("averaged_irreducible", pf.irreducible);
    if (!pf.irreducible) return out;
    const PFResult ehk = ehk_partition(avg, opt.tol);
    out.results["gamma_order"] = ehk.m;
    out.results["peripheral"] = to_json(ehk.peripheral_group);
    if (opt.wants("iid_probe") && ehk.m > 1) {
        const auto r = iid_determinism_probe(process, opt.samples, opt.seed);
        json taus = json::array();
        for (auto t : r.tau_values) taus.push_back(t);
        out.results["iid_probe"] = {{"alpha", to_json(r.alpha)},
                                    {"N_alpha", r.order},
                                    {"samples", r.samples},
                                    {"u_variance", r.u_variance},
                                    {"projection_deviation", r.projection_deviation},
                                    {"sigma_values", std::vector<long>(r.sigma_values.begin(), r.sigma_values.end())},
                                    {"expected_sigma", r.expected_sigma},
                                    {"tau_values", taus},
                                    {"zeta_residual", r.zeta_residual}};
        out.checks.le("iid_probe.u_variance", r.u_variance, 1e-8);
        out.checks.le("iid_probe.projection_deviation", r.projection_deviation, 1e-8);
        out.checks.truth("iid_probe.sigma_constant", r.sigma_constant);
        out.checks.truth("iid_probe.tau_equals_order", r.tau_values.size() == 1 && *r.tau_values.begin() == r.order);
    }
    if (opt.wants("minimality") && ehk.m > 1) {
        json v = json::array();
        for (const auto& m : minimality_check(avg, ehk.partition, ehk.m))
            v.push_back({{"verdict", to_string(m.verdict)}, {"rank", m.rank}});
        out.results["minimality"] = v;
    }
    if (opt.wants("aperiodicity")) {
        const auto a = aperiodicity_check(process, opt.n_max);
        out.results["aperiodicity"] = {{"n_max", opt.n_max},
                                       {"first_reducible", a.first_reducible ? json(*a.first_reducible) : json(nullptr)}};
        if (ehk.m == 1)
            out.checks.truth("aperiodicity.none_reducible", !a.first_reducible.has_value());
        else
            out.checks.truth("aperiodicity.reducible_by_order", a.first_reducible && *a.first_reducible <= ehk.m);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rotation base: composition along a sampled orbit

inline Outcome run_rotation(const ProcessInstance& process, const RunOptions& opt) {
    Outcome out;
    Rng rng = Rng::stream(opt.seed, 0);
    const double s0 = rng.uniform();
    const auto c = compose_forward(process, s0, opt.horizon);
    out.results["compose"] = {{"start", s0}, {"n", c.n}, {"associativity", c.associativity}, {"tp_residual", c.tp_residual}};
    out.checks.le("compose.associativity", c.associativity, 1e-10);
    out.checks.le("compose.tp_residual", c.tp_residual, 1e-7);
    return out;
}

inline Outcome run_process(const ProcessInstance& process, const RunOptions& opt) {
    if (process.is_finite()) return run_finite(process, opt);
    if (process.is_iid()) return run_iid(process, opt);
    return run_rotation(process, opt);
}

// ---------------------------------------------------------------------------
// Single channel

inline Outcome run_ehk(const KrausChannel& ch, const RunOptions& opt) {
    Outcome out;
    const auto cp = is_cptp(ch);
    out.checks.truth("cptp", cp.ok());
    const PFResult pf = is_irreducible(ch, opt.tol);
    out.results["irreducible"] = pf.irreducible;
    out.checks.truth("irreducible", pf.irreducible);
    if (!pf.irreducible) {
        if (pf.witness) out.results["witness"] = to_json(*pf.witness);
        return out;
    }
    const PFResult ehk = ehk_partition(ch, opt.tol);
    out.results["steady_state"] = to_json(*pf.steady_state);
    out.results["peripheral_group"] = to_json(ehk.peripheral_group);
    out.results["m"] = ehk.m;
    json ps = json::array();
    for (const auto& p : ehk.partition) ps.push_back(to_json(p));
    out.results["partition"] = ps;
    Rng rng = Rng::stream(opt.seed, 5);
    const auto r = check_partition(ch, ehk.partition, *pf.steady_state, rng);
    out.results["residuals"] = {{"containment", r.containment},
                                {"block_leakage", r.block_leakage},
                                {"decomposition", r.decomposition},
                                {"partition_of_unity", r.partition_of_unity}};
    out.checks.le("partition.containment", r.containment, 1e-8);
    out.checks.le("partition.decomposition", r.decomposition, 1e-8);
    out.checks.le("partition.unity", r.partition_of_unity, 1e-8);
    const auto prim = is_primitive(ch);
    out.results["primitive"] = prim.primitive;
    out.results["primitivity_steps"] = prim.steps;
    out.checks.truth("primitivity_matches_order", prim.primitive == (ehk.m == 1));
    return out;
}

// ---------------------------------------------------------------------------
// Experiments

inline Outcome simulate_quasiperiodic(double t, std::size_t horizon, std::uint64_t seed) {
    Outcome out;
    const auto r = quasiperiodic_experiment(t, horizon, seed, true);
    out.results = {{"t", r.t},
                   {"horizon", r.horizon},
                   {"seed", r.seed},
                   {"start", r.s0},
                   {"alpha", to_json(r.alpha)},
                   {"max_eigen_residual", r.max_eigen_residual},
                   {"p_tau_one", r.p_tau_one},
                   {"tau_density", r.tau_density},
                   {"stopping_count", r.stopping_count},
                   {"partition", {to_json(r.partition[0]), to_json(r.partition[1])}},
                   {"phase_average", to_json(r.phase_average)},
                   {"phase_expected", to_json(r.phase_expected)}};
    out.checks.le("eigen_residual", r.max_eigen_residual, 1e-10);
    out.checks.le("p_tau_one", std::abs(r.p_tau_one - t), 2e-2);
    out.checks.le("tau_density", std::abs(r.tau_density - 0.5), 2e-2);
    out.checks.le("phase_average", std::abs(r.phase_average - r.phase_expected), 5e-2);
    out.series.columns = {"n", "shift"};
    for (std::size_t j = 0; j < r.shifts.size(); ++j)
        out.series.rows.push_back({static_cast<double>(j + 1), static_cast<double>(r.shifts[j])});
    return out;
}

inline Outcome simulate_haar(Index d, std::size_t steps, std::uint64_t seed, std::size_t probe_samples = 10000) {
    Outcome out;
    const auto r = haar_experiment(d, steps, seed, 1, probe_samples);
    out.results = {{"d", r.d},
                   {"rank", r.rank},
                   {"steps", r.steps},
                   {"seed", r.seed},
                   {"max_deficit_error", r.max_deficit_error},
                   {"max_projection_residual", r.max_projection_residual},
                   {"min_deviation", r.min_deviation},
                   {"min_deviation_unnormalized", r.min_deviation_unnormalized},
                   {"probe_samples", r.probe_samples},
                   {"twirl_error", r.twirl_error},
                   {"second_modulus", r.second_modulus},
                   {"nontrivial_alpha", r.nontrivial_alpha}};
    out.checks.le("trace_deficit", r.max_deficit_error, 1e-8);
    out.checks.ge("deviation", r.min_deviation, 1.0 / static_cast<double>(d) - 1e-12);
    out.checks.truth("no_nontrivial_alpha", !r.nontrivial_alpha);
    if (probe_samples > 0) out.checks.le("twirl", r.twirl_error, 5e-2);
    out.series.columns = {"n", "trace_deficit"};
    for (std::size_t j = 0; j < r.deficit.size(); ++j) out.series.rows.push_back({static_cast<double>(j + 1), r.deficit[j]});
    return out;
}

inline Outcome simulate_iid_decorated_shift(Index d, std::size_t samples, std::uint64_t seed) {
    RunOptions opt;
    opt.seed = seed;
    opt.samples = samples;
    return run_iid(iid_decorated_shift(d, 2, seed), opt);
}

// ---------------------------------------------------------------------------
// Built-in examples

struct ExampleEntry {
    std::string name;
    std::string anchor;
    std::string description;
};

inline const std::vector<ExampleEntry>& example_registry() {
    static const std::vector<ExampleEntry> r{
        {"cyclic-shift", "single channel: cyclic shift on d levels",
         "peripheral group of d-th roots of unity, basis-projection partition, steady state I/d"},
        {"quasiperiodic", "two-interval rotation process: dephasing and flip",
         "eigen-unitary e_2(s) diag(1, -1), P(tau = 1) = t, stopping-time density 1/2"},
        {"haar", "i.i.d. Haar unitary conjugations",
         "trivial Gamma without strong irreducibility: constant trace deficit of a projection"},
        {"iid-decorated-shift", "i.i.d. phase-decorated shifts",
         "deterministic eigen-unitary, constant shift, stopping time equal to N_alpha"},
        {"decorated-cycle", "finite cycle of decorated shifts",
         "Gamma cosets, random partition, skew product, Cesaro projector"},
    };
    return r;
}

struct ExampleRequest {
    std::string name;
    Index d = 3;
    double t = 0.6180339887;
    std::size_t horizon = 100000;
    std::size_t samples = 10000;
    std::uint64_t seed = 7;
};

inline json to_json(const ExampleRequest& r) {
    return json{{"name", r.name}, {"d", r.d}, {"t", r.t}, {"horizon", r.horizon}, {"samples", r.samples}, {"seed", r.seed}};
}

inline Outcome run_example(const ExampleRequest& req) {
    if (req.name == "cyclic-shift") {
        if (req.d < 2 || req.d > 6) fail(ErrorKind::InvalidArgument, "cyclic-shift: d must lie in 2..6");
        const KrausChannel ch = channels::cyclic_shift(req.d);
        Outcome out = run_ehk(ch, RunOptions{});
        RunOptions opt;
        opt.seed = req.seed;
        opt.horizon = std::max<std::size_t>(std::min<std::size_t>(req.horizon, 10000), 1);
        const Outcome fin = run_finite(trivial_base(ch), opt);
        out.results["finite_base"] = fin.results;
        out.checks.append(fin.checks, "finite_base.");
        double rho_err = 0.0;
        for (const auto& b : is_irreducible(ch).steady_state ? std::vector<CMat>{*is_irreducible(ch).steady_state} : std::vector<CMat>{})
            rho_err = op_norm(b - identity(req.d) / static_cast<double>(req.d));
        out.checks.le("steady_state_is_maximally_mixed", rho_err, 1e-10);
        out.results["gamma_order"] = fin.results["spectral"]["gamma"].size();
        out.checks.eq("gamma_order", static_cast<double>(fin.results["spectral"]["gamma"].size()), static_cast<double>(req.d));
        return out;
    }
    if (req.name == "quasiperiodic") return simulate_quasiperiodic(req.t, req.horizon, req.seed);
    if (req.name == "haar") {
        if (req.d < 2 || req.d > 6) fail(ErrorKind::InvalidArgument, "haar: d must lie in 2..6");
        return simulate_haar(req.d, std::min<std::size_t>(req.horizon, 100), req.seed, req.samples);
    }
    if (req.name == "iid-decorated-shift") return simulate_iid_decorated_shift(req.d, req.samples, req.seed);
    if (req.name == "decorated-cycle") {
        RunOptions opt;
        opt.seed = req.seed;
        opt.horizon = std::min<std::size_t>(req.horizon, 10000);
        const Index d = std::clamp<Index>(req.d, 2, 3);
        return run_finite(decorated_cycle(5, d, {1, 0, 2, 0, 1}, req.seed), opt);
    }
    fail(ErrorKind::InvalidArgument, "unknown example '" + req.name + "'");
}

} // namespace eqp::io
