// trajectory.hpp: orbit-level simulation on infinite bases. Forward
// compositions, convergence probes, and the Haar, quasiperiodic and i.i.d.
// determinism experiments.

#pragma once

#include "eqp/instances.hpp"
#include "eqp/periodicity.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <vector>

namespace eqp {

inline constexpr std::size_t kKrausSteps = 8;

// ||vec(I)^* T - vec(I)^*||
inline double transfer_tp_residual(const CMat& t, Index d) {
    const CVec one = vec(identity(d));
    return (one.adjoint() * t - one.adjoint()).norm();
}

struct OrbitComposition {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    CMat transfer;                        // Phi^{(n)} in orbit order
    std::optional<KrausChannel> kraus;    // carried while n <= 8
    std::vector<std::size_t> channels;    // channel index per step
    double associativity = 0.0;           // ||T_{n..m+1} T_{m..1} - T||
    double tp_residual = 0.0;

    CMat apply(const CMat& a) const { return unvec(transfer * vec(a), a.rows()); }
};

inline CMat transfer_product(const ProcessInstance& process, const std::vector<std::size_t>& chans, std::size_t from,
                             std::size_t to) {
    const Index d2 = process.dim * process.dim;
    CMat t = CMat::Identity(d2, d2);
    for (std::size_t j = from; j < to; ++j) t = process.channels[chans[j]].transfer() * t;
    return t;
}

// Phi^{(n)}_w = phi_{theta^n w} o ... o phi_{theta w} along orbit(process, start, n, seed).
inline OrbitComposition compose_forward(const ProcessInstance& process, double start, std::size_t n, std::uint64_t seed = 0) {
    if (n == 0) fail(ErrorKind::InvalidArgument, "compose_forward: n must be positive");
    OrbitComposition c;
    c.n = n;
    c.seed = seed;
    for (const auto& s : orbit(process, start, n, seed)) c.channels.push_back(s.channel);
    c.transfer = transfer_product(process, c.channels, 0, n);
    if (n <= kKrausSteps) {
        KrausChannel acc = process.channels[c.channels[0]];
        for (std::size_t j = 1; j < n; ++j) acc = compose(process.channels[c.channels[j]], acc);
        c.kraus = std::move(acc);
    }
    const std::size_t m = n / 2;
    const CMat split = transfer_product(process, c.channels, m, n) * transfer_product(process, c.channels, 0, m);
    c.associativity = (split - c.transfer).norm();
    c.tp_residual = transfer_tp_residual(c.transfer, process.dim);
    return c;
}

struct ConvergenceProbe {
    std::vector<double> deviation;   // ||tr(x) rho - Phi^{(n)}(x)||_1, n = 1..N
    bool decayed = false;            // last deviation below 1e-8; not a certificate of convergence
};

// i.i.d. or constant-rho probe: rho is the same at every point.
inline ConvergenceProbe convergence_probe(const ProcessInstance& process, const CMat& x, const CMat& rho, std::size_t n,
                                          std::uint64_t seed = 0) {
    ConvergenceProbe p;
    const auto steps = orbit(process, 0.0, n, seed);
    CMat y = x;
    for (const auto& s : steps) {
        y = process.channels[s.channel].apply(y);
        p.deviation.push_back(trace_norm(x.trace() * rho - y));
    }
    p.decayed = p.deviation.back() <= 1e-8;
    return p;
}

// ---------------------------------------------------------------------------
// Haar i.i.d. unitaries

struct HaarReport {
    Index d = 0;
    Index rank = 0;
    std::size_t steps = 0;
    std::uint64_t seed = 0;
    double max_deficit_error = 0.0;     // max_n |tr(I - Phi^{(n)}(p)) - (d - r)|
    double max_projection_residual = 0.0;  // max_n ||q^2 - q||, q = Phi^{(n)}(p)
    double min_deviation = 0.0;         // min_n ||(r/d) I - Phi^{(n)}(p)||_1
    double min_deviation_unnormalized = 0.0;  // min_n ||r I - Phi^{(n)}(p)||_1
    std::vector<double> deficit;        // tr(I - Phi^{(n)}(p)) per step
    // peripheral probe on the empirical average of U-bar (x) U
    std::size_t probe_samples = 0;
    double twirl_error = 0.0;           // ||mean - vec(I) vec(I)^* / d||
    double second_modulus = 0.0;        // largest |lambda| besides 1
    bool nontrivial_alpha = false;
};

inline HaarReport haar_experiment(Index d, std::size_t n_steps, std::uint64_t seed, Index rank = 1,
                                  std::size_t probe_samples = 10000) {
    if (d < 2 || d > 6) fail(ErrorKind::InvalidArgument, "haar_experiment: d must lie in 2..6");
    if (rank < 0 || rank > d) fail(ErrorKind::InvalidArgument, "haar_experiment: rank must lie in 0..d");
    HaarReport r;
    r.d = d;
    r.rank = rank;
    r.steps = n_steps;
    r.seed = seed;
    CMat p = CMat::Zero(d, d);
    for (Index i = 0; i < rank; ++i) p(i, i) = 1.0;
    Rng rng = Rng::stream(seed, 1);
    CMat q = p;
    r.min_deviation = r.min_deviation_unnormalized = std::numeric_limits<double>::infinity();
    const double target = static_cast<double>(d - rank);
    for (std::size_t n = 0; n < n_steps; ++n) {
        const CMat u = haar_unitary(rng, d);
        q = u * q * u.adjoint();
        const double deficit = (identity(d) - q).trace().real();
        r.deficit.push_back(deficit);
        r.max_deficit_error = std::max(r.max_deficit_error, std::abs(deficit - target));
        r.max_projection_residual = std::max(r.max_projection_residual, op_norm(q * q - q));
        const double rd = static_cast<double>(rank);
        r.min_deviation = std::min(r.min_deviation, trace_norm(rd / static_cast<double>(d) * identity(d) - q));
        r.min_deviation_unnormalized = std::min(r.min_deviation_unnormalized, trace_norm(rd * identity(d) - q));
    }
    Rng probe = Rng::stream(seed, 2);
    const Index d2 = d * d;
    CMat mean = CMat::Zero(d2, d2);
    for (std::size_t s = 0; s < probe_samples; ++s) {
        const CMat u = haar_unitary(probe, d);
        mean += Eigen::kroneckerProduct(u.conjugate(), u).eval();
    }
    r.probe_samples = probe_samples;
    if (probe_samples > 0) {
        mean /= static_cast<double>(probe_samples);
        const CVec one = vec(identity(d));
        r.twirl_error = op_norm(mean - one * one.adjoint() / static_cast<double>(d));
        auto ev = eigenvalues(mean);
        std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
        r.second_modulus = ev.size() > 1 ? std::abs(ev[1]) : 0.0;
        // nontrivial alpha: a second eigenvalue of modulus near 1
        r.nontrivial_alpha = r.second_modulus >= 0.5;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Two-interval rotation process

struct QuasiperiodicReport {
    double t = 0.0;
    std::size_t horizon = 0;
    std::uint64_t seed = 0;
    double s0 = 0.0;
    cplx alpha;
    double max_eigen_residual = 0.0;   // max_j ||phi*_{s_{j+1}}(u(s_{j+1})) - alpha u(s_j)||
    double p_tau_one = 0.0;            // fraction of orbit points with sigma = 0
    double tau_density = 0.0;
    std::size_t stopping_count = 0;
    std::vector<CMat> partition;       // p_0, p_1 at s0
    cplx phase_average;
    cplx phase_expected;
    std::vector<long> shifts;
};

// u(s) = e_2(s) (|0><0| - |1><1|), a_f(s) = s, alpha = -e_2(t).
inline CMat quasiperiodic_u(double s) {
    CMat z = CMat::Zero(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    return expi_n(2, s) * z;
}

inline QuasiperiodicReport quasiperiodic_experiment(double t, std::size_t horizon, std::uint64_t seed,
                                                    bool keep_shifts = false) {
    if (horizon == 0) fail(ErrorKind::InvalidArgument, "quasiperiodic_experiment: horizon must be positive");
    const ProcessInstance process = quasiperiodic_process(t);
    QuasiperiodicReport r;
    r.t = t;
    r.horizon = horizon;
    r.seed = seed;
    Rng rng = Rng::stream(seed, 0);
    r.s0 = rng.uniform();
    r.alpha = -expi_n(2, t);
    const double t_alpha = turn_of(r.alpha);
    r.partition = root_labeled_projections(quasiperiodic_u(r.s0), r.s0, 2).projections;
    std::vector<long> shifts;
    shifts.reserve(horizon);
    std::size_t zeros = 0;
    double s = r.s0;
    CMat u = quasiperiodic_u(s);
    for (std::size_t j = 1; j <= horizon; ++j) {
        const double s_next = rotation_point(r.s0, t, j);
        const CMat u_next = quasiperiodic_u(s_next);
        const CMat lhs = process.channel_at_rotation(s_next).adjoint_apply(u_next);
        r.max_eigen_residual = std::max(r.max_eigen_residual, op_norm(lhs - r.alpha * u));
        const long sig = mod_n(phase_jump(s_next, s, 2, t_alpha), 2);
        shifts.push_back(sig);
        zeros += sig == 0;
        s = s_next;
        u = u_next;
    }
    r.p_tau_one = static_cast<double>(zeros) / static_cast<double>(horizon);
    const StoppingTimeTrace tr = stopping_times(shifts, 2);
    r.tau_density = tr.density;
    r.stopping_count = tr.taus.size();
    r.phase_average = cesaro_phase_sum(r.alpha, tr.taus, tr.taus.size());
    // mean of e_2(s) over [0, 1) is 2i / pi
    r.phase_expected = cplx(0.0, 2.0 / M_PI) / expi_n(2, r.s0);
    if (keep_shifts) r.shifts = std::move(shifts);
    return r;
}

// ---------------------------------------------------------------------------
// i.i.d. determinism

struct IidProbeReport {
    std::size_t samples = 0;
    std::size_t window = 0;
    std::vector<cplx> peripheral;       // of the averaged channel
    cplx alpha = 1.0;
    std::size_t order = 1;              // N_alpha
    bool nontrivial_alpha = false;
    CMat u;                             // reference eigen-unitary (gauge-fixed)
    double u_variance = 0.0;            // mean ||u_s - mean u||_F^2
    double max_u_deviation = 0.0;       // max ||u_s - u||
    double max_null_next = 0.0;         // worst certificate: second singular value (should be large)
    double max_null_smallest = 0.0;
    double projection_deviation = 0.0;  // max ||p_k(sample) - p_k||
    std::set<long> sigma_values;
    long expected_sigma = 0;
    bool sigma_constant = false;
    std::set<std::size_t> tau_values;
    double zeta_residual = 0.0;         // ||sum_k e_N(k) p_k - zeta u||
    std::vector<CMat> projections;
};

// Gauge: Frobenius norm sqrt(d), largest entry real positive.
inline CMat gauge_fix_unitary(const CVec& v, Index d) {
    CMat x = unvec(v, d);
    x *= std::sqrt(static_cast<double>(d)) / x.norm();
    x *= gauge_phase(x);
    return x;
}

inline IidProbeReport iid_determinism_probe(const ProcessInstance& process, std::size_t samples, std::uint64_t seed,
                                            std::size_t window = 4) {
    if (!process.is_iid()) fail(ErrorKind::UnsupportedBase, "iid_determinism_probe: needs an i.i.d. base");
    const auto& probs = std::get<IIDBase>(process.base).probs;
    const Index d = process.dim, d2 = d * d;
    IidProbeReport r;
    r.samples = samples;
    r.window = window;
    const KrausChannel avg = averaged_channel(process);
    r.peripheral = peripheral_group(avg);
    r.order = r.peripheral.size();
    if (r.order == 1) return r;
    r.nontrivial_alpha = true;
    r.alpha = r.peripheral[1];
    r.u = gauge_fix_unitary(vec(adjoint_eigen_unitary(avg, r.alpha)), d);
    CMat un = identity(d);
    for (std::size_t j = 0; j < r.order; ++j) un = un * r.u;
    const double a_f = turn_of(un.trace() / static_cast<double>(d));
    r.projections = root_labeled_projections(r.u, a_f, r.order).projections;
    const auto big_n = static_cast<long>(r.order);
    const double t_alpha = turn_of(r.alpha);
    r.expected_sigma = mod_n(-static_cast<long>(std::lround(static_cast<double>(big_n) * t_alpha)), big_n);

    CMat sum = CMat::Zero(d, d);
    for (std::size_t k = 0; k < r.order; ++k) sum += expi_n(r.order, static_cast<double>(k)) * r.projections[k];
    const cplx zeta = (r.u.adjoint() * sum).trace() / static_cast<double>(d);
    r.zeta_residual = std::max(op_norm(sum - zeta * r.u), std::abs(std::abs(zeta) - 1.0));

    // per-label shift: phi*_xi(p_0) = p_s
    std::vector<long> label_sigma;
    for (std::size_t a : process.assignment) {
        const CMat img = process.channels[a].adjoint_apply(r.projections[0]);
        long best = -1;
        double dist = 1e-6;
        for (long s = 0; s < big_n; ++s) {
            const double e = op_norm(img - r.projections[static_cast<std::size_t>(s)]);
            if (e <= dist) {
                dist = e;
                best = s;
            }
        }
        label_sigma.push_back(best);
    }

    std::vector<CMat> us;
    us.reserve(samples);
    CMat mean = CMat::Zero(d, d);
    for (std::size_t s = 0; s < samples; ++s) {
        Rng rng = Rng::stream(seed, s);
        // draws are added in windows until the stacked system has a simple null vector
        CMat stack(0, d2);
        std::vector<long> shifts;
        Eigen::BDCSVD<CMat> svd;
        for (std::size_t drawn = 0;; drawn += window) {
            if (drawn >= 64 * window) fail(ErrorKind::NotConverged, "iid_determinism_probe: eigen-unitary not determined by the draws");
            stack.conservativeResize(stack.rows() + static_cast<Index>(window) * d2, d2);
            for (std::size_t j = 0; j < window; ++j) {
                const std::size_t label = rng.categorical(probs);
                const CMat& t = process.channels[process.assignment[label]].transfer();
                stack.middleRows(static_cast<Index>(drawn + j) * d2, d2) = t.adjoint() - r.alpha * CMat::Identity(d2, d2);
                shifts.push_back(label_sigma[label]);
                r.sigma_values.insert(label_sigma[label]);
            }
            svd.compute(stack, Eigen::ComputeFullV);
            if (svd.singularValues()(d2 - 2) > 1e-6) break;
        }
        const auto& sv = svd.singularValues();
        r.max_null_smallest = std::max(r.max_null_smallest, sv(d2 - 1));
        r.max_null_next = s == 0 ? sv(d2 - 2) : std::min(r.max_null_next, sv(d2 - 2));
        CMat us_s = gauge_fix_unitary(svd.matrixV().col(d2 - 1), d);
        r.max_u_deviation = std::max(r.max_u_deviation, op_norm(us_s - r.u));
        const auto ps = root_labeled_projections(us_s, a_f, r.order).projections;
        for (std::size_t k = 0; k < r.order; ++k)
            r.projection_deviation = std::max(r.projection_deviation, op_norm(ps[k] - r.projections[k]));
        bool valid = true;
        for (long x : shifts) valid = valid && x >= 0;
        if (valid && window >= r.order) {
            try {
                r.tau_values.insert(stopping_times(shifts, r.order).taus.front());
            } catch (const Error&) {
                r.tau_values.insert(0);
            }
        }
        mean += us_s;
        us.push_back(std::move(us_s));
    }
    if (samples > 0) {
        mean /= static_cast<double>(samples);
        for (const auto& x : us) r.u_variance += (x - mean).squaredNorm();
        r.u_variance /= static_cast<double>(samples);
    }
    r.sigma_constant = r.sigma_values.size() == 1 && *r.sigma_values.begin() == r.expected_sigma;
    return r;
}

} // namespace eqp
