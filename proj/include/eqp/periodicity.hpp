// periodicity.hpp: random partitions of unity attached to a peripheral
// eigenvalue, the shift function, skew product, stopping times, Cesaro
// projectors, minimality and aperiodicity checks.

#pragma once

#include "eqp/global_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace eqp {

inline long mod_n(long a, long n) {
    const long r = a % n;
    return r < 0 ? r + n : r;
}

// floor(N t) with N t snapped to an integer when within 1e-9 of one.
inline long snapped_floor(double x) {
    const double r = std::round(x);
    return std::abs(x - r) <= 1e-9 ? static_cast<long>(r) : static_cast<long>(std::floor(x));
}

// Integer K = a_f(theta w) - a_f(w) - N t_alpha (rounded). The shift is K mod N and
// xi = K + floor(N t_alpha).
inline long phase_jump(double af_next, double af, std::size_t order, double t_alpha, double* defect = nullptr) {
    const double x = af_next - af - static_cast<double>(order) * t_alpha;
    const double k = std::round(x);
    if (defect) *defect = std::abs(x - k);
    return static_cast<long>(k);
}

struct PeriodicPartition {
    cplx alpha;
    double t_alpha = 0.0;               // alpha = e(t_alpha), t_alpha in [0, 1)
    std::size_t order = 1;              // N_alpha
    std::vector<RandomMatrix> projections;  // p_k, k in Z/N
    std::vector<long> sigma;            // shift per point, in [0, N)
    std::vector<long> xi;               // per point, in {-1, 0}
    std::vector<RandomMatrix> conditional_states;  // p_k rho p_k / tr(p_k rho)
    double match_distance = 0.0;        // worst eigenvalue-to-root distance
    double phase_defect = 0.0;          // worst distance of the phase jump from an integer
};

struct LabeledProjections {
    std::vector<CMat> projections;  // p_k at e_N(a_f + k)
    double match_distance = 0.0;
};

// Spectral projections of u matched one-to-one with the roots e_N(a_f + k).
inline LabeledProjections root_labeled_projections(const CMat& u, double a_f, std::size_t big_n) {
    const auto sp = spectral_projections(u, 1e-7);
    if (sp.size() != big_n)
        fail(ErrorKind::SpectrumMismatch,
             "u has " + std::to_string(sp.size()) + " distinct eigenvalues, expected " + std::to_string(big_n));
    LabeledProjections out;
    std::vector<bool> used(big_n, false);
    for (std::size_t k = 0; k < big_n; ++k) {
        const cplx target = expi((a_f + static_cast<double>(k)) / static_cast<double>(big_n));
        std::size_t best = big_n;
        double dist = 1e-5;
        for (std::size_t j = 0; j < big_n; ++j)
            if (!used[j] && std::abs(sp[j].eigenvalue - target) <= dist) {
                dist = std::abs(sp[j].eigenvalue - target);
                best = j;
            }
        if (best == big_n) fail(ErrorKind::SpectrumMismatch, "spectrum of u does not match the roots of f");
        used[best] = true;
        out.match_distance = std::max(out.match_distance, dist);
        out.projections.push_back(sp[best].projection);
    }
    return out;
}

inline PeriodicPartition build_partition(const Eigentuple& e, const FiniteCycleBase& base, const RandomMatrix& rho) {
    const std::size_t n = base.size();
    const std::size_t big_n = e.order;
    const Index d = e.u[0].rows();
    PeriodicPartition part;
    part.alpha = e.alpha;
    part.t_alpha = turn_of(e.alpha);
    part.order = big_n;
    part.projections.assign(big_n, RandomMatrix::constant(n, CMat::Zero(d, d)));
    for (std::size_t w = 0; w < n; ++w) {
        const auto labeled = root_labeled_projections(e.u[w], e.a_f[w], big_n);
        part.match_distance = std::max(part.match_distance, labeled.match_distance);
        for (std::size_t k = 0; k < big_n; ++k) part.projections[k][w] = labeled.projections[k];
    }
    const long floor_nt = snapped_floor(static_cast<double>(big_n) * part.t_alpha);
    for (std::size_t w = 0; w < n; ++w) {
        double defect = 0.0;
        const long k = phase_jump(e.a_f[base.next(w)], e.a_f[w], big_n, part.t_alpha, &defect);
        part.phase_defect = std::max(part.phase_defect, defect);
        part.sigma.push_back(mod_n(k, static_cast<long>(big_n)));
        part.xi.push_back(k + floor_nt);
    }
    if (part.phase_defect > 1e-6) fail(ErrorKind::InternalInconsistency, "phase jump of a_f is not an integer");
    for (std::size_t k = 0; k < big_n; ++k) {
        RandomMatrix c;
        for (std::size_t w = 0; w < n; ++w) {
            const CMat& p = part.projections[k][w];
            c.blocks.push_back(p * rho[w] * p / (p * rho[w]).trace().real());
        }
        part.conditional_states.push_back(std::move(c));
    }
    return part;
}

// max_{k, w} ||(L* p_k)_w - p_{k + sigma(w), w}||
inline double verify_shift_relation(const ProcessInstance& process, const PeriodicPartition& part) {
    const FiniteCycleBase& base = process.cycle();
    const long big_n = static_cast<long>(part.order);
    double r = 0.0;
    for (long k = 0; k < big_n; ++k)
        for (std::size_t w = 0; w < base.size(); ++w) {
            const std::size_t tw = base.next(w);
            const CMat img = process.channel_at_point(tw).adjoint_apply(part.projections[static_cast<std::size_t>(k)][tw]);
            const auto target = static_cast<std::size_t>(mod_n(k + part.sigma[w], big_n));
            r = std::max(r, op_norm(img - part.projections[target][w]));
        }
    return r;
}

struct PartitionTheoremResiduals {
    double containment = 0.0;        // ||(I - q) phi(p a p) (I - q)|| / ||a||, q = p_{k - sigma, theta w}
    double block_leakage = 0.0;      // ||b - q b q|| / ||a||
    double decomposition = 0.0;      // ||rho - N^{-1} sum_k rho_k||
    double block_weight = 0.0;       // |tr(rho p_k) - 1/N|
    double conditional_transport = 0.0;  // ||phi_{theta w}(rho_{k, w}) - rho_{k - sigma, theta w}||
    double partition_of_unity = 0.0;
    double max() const {
        return std::max({containment, decomposition, block_weight, conditional_transport, partition_of_unity});
    }
};

inline PartitionTheoremResiduals verify_partition_theorem(const ProcessInstance& process, const PeriodicPartition& part,
                                                          const RandomMatrix& rho, Rng& rng, int samples = 20) {
    const FiniteCycleBase& base = process.cycle();
    const Index d = process.dim;
    const long big_n = static_cast<long>(part.order);
    PartitionTheoremResiduals r;
    for (std::size_t w = 0; w < base.size(); ++w) {
        const std::size_t tw = base.next(w);
        const KrausChannel& ch = process.channel_at_point(tw);
        CMat sum = CMat::Zero(d, d), recon = CMat::Zero(d, d);
        for (long k = 0; k < big_n; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            const CMat& p = part.projections[ku][w];
            sum += p;
            for (long j = k + 1; j < big_n; ++j)
                r.partition_of_unity = std::max(r.partition_of_unity, op_norm(p * part.projections[static_cast<std::size_t>(j)][w]));
            const auto next = static_cast<std::size_t>(mod_n(k - part.sigma[w], big_n));
            const CMat& q = part.projections[next][tw];
            const CMat qc = identity(d) - q;
            for (int s = 0; s < samples; ++s) {
                const CMat a = random_cmat(rng, d);
                const CMat b = ch.apply(p * a * p);
                r.containment = std::max(r.containment, op_norm(qc * b * qc) / op_norm(a));
                r.block_leakage = std::max(r.block_leakage, op_norm(b - q * b * q) / op_norm(a));
            }
            r.block_weight = std::max(r.block_weight, std::abs((rho[w] * p).trace().real() - 1.0 / static_cast<double>(big_n)));
            recon += part.conditional_states[ku][w];
            r.conditional_transport = std::max(
                r.conditional_transport, op_norm(ch.apply(part.conditional_states[ku][w]) - part.conditional_states[next][tw]));
        }
        r.partition_of_unity = std::max(r.partition_of_unity, op_norm(sum - identity(d)));
        r.decomposition = std::max(r.decomposition, op_norm(rho[w] - recon / static_cast<double>(big_n)));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Skew product T(w, x) = (theta w, x - sigma(w))

struct SkewErgodicity {
    bool ergodic = false;
    std::size_t cycle_length = 0;    // length of the cycle through (0, 0)
    double birkhoff_error = 0.0;     // |frequency of Omega x {0} along that cycle - 1/N|
};

inline SkewErgodicity skew_ergodicity(const std::vector<long>& sigma, std::size_t order, const FiniteCycleBase& base) {
    const std::size_t n = base.size();
    const auto big_n = static_cast<long>(order);
    SkewErgodicity out;
    std::size_t w = 0, zeros = 0;
    long x = 0;
    do {
        x = mod_n(x - sigma[w], big_n);
        w = base.next(w);
        ++out.cycle_length;
        zeros += (x == 0);
    } while (!(w == 0 && x == 0) && out.cycle_length <= n * order);
    out.ergodic = out.cycle_length == n * order;
    // zeros / length - 1 / N, exact in integers
    const auto num = static_cast<long long>(zeros) * big_n - static_cast<long long>(out.cycle_length);
    out.birkhoff_error = std::abs(static_cast<double>(num)) / (static_cast<double>(out.cycle_length) * static_cast<double>(big_n));
    return out;
}

inline SkewErgodicity skew_ergodicity(const PeriodicPartition& part, const FiniteCycleBase& base) {
    return skew_ergodicity(part.sigma, part.order, base);
}

// ---------------------------------------------------------------------------
// Stopping times

struct StoppingTimeTrace {
    std::size_t order = 1;
    std::size_t horizon = 0;
    std::vector<std::size_t> taus;     // times n in [1, horizon] with cumulative shift 0 mod N
    std::vector<long> cumulative;      // cumulative shift after n steps, n = 1..horizon, in [0, N)
    double density = 0.0;
};

// shifts[l] = sigma(theta^l w), l = 0 .. horizon - 1.
inline StoppingTimeTrace stopping_times(const std::vector<long>& shifts, std::size_t order) {
    StoppingTimeTrace tr;
    tr.order = order;
    tr.horizon = shifts.size();
    tr.cumulative.reserve(shifts.size());
    long acc = 0;
    for (std::size_t l = 0; l < shifts.size(); ++l) {
        acc = mod_n(acc + shifts[l], static_cast<long>(order));
        tr.cumulative.push_back(acc);
        if (acc == 0) tr.taus.push_back(l + 1);
    }
    if (tr.taus.empty()) fail(ErrorKind::HorizonTooShort, "no stopping time within the horizon");
    tr.density = static_cast<double>(tr.taus.size()) / static_cast<double>(tr.horizon);
    return tr;
}

// Finite base: shifts along the orbit of w0.
inline StoppingTimeTrace stopping_times(const PeriodicPartition& part, const FiniteCycleBase& base, std::size_t w0,
                                        std::size_t horizon) {
    std::vector<long> shifts;
    shifts.reserve(horizon);
    std::size_t w = w0;
    for (std::size_t l = 0; l < horizon; ++l) {
        shifts.push_back(part.sigma[w]);
        w = base.next(w);
    }
    return stopping_times(shifts, part.order);
}

// First return time tau(w) per point.
inline std::vector<std::size_t> first_return_times(const PeriodicPartition& part, const FiniteCycleBase& base) {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < base.size(); ++w)
        out.push_back(stopping_times(part, base, w, base.size() * part.order).taus.front());
    return out;
}

// N^{-1} sum_n alpha^{tau_n}, tau_n the n-th return time. On a finite base only
// whole periods of the return sequence (n returns) are averaged.
struct PhaseAverage {
    cplx estimate;
    cplx expected;      // mean(e_N(a_f)) / e_N(a_f(w0))
    std::size_t terms = 0;
};

inline cplx cesaro_phase_sum(cplx alpha, const std::vector<std::size_t>& taus, std::size_t terms) {
    if (terms == 0) fail(ErrorKind::HorizonTooShort, "no stopping time within the horizon");
    cplx s = 0.0;
    for (std::size_t j = 0; j < terms; ++j) s += std::pow(alpha, static_cast<double>(taus[j]));
    return s / static_cast<double>(terms);
}

inline PhaseAverage cesaro_phase_average(const Eigentuple& e, const StoppingTimeTrace& trace, std::size_t w0) {
    const std::size_t n = e.f.size();
    PhaseAverage out;
    const std::size_t whole = (trace.taus.size() / n) * n;
    if (whole == 0) fail(ErrorKind::HorizonTooShort, "horizon shorter than one period of return times");
    out.terms = whole;
    out.estimate = cesaro_phase_sum(e.alpha, trace.taus, whole);
    cplx mean = 0.0;
    const auto big_n = static_cast<double>(e.order);
    for (double a : e.a_f) mean += expi(a / big_n);
    mean /= static_cast<double>(n);
    out.expected = mean / expi(e.a_f[w0] / big_n);
    return out;
}

// ---------------------------------------------------------------------------
// Cesaro projector of the tau-jump operator

struct CesaroProjector {
    CMat matrix;             // E on the stacked n d^2 space
    CMat jump;               // L*_tau
    cplx alpha;
    std::size_t warmup = 0;          // M
    std::size_t averaging_length = 0;  // N
    double idempotency = 0.0;        // ||E^2 - E||
    double commutation = 0.0;        // max(||E P - E||, ||P E - E||)
    double subperipheral_radius = 0.0;
};

inline std::size_t lcm_size(std::size_t a, std::size_t b) { return a / std::gcd(a, b) * b; }

// (sum_{j=1}^{m} P^j, P^m)
inline std::pair<CMat, CMat> geometric_power_sum(const CMat& p, std::size_t m) {
    if (m == 0) return {CMat::Zero(p.rows(), p.cols()), CMat::Identity(p.rows(), p.cols())};
    if (m % 2 == 0) {
        auto [s, q] = geometric_power_sum(p, m / 2);
        return {s + q * s, q * q};
    }
    auto [s, q] = geometric_power_sum(p, m - 1);
    CMat q1 = q * p;
    return {s + q1, q1};
}

// (L*_tau x)_w = Phi^{(tau(w))*}_w (x_{theta^tau(w) w})
inline CMat tau_jump_operator(const ProcessInstance& process, const PeriodicPartition& part) {
    const FiniteCycleBase& base = process.cycle();
    const std::size_t n = base.size();
    const Index d2 = process.dim * process.dim;
    const auto taus = first_return_times(part, base);
    CMat p = CMat::Zero(static_cast<Index>(n) * d2, static_cast<Index>(n) * d2);
    for (std::size_t w = 0; w < n; ++w) {
        CMat block = CMat::Identity(d2, d2);
        std::size_t l = w;
        for (std::size_t j = 0; j < taus[w]; ++j) {
            l = base.next(l);
            block = block * process.channel_at_point(l).transfer().adjoint();
        }
        p.block(static_cast<Index>(w) * d2, static_cast<Index>(l) * d2, d2, d2) = block;
    }
    return p;
}

inline CesaroProjector cesaro_projector(const ProcessInstance& process, const PeriodicPartition& part, std::size_t n_avg = 2000) {
    CesaroProjector c;
    c.alpha = part.alpha;
    c.jump = tau_jump_operator(process, part);
    const Index m = c.jump.rows();
    std::size_t period = 1;
    for (cplx z : eigenvalues(c.jump)) {
        if (std::abs(z) >= 1.0 - 1e-9) {
            const std::size_t q = root_of_unity_order(z, 4096, 1e-8);
            if (q == 0) fail(ErrorKind::NotConverged, "peripheral eigenvalue of the jump operator is not a root of unity");
            period = lcm_size(period, q);
        } else {
            c.subperipheral_radius = std::max(c.subperipheral_radius, std::abs(z));
        }
    }
    c.warmup = 1;
    if (c.subperipheral_radius > 0.0) {
        const double need = std::log(1e-17) / std::log(c.subperipheral_radius);
        while (static_cast<double>(c.warmup) < need && c.warmup < (std::size_t{1} << 40)) c.warmup *= 2;
    }
    c.averaging_length = std::max<std::size_t>(period, ((n_avg + period - 1) / period) * period);
    CMat warm = c.jump;
    for (std::size_t s = 1; s < c.warmup; s *= 2) warm = warm * warm;
    const auto [sum, last] = geometric_power_sum(c.jump, c.averaging_length);
    (void)last;
    c.matrix = warm * sum / static_cast<double>(c.averaging_length);
    c.idempotency = op_norm(c.matrix * c.matrix - c.matrix);
    c.commutation = std::max(op_norm(c.matrix * c.jump - c.matrix), op_norm(c.jump * c.matrix - c.matrix));
    if (c.idempotency > 1e-6) fail(ErrorKind::NotConverged, "Cesaro average is not idempotent");
    (void)m;
    return c;
}

struct CesaroChecks {
    double idempotency = 0.0;
    double commutation = 0.0;
    double positivity = 0.0;        // most negative block eigenvalue of E(x) over PSD x (relative)
    double inner_product = 0.0;     // max_w |<rho_w, E(x)_w> - mean <rho, x>|
    double faithfulness_min = 0.0;  // min_w ||E(x)_w|| over random nonzero PSD x
    double unital = 0.0;            // ||E(I) - I||
};

// Random x are blockwise PSD; half of them are supported at a single point.
inline CesaroChecks check_cesaro(const CesaroProjector& c, const RandomMatrix& rho, Rng& rng, int samples = 50) {
    const std::size_t n = rho.size();
    const Index d = rho[0].rows();
    CesaroChecks out;
    out.idempotency = c.idempotency;
    out.commutation = c.commutation;
    out.faithfulness_min = std::numeric_limits<double>::infinity();
    auto apply = [&](const RandomMatrix& x) { return RandomMatrix::unstack(c.matrix * x.stacked(), n, d); };
    for (int s = 0; s < samples; ++s) {
        RandomMatrix x;
        const bool sparse = s % 2 == 1;
        const std::size_t at = rng.below(n);
        for (std::size_t w = 0; w < n; ++w) {
            if (sparse && w != at) {
                x.blocks.push_back(CMat::Zero(d, d));
            } else {
                const CVec v = random_cmat(rng, d, 1);
                x.blocks.push_back(s % 4 == 1 ? CMat(v * v.adjoint()) : random_psd(rng, d));
            }
        }
        const RandomMatrix ex = apply(x);
        double mean = 0.0, scale = 0.0;
        for (std::size_t w = 0; w < n; ++w) {
            mean += (rho[w] * x[w]).trace().real();
            scale = std::max(scale, op_norm(x[w]));
        }
        mean /= static_cast<double>(n);
        for (std::size_t w = 0; w < n; ++w) {
            out.positivity = std::min(out.positivity, min_hermitian_eigenvalue(ex[w]) / scale);
            out.inner_product = std::max(out.inner_product, std::abs(hs_inner(rho[w], ex[w]) - mean));
            out.faithfulness_min = std::min(out.faithfulness_min, op_norm(ex[w]) / scale);
        }
    }
    const RandomMatrix one = apply(RandomMatrix::constant(n, identity(d)));
    out.unital = max_block_distance(one, RandomMatrix::constant(n, identity(d)));
    return out;
}

// ---------------------------------------------------------------------------
// Minimality

enum class Minimality { Minimal, NotMinimal, Inconclusive };

inline const char* to_string(Minimality m) {
    switch (m) {
    case Minimality::Minimal: return "minimal";
    case Minimality::NotMinimal: return "not-minimal";
    case Minimality::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct MinimalityVerdict {
    Minimality verdict = Minimality::Inconclusive;
    Index rank = 0;
    std::optional<CMat> witness;   // sub-projection (at the base point) that reduces
    double null_singular = 0.0;    // certificate of the return map compressed to p
    double next_singular = 0.0;
};

// Decides whether p is minimal for the block-preserving map with transfer w:
// minimal iff the compression b -> V* W(V b V*) V is irreducible.
inline MinimalityVerdict compressed_minimality(const CMat& w_transfer, const CMat& p) {
    MinimalityVerdict out;
    const CMat v = range_basis(p);
    out.rank = v.cols();
    if (out.rank <= 1) {
        out.verdict = Minimality::Minimal;
        return out;
    }
    const CMat left = Eigen::kroneckerProduct(v.transpose(), v.adjoint());
    const CMat right = Eigen::kroneckerProduct(v.conjugate(), v);
    const CMat tb = left * w_transfer * right;
    const Index r2 = tb.rows();
    const auto cert = certify_eigenvalue(tb, 1.0);
    out.null_singular = cert.smallest;
    out.next_singular = cert.next;
    const KrausChannel b = kraus_from_transfer(tb);
    if (cert.simple) {
        const CMat rho = normalize_density(unvec(cert.vector, out.rank));
        if (min_hermitian_eigenvalue(rho) > 1e-10) {
            out.verdict = Minimality::Minimal;
            return out;
        }
        const auto q = support_projection(rho, 1e-9);
        out.verdict = Minimality::NotMinimal;
        out.witness = v * q * v.adjoint();
        return out;
    }
    if (cert.next > kNullTol) return out;  // ambiguous gap
    const NullSpace ns = null_space(tb - CMat::Identity(r2, r2), kNullTol);
    std::vector<CMat> fixed;
    for (Index j = 0; j < ns.basis.cols(); ++j) fixed.push_back(unvec(ns.basis.col(j), out.rank));
    const auto search = find_invariant_projection(b.kraus(), hermitian_parts(fixed));
    if (search.witness) {
        out.verdict = Minimality::NotMinimal;
        out.witness = v * *search.witness * v.adjoint();
    }
    return out;
}

// Transfer of Phi^{(k)}_w.
inline CMat cocycle_transfer(const ProcessInstance& process, std::size_t w, std::size_t k) {
    const FiniteCycleBase& base = process.cycle();
    const Index d2 = process.dim * process.dim;
    CMat t = CMat::Identity(d2, d2);
    std::size_t l = w;
    for (std::size_t j = 0; j < k; ++j) {
        l = base.next(l);
        t = process.channel_at_point(l).transfer() * t;
    }
    return t;
}

// Finite base: minimality of each p_k for the tau-jump process, decided through
// its return map at point 0, (Phi^{(n)}_0)^N compressed to p_{k, 0}.
inline std::vector<MinimalityVerdict> minimality_check(const ProcessInstance& process, const PeriodicPartition& part) {
    const std::size_t n = process.cycle().size();
    const CMat mono = cocycle_transfer(process, 0, n);
    CMat w = CMat::Identity(mono.rows(), mono.cols());
    for (std::size_t j = 0; j < part.order; ++j) w = mono * w;
    std::vector<MinimalityVerdict> out;
    for (const auto& p : part.projections) out.push_back(compressed_minimality(w, p[0]));
    return out;
}

// i.i.d. base with deterministic projections: compressions of the averaged
// channel raised to the power N.
inline std::vector<MinimalityVerdict> minimality_check(const KrausChannel& averaged, const std::vector<CMat>& projections,
                                                       std::size_t order) {
    CMat w = CMat::Identity(averaged.transfer().rows(), averaged.transfer().cols());
    for (std::size_t j = 0; j < order; ++j) w = averaged.transfer() * w;
    std::vector<MinimalityVerdict> out;
    for (const auto& p : projections) out.push_back(compressed_minimality(w, p));
    return out;
}

// ---------------------------------------------------------------------------
// Aperiodicity

struct AperiodicityResult {
    std::optional<std::size_t> first_reducible;
    std::optional<RandomMatrix> witness;   // finite base: reducing projection on the component of point 0
    std::optional<CMat> iid_witness;       // i.i.d.: reducing projection of the averaged power
    std::vector<std::size_t> checked;      // powers examined
};

// The process (theta^k, Phi^{(k)}) restricted to the theta^k-cycle through `start`.
inline ProcessInstance power_component(const ProcessInstance& process, std::size_t k, std::size_t start) {
    const FiniteCycleBase& base = process.cycle();
    std::vector<std::size_t> pts{start};
    for (std::size_t l = base.advance(start, k); l != start; l = base.advance(l, k)) pts.push_back(l);
    const std::size_t m = pts.size();
    std::vector<KrausChannel> chans;
    std::vector<std::size_t> assign;
    for (std::size_t j = 0; j < m; ++j) {
        // channel at pts[j] is Phi^{(k)} from its predecessor on the component
        chans.push_back(cocycle(process, pts[(j + m - 1) % m], k));
        assign.push_back(j);
    }
    return make_process(FiniteCycleBase::cycle(m), std::move(chans), std::move(assign));
}

inline AperiodicityResult aperiodicity_check(const ProcessInstance& process, std::size_t n_max = 8) {
    AperiodicityResult out;
    if (process.is_finite()) {
        const FiniteCycleBase& base = process.cycle();
        const std::size_t n = base.size();
        for (std::size_t k = 2; k <= n_max; ++k) {
            out.checked.push_back(k);
            const std::size_t comps = std::gcd(k, n);
            for (std::size_t c = 0; c < comps; ++c) {
                const ProcessInstance sub = power_component(process, k, c);
                const SteadyState ss = steady_state(sub);
                if (!ss.irreducible) {
                    out.first_reducible = k;
                    out.witness = ss.witness;
                    return out;
                }
            }
        }
        return out;
    }
    if (process.is_iid()) {
        const KrausChannel avg = averaged_channel(process);
        CMat t = avg.transfer();
        for (std::size_t k = 2; k <= n_max; ++k) {
            out.checked.push_back(k);
            t = avg.transfer() * t;
            const PFResult pf = is_irreducible(kraus_from_transfer(t));
            if (!pf.irreducible) {
                out.first_reducible = k;
                out.iid_witness = pf.witness;
                return out;
            }
        }
        return out;
    }
    fail(ErrorKind::UnsupportedBase, "aperiodicity_check: rotation bases are not supported");
}

} // namespace eqp
