// single_channel.hpp: Perron-Frobenius data of one quantum channel (fixed
// space, irreducibility, peripheral group, cyclic partition, primitivity).

#pragma once

#include "eqp/channel.hpp"
#include "eqp/random.hpp"

#include <algorithm>
#include <bit>
#include <optional>
#include <span>
#include <vector>

namespace eqp {

struct PFResult {
    bool irreducible = false;
    std::optional<CMat> steady_state;
    std::vector<cplx> peripheral_group;
    std::size_t m = 0;
    std::vector<CMat> partition;  // p_0 .. p_{m-1}, phi(p_k M p_k) inside p_{k+1} M p_{k+1}
    std::optional<CMat> witness;  // reducing projection when reducible
    bool witness_search_failed = false;
};

// Orthonormal (Hilbert-Schmidt) basis of {a : phi(a) = a}.
inline std::vector<CMat> fixed_space(const KrausChannel& ch, double tol = 1e-8) {
    const Index n = ch.transfer().rows();
    const NullSpace ns = null_space(ch.transfer() - CMat::Identity(n, n), tol);
    std::vector<CMat> out;
    for (Index j = 0; j < ns.basis.cols(); ++j) out.push_back(unvec(ns.basis.col(j), ch.dim()));
    if (out.empty()) fail(ErrorKind::InternalInconsistency, "fixed_space: no fixed point found (input not trace preserving?)");
    return out;
}

// ---------------------------------------------------------------------------
// Reducing projections

// True when range(p) is invariant under every operator in `ops` (K p = p K p).
inline bool is_jointly_invariant(std::span<const CMat> ops, const CMat& p, double tol = 1e-8) {
    for (const auto& k : ops)
        if (op_norm(k * p - p * k * p) > tol * std::max(1.0, op_norm(k))) return false;
    return true;
}

struct WitnessSearch {
    std::optional<CMat> witness;
    bool exhaustive = false;  // no witness exists if none was found
};

// Nontrivial projection whose range is invariant under all `ops`, smallest rank
// first. Candidates: spans of eigenvector subsets of a random combination of
// the operators, then positive/negative supports of the Hermitian `hints`.
inline WitnessSearch find_invariant_projection(std::span<const CMat> ops, std::span<const CMat> hints = {},
                                               double tol = 1e-8, std::uint64_t seed = 0x5EEDULL) {
    WitnessSearch out;
    if (ops.empty()) return out;
    const Index d = ops.front().rows();
    if (d < 2) {
        out.exhaustive = true;
        return out;
    }
    Rng rng(seed);
    CMat x = CMat::Zero(d, d);
    for (const auto& k : ops) x += rng.complex_normal() * k;
    Eigen::ComplexEigenSolver<CMat> es(x);
    const auto& ev = es.eigenvalues();
    const double scale = std::max(op_norm(x), 1e-300);
    double min_gap = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < d; ++i)
        for (Index j = i + 1; j < d; ++j) min_gap = std::min(min_gap, std::abs(ev(i) - ev(j)));
    out.exhaustive = min_gap > 1e-6 * scale;

    std::vector<unsigned> masks;
    const unsigned full = (1u << d) - 1u;
    for (unsigned mask = 1; mask < full; ++mask) masks.push_back(mask);
    std::stable_sort(masks.begin(), masks.end(),
                     [](unsigned a, unsigned b) { return std::popcount(a) < std::popcount(b); });
    for (unsigned mask : masks) {
        CMat cols(d, std::popcount(mask));
        Index c = 0;
        for (Index i = 0; i < d; ++i)
            if (mask & (1u << i)) cols.col(c++) = es.eigenvectors().col(i);
        const CMat p = span_projection(cols);
        const Index r = projection_rank(p);
        if (r == 0 || r == d) continue;
        if (is_jointly_invariant(ops, p, tol)) {
            out.witness = p;
            return out;
        }
    }
    for (const auto& h0 : hints) {
        const CMat h = hermitian_part(h0);
        const double hs = std::max(op_norm(h), 1e-300);
        for (const CMat& p : {support_projection(h, 1e-7 * hs), support_projection(-h, 1e-7 * hs)}) {
            const Index r = projection_rank(p);
            if (r == 0 || r == d) continue;
            if (is_jointly_invariant(ops, p, tol)) {
                out.witness = p;
                return out;
            }
        }
    }
    return out;
}

// Hermitian spanning set of a list of matrices.
inline std::vector<CMat> hermitian_parts(std::span<const CMat> xs) {
    std::vector<CMat> out;
    for (const auto& x : xs) {
        out.push_back(hermitian_part(x));
        out.push_back(hermitian_part(cplx(0.0, 1.0) * x));
    }
    return out;
}

// Density-normalized Hermitian representative of a one-dimensional fixed space.
inline CMat normalize_density(const CMat& b) {
    const cplx tr = b.trace();
    if (std::abs(tr) < 1e-14) fail(ErrorKind::InternalInconsistency, "fixed point has zero trace");
    return hermitian_part(b / tr);
}

inline PFResult is_irreducible(const KrausChannel& ch, double tol = 1e-8) {
    require_cptp(ch);
    PFResult r;
    const auto fix = fixed_space(ch, tol);
    if (fix.size() == 1) {
        const CMat rho = normalize_density(fix.front());
        if (min_hermitian_eigenvalue(rho) > 1e-10) {
            r.irreducible = true;
            r.steady_state = rho;
            return r;
        }
    }
    const auto search = find_invariant_projection(ch.kraus(), hermitian_parts(fix), tol);
    r.witness = search.witness;
    r.witness_search_failed = !search.witness.has_value();
    return r;
}

// ---------------------------------------------------------------------------
// Peripheral spectrum

inline void require_closed_group(std::span<const cplx> g, double tol, const char* where) {
    auto member = [&](cplx z) {
        return std::any_of(g.begin(), g.end(), [&](cplx w) { return std::abs(w - z) <= tol; });
    };
    for (cplx a : g) {
        if (!member(std::conj(a))) fail(ErrorKind::InternalInconsistency, std::string(where) + ": not closed under conjugation");
        for (cplx b : g)
            if (!member(a * b)) fail(ErrorKind::InternalInconsistency, std::string(where) + ": not closed under multiplication");
    }
}

// Unimodular eigenvalues of an irreducible channel, each certified simple,
// sorted by phase in [0, 1).
inline std::vector<cplx> peripheral_group(const KrausChannel& ch, double tol = 1e-8) {
    const auto irr = is_irreducible(ch, tol);
    if (!irr.irreducible) fail(ErrorKind::NotIrreducible, "peripheral_group: channel is reducible");
    std::vector<cplx> out;
    for (cplx z : eigenvalues(ch.transfer()))
        if (std::abs(z) >= 1.0 - tol) {
            const auto cert = certify_eigenvalue(ch.transfer(), z);
            if (!cert.simple)
                fail(ErrorKind::SimplicityViolation, "peripheral eigenvalue is not numerically simple (gap " +
                                                         std::to_string(cert.next) + ")");
            out.push_back(z / std::abs(z));
        }
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return turn_of(a, 1e-9) < turn_of(b, 1e-9); });
    if (static_cast<Index>(out.size()) > ch.dim())
        fail(ErrorKind::InternalInconsistency, "peripheral group larger than the dimension");
    require_closed_group(out, tol, "peripheral_group");
    return out;
}

// Eigen-unitary of the Heisenberg map at alpha: psi(u) = alpha u, gauge-fixed.
inline CMat adjoint_eigen_unitary(const KrausChannel& ch, cplx alpha) {
    const CMat th = ch.transfer().adjoint();
    const auto cert = certify_eigenvalue(th, alpha);
    if (!cert.simple) fail(ErrorKind::SimplicityViolation, "eigenvalue of the adjoint is not numerically simple");
    CMat u = polar_unitary(unvec(cert.vector, ch.dim())).unitary;
    u *= gauge_phase(u);
    return u;
}

// Labels the spectral projections of u so that p_k sits at c alpha^k, with c the
// eigenvalue of smallest phase.
inline std::vector<CMat> label_by_generator(const CMat& u, cplx alpha, std::size_t m) {
    const auto sp = spectral_projections(u);
    if (sp.size() != m) fail(ErrorKind::SpectrumMismatch, "eigen-unitary has " + std::to_string(sp.size()) +
                                                              " distinct eigenvalues, expected " + std::to_string(m));
    std::vector<CMat> out(m);
    std::vector<bool> used(m, false);
    const cplx c = sp.front().eigenvalue;
    for (std::size_t k = 0; k < m; ++k) {
        const cplx target = c * std::pow(alpha, static_cast<double>(k));
        std::size_t best = m;
        double dist = 1e-5;
        for (std::size_t j = 0; j < m; ++j)
            if (!used[j] && std::abs(sp[j].eigenvalue - target) <= dist) {
                dist = std::abs(sp[j].eigenvalue - target);
                best = j;
            }
        if (best == m) fail(ErrorKind::SpectrumMismatch, "eigen-unitary spectrum is not a coset of the peripheral group");
        used[best] = true;
        out[k] = sp[best].projection;
    }
    return out;
}

inline PFResult ehk_partition(const KrausChannel& ch, double tol = 1e-8) {
    PFResult r = is_irreducible(ch, tol);
    if (!r.irreducible) fail(ErrorKind::NotIrreducible, "ehk_partition: channel is reducible");
    r.peripheral_group = peripheral_group(ch, tol);
    r.m = r.peripheral_group.size();
    if (r.m == 1) {
        r.partition = {identity(ch.dim())};
        return r;
    }
    // smallest positive phase: e(1/m)
    const cplx alpha = r.peripheral_group[1];
    // psi(p) = q at eigenvalue ratio conj(alpha); forward labels advance by alpha
    const CMat u = adjoint_eigen_unitary(ch, alpha);
    r.partition = label_by_generator(u, alpha, r.m);
    return r;
}

struct PartitionResiduals {
    double containment = 0.0;      // max ||(I - q) phi(p a p) (I - q)|| / ||a||, q = next projection
    double block_leakage = 0.0;    // max ||b - q b q|| / ||a||, b = phi(p a p)
    double decomposition = 0.0;    // ||rho - m^{-1} sum p rho p / tr(p rho p)||
    double partition_of_unity = 0.0;
};

inline PartitionResiduals check_partition(const KrausChannel& ch, const std::vector<CMat>& parts, const CMat& rho,
                                          Rng& rng, int samples = 20) {
    PartitionResiduals out;
    const Index d = ch.dim();
    const std::size_t m = parts.size();
    CMat sum = CMat::Zero(d, d);
    for (std::size_t k = 0; k < m; ++k) {
        sum += parts[k];
        for (std::size_t j = k + 1; j < m; ++j) out.partition_of_unity = std::max(out.partition_of_unity, op_norm(parts[k] * parts[j]));
        const CMat& p = parts[k];
        const CMat& q = parts[(k + 1) % m];
        const CMat qc = identity(d) - q;
        for (int s = 0; s < samples; ++s) {
            const CMat a = random_cmat(rng, d);
            const double na = op_norm(a);
            const CMat b = ch.apply(p * a * p);
            out.containment = std::max(out.containment, op_norm(qc * b * qc) / na);
            out.block_leakage = std::max(out.block_leakage, op_norm(b - q * b * q) / na);
        }
    }
    out.partition_of_unity = std::max(out.partition_of_unity, op_norm(sum - identity(d)));
    CMat recon = CMat::Zero(d, d);
    for (const auto& p : parts) recon += p * rho * p / (p * rho * p).trace().real();
    recon /= static_cast<double>(m);
    out.decomposition = op_norm(rho - recon);
    return out;
}

// ---------------------------------------------------------------------------
// Primitivity

struct PrimitivityTrace {
    bool converged = false;
    std::size_t steps = 0;  // first n meeting the tolerance (0 if never)
    std::vector<std::pair<std::size_t, double>> checkpoints;  // (n, max trace-norm deviation) at powers of two
    bool primitive = false;
};

// max over matrix units e_ij of ||phi^n(e_ij) - tr(e_ij) rho||_1
inline double power_deviation(const CMat& tn, const CMat& rho, Index d) {
    const CVec r = vec(rho);
    double worst = 0.0;
    for (Index c = 0; c < d * d; ++c) {
        CVec col = tn.col(c);
        if (c % (d + 1) == 0) col -= r;  // diagonal unit, trace 1
        worst = std::max(worst, trace_norm(unvec(col, d)));
    }
    return worst;
}

inline PrimitivityTrace is_primitive(const KrausChannel& ch, std::size_t n_max = 2000, double tol = 1e-8) {
    const PFResult pf = is_irreducible(ch);
    if (!pf.irreducible) fail(ErrorKind::NotIrreducible, "is_primitive: channel is reducible");
    const auto group = peripheral_group(ch);
    const Index d = ch.dim();
    const CMat& t = ch.transfer();
    const CMat target = vec(*pf.steady_state) * vec(identity(d)).adjoint();
    const double sqrt_d = std::sqrt(static_cast<double>(d));
    PrimitivityTrace out;
    CMat tn = CMat::Identity(d * d, d * d);
    for (std::size_t n = 1; n <= n_max; ++n) {
        tn = t * tn;
        if (std::has_single_bit(n)) out.checkpoints.emplace_back(n, power_deviation(tn, *pf.steady_state, d));
        // trace norm <= sqrt(d) * Frobenius norm
        const CMat dev = tn - target;
        double bound = 0.0;
        for (Index c = 0; c < d * d; ++c) bound = std::max(bound, sqrt_d * dev.col(c).norm());
        if (bound <= tol) {
            out.converged = true;
            out.steps = n;
            out.checkpoints.emplace_back(n, power_deviation(tn, *pf.steady_state, d));
            break;
        }
    }
    out.primitive = out.converged;
    if (out.converged != (group.size() == 1))
        fail(ErrorKind::InternalInconsistency, "primitivity: power convergence disagrees with the peripheral group");
    return out;
}

} // namespace eqp
