// global_spectral.hpp: the global transfer operator of a process on a finite
// cycle, its fixed point, peripheral spectrum, Gamma cosets and eigentuples.

#pragma once

#include "eqp/ergodic_base.hpp"
#include "eqp/single_channel.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace eqp {

inline constexpr Index kMaxGlobalSize = 4096;

// A d x d matrix at every point of a finite base.
struct RandomMatrix {
    std::vector<CMat> blocks;

    std::size_t size() const noexcept { return blocks.size(); }
    const CMat& operator[](std::size_t l) const { return blocks[l]; }
    CMat& operator[](std::size_t l) { return blocks[l]; }

    static RandomMatrix constant(std::size_t n, const CMat& m) { return RandomMatrix{std::vector<CMat>(n, m)}; }

    CVec stacked() const {
        const Index d2 = blocks.front().size();
        CVec v(static_cast<Index>(blocks.size()) * d2);
        for (std::size_t l = 0; l < blocks.size(); ++l) v.segment(static_cast<Index>(l) * d2, d2) = vec(blocks[l]);
        return v;
    }

    static RandomMatrix unstack(const CVec& v, std::size_t n, Index d) {
        RandomMatrix r;
        for (std::size_t l = 0; l < n; ++l) r.blocks.push_back(unvec(v.segment(static_cast<Index>(l) * d * d, d * d), d));
        return r;
    }
};

inline double max_block_distance(const RandomMatrix& a, const RandomMatrix& b) {
    double r = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) r = std::max(r, op_norm(a[l] - b[l]));
    return r;
}

enum class Direction { Forward, Adjoint };

struct GlobalOperator {
    CMat matrix;
    Direction direction = Direction::Forward;
    std::size_t n = 0;
    Index d = 0;

    RandomMatrix apply(const RandomMatrix& x) const { return RandomMatrix::unstack(matrix * x.stacked(), n, d); }
};

// Forward: (La)_w = phi_w(a_{theta^-1 w}). Adjoint: (L*a)_w = phi*_{theta w}(a_{theta w}).
inline GlobalOperator build_global(const ProcessInstance& process, Direction direction) {
    const FiniteCycleBase& base = process.cycle();
    const std::size_t n = base.size();
    const Index d = process.dim, d2 = d * d;
    if (static_cast<Index>(n) * d2 > kMaxGlobalSize) fail(ErrorKind::InvalidArgument, "global operator exceeds 4096 rows");
    GlobalOperator g;
    g.direction = direction;
    g.n = n;
    g.d = d;
    g.matrix = CMat::Zero(static_cast<Index>(n) * d2, static_cast<Index>(n) * d2);
    for (std::size_t w = 0; w < n; ++w) {
        const auto row = static_cast<Index>(w) * d2;
        if (direction == Direction::Forward) {
            const auto col = static_cast<Index>(base.prev(w)) * d2;
            g.matrix.block(row, col, d2, d2) = process.channel_at_point(w).transfer();
        } else {
            const std::size_t tw = base.next(w);
            g.matrix.block(row, static_cast<Index>(tw) * d2, d2, d2) = process.channel_at_point(tw).transfer().adjoint();
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Fixed point and reducing projections

// Per-point invariance K_{i, theta w} p_w = p_{theta w} K_{i, theta w} p_w.
inline double reducing_residual(const ProcessInstance& process, const RandomMatrix& p) {
    const FiniteCycleBase& base = process.cycle();
    double r = 0.0;
    for (std::size_t w = 0; w < base.size(); ++w) {
        const std::size_t tw = base.next(w);
        for (const auto& k : process.channel_at_point(tw).kraus())
            r = std::max(r, op_norm(k * p[w] - p[tw] * k * p[w]));
    }
    return r;
}

// Kraus form of Phi^{(k)}_w = phi_{theta^k w} o ... o phi_{theta w}.
inline KrausChannel cocycle(const ProcessInstance& process, std::size_t w, std::size_t k) {
    const FiniteCycleBase& base = process.cycle();
    std::size_t l = base.next(w);
    KrausChannel acc = process.channel_at_point(l);
    for (std::size_t j = 1; j < k; ++j) {
        l = base.next(l);
        acc = compose(process.channel_at_point(l), acc);
    }
    return acc;
}

// Transports a projection at w along the orbit by supports of the channel images.
inline RandomMatrix transport_projection(const ProcessInstance& process, std::size_t w, const CMat& q) {
    const FiniteCycleBase& base = process.cycle();
    RandomMatrix p = RandomMatrix::constant(base.size(), CMat());
    p[w] = q;
    std::size_t l = w;
    for (std::size_t j = 1; j < base.size(); ++j) {
        const std::size_t tl = base.next(l);
        const CMat img = process.channel_at_point(tl).apply(p[l]);
        p[tl] = support_projection(img, 1e-9 * std::max(op_norm(img), 1e-300));
        l = tl;
    }
    return p;
}

struct GlobalWitness {
    std::optional<RandomMatrix> projection;
    double residual = 0.0;
};

// Searches a nontrivial reducing random projection: an invariant projection of
// the monodromy Phi^{(n)}_0 (hinted by the fixed points at 0), shrunk until its
// transport closes up along the cycle.
inline GlobalWitness find_global_witness(const ProcessInstance& process, const std::vector<RandomMatrix>& fixed) {
    const FiniteCycleBase& base = process.cycle();
    const Index d = process.dim;
    GlobalWitness out;
    const KrausChannel mono = cocycle(process, 0, base.size());
    std::vector<CMat> hints;
    for (const auto& x : fixed) {
        hints.push_back(hermitian_part(x[0]));
        hints.push_back(hermitian_part(cplx(0.0, 1.0) * x[0]));
    }
    const auto search = find_invariant_projection(mono.kraus(), hints);
    if (!search.witness) return out;
    CMat q = *search.witness;
    for (Index it = 0; it <= d; ++it) {
        RandomMatrix p = transport_projection(process, 0, q);
        const CMat back = process.channel_at_point(0).apply(p[base.prev(0)]);
        const CMat q2 = support_projection(back, 1e-9 * std::max(op_norm(back), 1e-300));
        if (projection_rank(q2) == projection_rank(q)) {
            const double res = reducing_residual(process, p);
            if (res <= 1e-7) {
                out.projection = std::move(p);
                out.residual = res;
            }
            return out;
        }
        q = q2;
    }
    return out;
}

struct SteadyState {
    bool irreducible = false;
    std::size_t fixed_dimension = 0;
    RandomMatrix rho;                       // valid when irreducible
    std::optional<RandomMatrix> witness;    // reducing projection when reducible
    bool witness_search_failed = false;
    double transport_residual = 0.0;        // max ||phi_{theta w}(rho_w) - rho_{theta w}||
};

inline std::vector<RandomMatrix> global_fixed_space(const ProcessInstance& process, double tol = 1e-8) {
    const GlobalOperator g = build_global(process, Direction::Forward);
    const Index m = g.matrix.rows();
    const NullSpace ns = null_space(g.matrix - CMat::Identity(m, m), tol);
    std::vector<RandomMatrix> out;
    for (Index j = 0; j < ns.basis.cols(); ++j) out.push_back(RandomMatrix::unstack(ns.basis.col(j), g.n, g.d));
    return out;
}

inline SteadyState steady_state(const ProcessInstance& process, double tol = 1e-8) {
    const FiniteCycleBase& base = process.cycle();
    SteadyState s;
    const auto fixed = global_fixed_space(process, tol);
    s.fixed_dimension = fixed.size();
    if (fixed.size() == 1) {
        const cplx tr0 = fixed[0][0].trace();
        if (std::abs(tr0) > 1e-14) {
            RandomMatrix rho;
            bool pd = true;
            for (const auto& b : fixed[0].blocks) {
                rho.blocks.push_back(hermitian_part(b / tr0));
                pd = pd && min_hermitian_eigenvalue(rho.blocks.back()) > 1e-10;
            }
            if (pd) {
                for (std::size_t w = 0; w < base.size(); ++w) {
                    const std::size_t tw = base.next(w);
                    s.transport_residual =
                        std::max(s.transport_residual, op_norm(process.channel_at_point(tw).apply(rho[w]) - rho[tw]));
                }
                s.irreducible = true;
                s.rho = std::move(rho);
                return s;
            }
        }
    }
    const auto w = find_global_witness(process, fixed);
    s.witness = w.projection;
    s.witness_search_failed = !w.projection.has_value();
    return s;
}

// ---------------------------------------------------------------------------
// Peripheral spectrum and Gamma

struct GammaCoset {
    cplx representative;
    std::size_t order = 0;            // N_alpha
    std::vector<cplx> members;        // elements of the peripheral spectrum in the coset
    double certificate_smallest = 0.0;  // simplicity certificate of the representative
    double certificate_next = 0.0;
};

struct SpectralReport {
    std::vector<cplx> eigenvalues;
    std::vector<cplx> peripheral;     // Lambda_L, sorted by phase
    std::vector<cplx> koopman;        // Lambda_theta
    std::vector<GammaCoset> gamma;    // trivial coset first
    RandomMatrix rho;
    bool irreducible = false;
    double koopman_inclusion = 0.0;   // max distance from a Koopman root to Lambda_L
    double spectral_radius = 0.0;
};

// Index k with |z - e(k/n)| <= tol, or -1.
inline long root_index(cplx z, std::size_t n, double tol = kTolRoot) {
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(z - expi(static_cast<double>(k) / static_cast<double>(n))) <= tol) return static_cast<long>(k);
    return -1;
}

inline SpectralReport peripheral_and_gamma(const ProcessInstance& process, double tol = 1e-8) {
    const SteadyState ss = steady_state(process, tol);
    if (!ss.irreducible) fail(ErrorKind::NotIrreducible, "peripheral_and_gamma: process is reducible");
    const GlobalOperator g = build_global(process, Direction::Forward);
    const std::size_t n = g.n;
    const Index d = g.d;
    SpectralReport rep;
    rep.irreducible = true;
    rep.rho = ss.rho;
    rep.eigenvalues = eigenvalues(g.matrix);
    for (cplx z : rep.eigenvalues) rep.spectral_radius = std::max(rep.spectral_radius, std::abs(z));
    for (cplx z : rep.eigenvalues)
        if (std::abs(z) >= 1.0 - tol) rep.peripheral.push_back(z / std::abs(z));
    std::sort(rep.peripheral.begin(), rep.peripheral.end(),
              [](cplx a, cplx b) { return turn_of(a, 1e-9) < turn_of(b, 1e-9); });
    for (std::size_t k = 0; k < n; ++k) rep.koopman.push_back(expi(static_cast<double>(k) / static_cast<double>(n)));
    for (cplx r : rep.koopman) {
        double best = 1e300;
        for (cplx z : rep.peripheral) best = std::min(best, std::abs(z - r));
        rep.koopman_inclusion = std::max(rep.koopman_inclusion, best);
    }

    std::vector<bool> assigned(rep.peripheral.size(), false);
    for (std::size_t i = 0; i < rep.peripheral.size(); ++i) {
        if (assigned[i]) continue;
        GammaCoset c;
        c.representative = rep.peripheral[i];  // sorted by phase: first is smallest
        for (std::size_t j = i; j < rep.peripheral.size(); ++j)
            if (!assigned[j] && root_index(rep.peripheral[j] / rep.peripheral[i], n) >= 0) {
                assigned[j] = true;
                c.members.push_back(rep.peripheral[j]);
            }
        const auto cert = certify_eigenvalue(g.matrix, c.representative);
        c.certificate_smallest = cert.smallest;
        c.certificate_next = cert.next;
        if (!cert.simple) fail(ErrorKind::SimplicityViolation, "peripheral eigenvalue is not numerically simple");
        for (cplx z : c.members)
            if (!certify_eigenvalue(g.matrix, z).simple)
                fail(ErrorKind::SimplicityViolation, "peripheral eigenvalue is not numerically simple");
        for (Index m = 1; m <= d; ++m)
            if (root_index(std::pow(c.representative, static_cast<double>(m)), n) >= 0) {
                c.order = static_cast<std::size_t>(m);
                break;
            }
        if (c.order == 0) fail(ErrorKind::OrderNotFound, "no power of a peripheral eigenvalue up to d lies in the Koopman spectrum");
        rep.gamma.push_back(std::move(c));
    }
    if (rep.gamma.empty() || root_index(rep.gamma.front().representative, n) < 0)
        fail(ErrorKind::InternalInconsistency, "Koopman spectrum missing from the peripheral spectrum");
    if (static_cast<Index>(rep.gamma.size()) > d * d) fail(ErrorKind::InternalInconsistency, "|Gamma| exceeds d^2");
    auto coset_of = [&](cplx z) -> long {
        for (std::size_t k = 0; k < rep.gamma.size(); ++k)
            if (root_index(z / rep.gamma[k].representative, n) >= 0) return static_cast<long>(k);
        return -1;
    };
    for (const auto& a : rep.gamma) {
        if (coset_of(std::conj(a.representative)) < 0) fail(ErrorKind::InternalInconsistency, "Gamma not closed under inverses");
        for (const auto& b : rep.gamma)
            if (coset_of(a.representative * b.representative) < 0)
                fail(ErrorKind::InternalInconsistency, "Gamma not closed under multiplication");
    }
    return rep;
}

// Coset of largest N_alpha; the first such in phase order.
inline std::size_t generator_coset(const SpectralReport& report) {
    std::size_t best = 0;
    for (std::size_t k = 0; k < report.gamma.size(); ++k)
        if (report.gamma[k].order > report.gamma[best].order) best = k;
    return best;
}

// ---------------------------------------------------------------------------
// Eigentuples

struct Eigentuple {
    cplx alpha;
    cplx beta;                 // alpha^N snapped into the Koopman spectrum
    std::size_t order = 1;     // N_alpha
    RandomMatrix u;
    std::vector<cplx> f;
    std::vector<double> a_f;   // f = e(a_f), values in [0, 1)
    double eigen_residual = 0.0;     // max_w ||(L* u)_w - alpha u_w||
    double unitarity_residual = 0.0;
    double power_residual = 0.0;     // max_w ||u_w^N - f_w I||
    double koopman_residual = 0.0;   // max_w |f(theta w) - beta f(w)|
};

inline std::size_t order_in_report(const SpectralReport& report, cplx alpha, std::size_t n) {
    for (const auto& c : report.gamma)
        if (root_index(alpha / c.representative, n) >= 0) return c.order;
    fail(ErrorKind::NotAnEigenvalue, "eigentuple: alpha is not in the peripheral spectrum");
}

inline Eigentuple eigentuple(const ProcessInstance& process, const SpectralReport& report, cplx alpha) {
    const FiniteCycleBase& base = process.cycle();
    const std::size_t n = base.size();
    const Index d = process.dim;
    bool found = false;
    for (cplx z : report.peripheral) found = found || std::abs(z - alpha) <= 1e-7;
    if (!found) fail(ErrorKind::NotAnEigenvalue, "eigentuple: alpha is not in the peripheral spectrum");
    Eigentuple e;
    e.alpha = alpha / std::abs(alpha);
    e.order = order_in_report(report, e.alpha, n);

    const GlobalOperator adj = build_global(process, Direction::Adjoint);
    const auto cert = certify_eigenvalue(adj.matrix, e.alpha);
    if (!cert.simple) fail(ErrorKind::SimplicityViolation, "eigentuple: alpha is not a simple eigenvalue of the adjoint");
    RandomMatrix x = RandomMatrix::unstack(cert.vector, n, d);
    const double scale = x[0].norm() / std::sqrt(static_cast<double>(d));
    if (scale < 1e-300) fail(ErrorKind::NotUnitary, "eigentuple: eigenmatrix vanishes at the base point");
    const cplx phase = gauge_phase(x[0]);
    for (auto& b : x.blocks) b *= phase / scale;
    for (const auto& b : x.blocks)
        e.unitarity_residual = std::max(e.unitarity_residual, op_norm(b.adjoint() * b - identity(d)));
    if (e.unitarity_residual > 1e-9)
        fail(ErrorKind::NotUnitary, "eigentuple: eigenmatrix blocks are not unitary (residual " +
                                        std::to_string(e.unitarity_residual) + ")");
    e.u = x;
    const RandomMatrix lu = adj.apply(e.u);
    for (std::size_t w = 0; w < n; ++w) e.eigen_residual = std::max(e.eigen_residual, op_norm(lu[w] - e.alpha * e.u[w]));

    const auto big_n = static_cast<int>(e.order);
    const cplx beta_raw = std::pow(e.alpha, static_cast<double>(big_n));
    const long k = root_index(beta_raw, n, 1e-7);
    if (k < 0) fail(ErrorKind::InternalInconsistency, "eigentuple: alpha^N is not a Koopman eigenvalue");
    e.beta = expi(static_cast<double>(k) / static_cast<double>(n));
    for (std::size_t w = 0; w < n; ++w) {
        CMat un = identity(d);
        for (int j = 0; j < big_n; ++j) un = un * e.u[w];
        const cplx fw = un.trace() / static_cast<double>(d);
        e.power_residual = std::max(e.power_residual, op_norm(un - fw * identity(d)));
        e.f.push_back(fw / std::abs(fw));
        e.a_f.push_back(turn_of(e.f.back()));
    }
    for (std::size_t w = 0; w < n; ++w)
        e.koopman_residual = std::max(e.koopman_residual, std::abs(e.f[base.next(w)] - e.beta * e.f[w]));
    if (e.power_residual > 1e-8 || e.koopman_residual > 1e-8)
        fail(ErrorKind::InternalInconsistency, "eigentuple: u^N = f I or the Koopman relation fails");
    return e;
}

// Forward eigenmatrix at conj(alpha) compared with (scalar) u rho, blockwise.
inline double factorization_residual(const ProcessInstance& process, const Eigentuple& e, const RandomMatrix& rho) {
    const GlobalOperator g = build_global(process, Direction::Forward);
    const auto cert = certify_eigenvalue(g.matrix, std::conj(e.alpha));
    const RandomMatrix x = RandomMatrix::unstack(cert.vector, g.n, g.d);
    RandomMatrix ur;
    for (std::size_t w = 0; w < g.n; ++w) ur.blocks.push_back(e.u[w] * rho[w]);
    const CVec a = ur.stacked(), b = x.stacked();
    const cplx c = b.dot(a) / b.squaredNorm();  // best scalar with a ~ c b
    double r = 0.0;
    for (std::size_t w = 0; w < g.n; ++w) r = std::max(r, op_norm(ur[w] - c * x[w]));
    return r;
}

} // namespace eqp
