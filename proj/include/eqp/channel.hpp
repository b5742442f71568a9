// channel.hpp: quantum channels in Kraus form with transfer and Choi views.

#pragma once

#include "eqp/linalg.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace eqp {

inline constexpr double kTolCptp = 1e-9;

class KrausChannel {
public:
    KrausChannel() = default;

    explicit KrausChannel(std::vector<CMat> kraus) : kraus_(std::move(kraus)) {
        if (kraus_.empty()) fail(ErrorKind::InvalidArgument, "KrausChannel: empty Kraus list");
        dim_ = kraus_.front().rows();
        if (dim_ == 0) fail(ErrorKind::DimensionMismatch, "KrausChannel: zero dimension");
        for (const auto& k : kraus_)
            if (k.rows() != dim_ || k.cols() != dim_)
                fail(ErrorKind::DimensionMismatch, "KrausChannel: Kraus operators must share a square shape");
        transfer_ = CMat::Zero(dim_ * dim_, dim_ * dim_);
        for (const auto& k : kraus_) transfer_ += Eigen::kroneckerProduct(k.conjugate(), k);
    }

    Index dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return kraus_.size(); }
    const std::vector<CMat>& kraus() const noexcept { return kraus_; }

    // Column-stacking transfer matrix: vec(phi(a)) = T vec(a).
    const CMat& transfer() const noexcept { return transfer_; }

    CMat choi() const {
        CMat c = CMat::Zero(dim_ * dim_, dim_ * dim_);
        for (const auto& k : kraus_) {
            const CVec v = vec(k);
            c += v * v.adjoint();
        }
        return c;
    }

    CMat apply(const CMat& a) const {
        check(a, "apply");
        CMat out = CMat::Zero(dim_, dim_);
        for (const auto& k : kraus_) out += k * a * k.adjoint();
        return out;
    }

    CMat adjoint_apply(const CMat& a) const {
        check(a, "adjoint_apply");
        CMat out = CMat::Zero(dim_, dim_);
        for (const auto& k : kraus_) out += k.adjoint() * a * k;
        return out;
    }

private:
    void check(const CMat& a, const char* where) const {
        if (a.rows() != dim_ || a.cols() != dim_)
            fail(ErrorKind::DimensionMismatch, std::string(where) + ": input shape does not match channel dimension");
    }

    Index dim_ = 0;
    std::vector<CMat> kraus_;
    CMat transfer_;
};

struct CptpReport {
    double tp_residual = 0.0;      // ||sum K*K - I||_inf
    double min_choi_eigenvalue = 0.0;
    bool trace_preserving = false;
    bool completely_positive = false;
    bool ok() const noexcept { return trace_preserving && completely_positive; }
};

inline CptpReport is_cptp(const KrausChannel& ch, double tol = kTolCptp) {
    CMat s = CMat::Zero(ch.dim(), ch.dim());
    for (const auto& k : ch.kraus()) s += k.adjoint() * k;
    CptpReport r;
    r.tp_residual = op_norm(s - identity(ch.dim()));
    r.min_choi_eigenvalue = min_hermitian_eigenvalue(ch.choi());
    r.trace_preserving = r.tp_residual <= tol;
    r.completely_positive = r.min_choi_eigenvalue >= -tol;
    return r;
}

inline void require_cptp(const KrausChannel& ch, double tol = kTolCptp) {
    const auto r = is_cptp(ch, tol);
    if (!r.ok())
        fail(ErrorKind::InvalidArgument, "channel is not CPTP (trace residual " + std::to_string(r.tp_residual) +
                                             ", min Choi eigenvalue " + std::to_string(r.min_choi_eigenvalue) + ")");
}

// Most negative eigenvalue of psi(a*a) - psi(a)*psi(a), clipped at 0.
inline double schwarz_residual(const KrausChannel& ch, const CMat& a) {
    const CMat pa = ch.adjoint_apply(a);
    const CMat gap = ch.adjoint_apply(a.adjoint() * a) - pa.adjoint() * pa;
    return std::min(0.0, min_hermitian_eigenvalue(gap));
}

inline bool mult_domain_member(const KrausChannel& ch, const CMat& a, double tol) {
    const CMat pa = ch.adjoint_apply(a);
    const double left = op_norm(ch.adjoint_apply(a.adjoint() * a) - pa.adjoint() * pa);
    const double right = op_norm(ch.adjoint_apply(a * a.adjoint()) - pa * pa.adjoint());
    return left <= tol && right <= tol;
}

// Choi matrix from a column-stacking transfer matrix.
inline CMat choi_from_transfer(const CMat& t) {
    const Index d = isqrt_dim(t.rows());
    CMat c(d * d, d * d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            for (Index k = 0; k < d; ++k)
                for (Index l = 0; l < d; ++l) c(i + j * d, k + l * d) = t(i + k * d, j + l * d);
    return c;
}

// Minimal Kraus form of the completely positive map with transfer matrix t.
inline KrausChannel kraus_from_transfer(const CMat& t, double rel_tol = 1e-13) {
    const Index d = isqrt_dim(t.rows());
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(choi_from_transfer(t)));
    const auto& ev = es.eigenvalues();
    const double top = std::max(ev(ev.size() - 1), 0.0);
    std::vector<CMat> kraus;
    for (Index i = ev.size() - 1; i >= 0; --i) {
        if (ev(i) <= rel_tol * top) break;
        kraus.push_back(std::sqrt(ev(i)) * unvec(es.eigenvectors().col(i), d));
    }
    if (kraus.empty()) kraus.push_back(CMat::Zero(d, d));
    return KrausChannel(std::move(kraus));
}

// outer o inner. Kraus lists longer than `budget` are compressed through the Choi matrix.
inline KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner, std::size_t budget = 4096) {
    if (outer.dim() != inner.dim()) fail(ErrorKind::DimensionMismatch, "compose: dimension mismatch");
    if (outer.size() * inner.size() > budget) return kraus_from_transfer(outer.transfer() * inner.transfer());
    std::vector<CMat> kraus;
    kraus.reserve(outer.size() * inner.size());
    for (const auto& a : outer.kraus())
        for (const auto& b : inner.kraus()) kraus.push_back(a * b);
    return KrausChannel(std::move(kraus));
}

// sum_i p_i phi_i
inline KrausChannel average_channel(std::span<const KrausChannel> channels, std::span<const double> probs) {
    if (channels.empty() || channels.size() != probs.size())
        fail(ErrorKind::InvalidArgument, "average_channel: channel and probability lists differ");
    std::vector<CMat> kraus;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        if (channels[i].dim() != channels[0].dim()) fail(ErrorKind::DimensionMismatch, "average_channel: dimension mismatch");
        if (probs[i] < 0.0) fail(ErrorKind::InvalidArgument, "average_channel: negative weight");
        for (const auto& k : channels[i].kraus()) kraus.push_back(std::sqrt(probs[i]) * k);
    }
    return KrausChannel(std::move(kraus));
}

// The Heisenberg-picture map as a Kraus map (Kraus operators K*).
inline KrausChannel adjoint_channel(const KrausChannel& ch) {
    std::vector<CMat> kraus;
    for (const auto& k : ch.kraus()) kraus.push_back(k.adjoint());
    return KrausChannel(std::move(kraus));
}

// ---------------------------------------------------------------------------
// Standard channels

namespace channels {

inline KrausChannel identity(Index d) { return KrausChannel({eqp::identity(d)}); }

inline KrausChannel unitary(const CMat& u) { return KrausChannel({u}); }

// Kraus operators v_i = |e_i><e_{i+1}|, indices mod d.
inline KrausChannel cyclic_shift(Index d) {
    std::vector<CMat> kraus;
    for (Index i = 0; i < d; ++i) kraus.push_back(basis_op(d, i, (i + 1) % d));
    return KrausChannel(std::move(kraus));
}

// Unitary S with S e_j = e_{j+1}; conjugation by S moves |e_j><e_j| to |e_{j+1}><e_{j+1}|.
inline CMat shift_unitary(Index d) {
    CMat s = CMat::Zero(d, d);
    for (Index j = 0; j < d; ++j) s((j + 1) % d, j) = 1.0;
    return s;
}

inline CMat clock_unitary(Index d) {
    CMat z = CMat::Zero(d, d);
    for (Index j = 0; j < d; ++j) z(j, j) = expi(static_cast<double>(j) / static_cast<double>(d));
    return z;
}

// a -> (1 - lambda) a + lambda tr(a) I / d, realized with the d^2 Weyl operators.
inline KrausChannel depolarizing(Index d, double lambda) {
    if (lambda < 0.0 || lambda > 1.0 + 1.0 / static_cast<double>(d * d - 1))
        fail(ErrorKind::InvalidArgument, "depolarizing: lambda out of range");
    const CMat x = shift_unitary(d), z = clock_unitary(d);
    const double dd = static_cast<double>(d * d);
    std::vector<CMat> kraus;
    CMat xa = eqp::identity(d);
    for (Index a = 0; a < d; ++a) {
        CMat w = xa;
        for (Index b = 0; b < d; ++b) {
            const double weight = (a == 0 && b == 0) ? 1.0 - lambda + lambda / dd : lambda / dd;
            if (weight > 0.0) kraus.push_back(std::sqrt(weight) * w);
            w = w * z;
        }
        xa = xa * x;
    }
    return KrausChannel(std::move(kraus));
}

// Kraus operators sqrt(1-p) I and sqrt(p) |k><k|; p = 1 is complete dephasing.
inline KrausChannel dephasing(Index d, double p = 1.0) {
    std::vector<CMat> kraus;
    if (p < 1.0) kraus.push_back(std::sqrt(1.0 - p) * eqp::identity(d));
    for (Index k = 0; k < d; ++k) kraus.push_back(std::sqrt(p) * basis_op(d, k, k));
    return KrausChannel(std::move(kraus));
}

inline KrausChannel amplitude_damping(double gamma) {
    CMat k0 = CMat::Zero(2, 2), k1 = CMat::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - gamma);
    k1(0, 1) = std::sqrt(gamma);
    return KrausChannel({k0, k1});
}

// Block-diagonal channel a -> phi1(p1 a p1) + phi2(p2 a p2) on C^{d1} + C^{d2}.
inline KrausChannel direct_sum(const KrausChannel& a, const KrausChannel& b) {
    const Index d1 = a.dim(), d2 = b.dim();
    std::vector<CMat> kraus;
    for (const auto& k : a.kraus()) {
        CMat m = CMat::Zero(d1 + d2, d1 + d2);
        m.topLeftCorner(d1, d1) = k;
        kraus.push_back(m);
    }
    for (const auto& k : b.kraus()) {
        CMat m = CMat::Zero(d1 + d2, d1 + d2);
        m.bottomRightCorner(d2, d2) = k;
        kraus.push_back(m);
    }
    return KrausChannel(std::move(kraus));
}

inline KrausChannel tensor_product(const KrausChannel& a, const KrausChannel& b) {
    std::vector<CMat> kraus;
    for (const auto& ka : a.kraus())
        for (const auto& kb : b.kraus()) kraus.push_back(Eigen::kroneckerProduct(ka, kb).eval());
    return KrausChannel(std::move(kraus));
}

} // namespace channels
} // namespace eqp
