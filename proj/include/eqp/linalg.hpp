// linalg.hpp: dense complex matrix helpers (vectorization, norms, predicates,
// polar form, spectral projections, null spaces, eigenvalue certificates).

#pragma once

#include "eqp/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace eqp {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// e(t) = exp(2 pi i t)
inline cplx expi(double t) { return std::polar(1.0, kTwoPi * t); }

// e_n(t) = exp(2 pi i t / n)
inline cplx expi_n(std::size_t n, double t) { return expi(t / static_cast<double>(n)); }

// Wrap to [0, 1); values within `eps` of 1 are sent to 0.
inline double wrap_unit(double a, double eps = 1e-12) {
    a -= std::floor(a);
    if (a >= 1.0 - eps) a = 0.0;
    if (a < 0.0) a = 0.0;
    return a;
}

// Phase of z as a fraction of a full turn, in [0, 1).
inline double turn_of(cplx z, double eps = 1e-12) {
    return wrap_unit(std::arg(z) / kTwoPi, eps);
}

inline CMat identity(Index d) { return CMat::Identity(d, d); }

inline CMat basis_op(Index d, Index i, Index j) {
    CMat m = CMat::Zero(d, d);
    m(i, j) = 1.0;
    return m;
}

// Column-stacking vectorization.
inline CVec vec(const CMat& a) {
    return Eigen::Map<const CVec>(a.data(), a.size());
}

inline CMat unvec(const CVec& v, Index d) {
    if (v.size() != d * d) fail(ErrorKind::DimensionMismatch, "unvec: length is not d*d");
    return Eigen::Map<const CMat>(v.data(), d, d);
}

inline Index isqrt_dim(Index n2) {
    const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n2))));
    if (d * d != n2) fail(ErrorKind::DimensionMismatch, "size is not a perfect square");
    return d;
}

// Hilbert-Schmidt inner product <a, b> = tr(a* b).
inline cplx hs_inner(const CMat& a, const CMat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        fail(ErrorKind::DimensionMismatch, "hs_inner: shape mismatch");
    return (a.array().conjugate() * b.array()).sum();
}

inline Eigen::VectorXd singular_values(const CMat& a) {
    if (a.size() == 0) return Eigen::VectorXd();
    return Eigen::BDCSVD<CMat>(a).singularValues();
}

// Operator (Schatten-infinity) norm.
inline double op_norm(const CMat& a) {
    if (a.size() == 0) return 0.0;
    return singular_values(a)(0);
}

inline double trace_norm(const CMat& a) {
    if (a.size() == 0) return 0.0;
    return singular_values(a).sum();
}

inline CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

inline Eigen::VectorXd hermitian_eigenvalues(const CMat& h) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(h), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

inline double min_hermitian_eigenvalue(const CMat& h) {
    return hermitian_eigenvalues(h)(0);
}

inline bool is_hermitian(const CMat& a, double tol) {
    return a.rows() == a.cols() && op_norm(a - a.adjoint()) <= tol;
}

inline bool is_psd(const CMat& a, double tol) {
    return is_hermitian(a, tol) && min_hermitian_eigenvalue(a) >= -tol;
}

inline bool is_unitary(const CMat& u, double tol) {
    return u.rows() == u.cols() && op_norm(u.adjoint() * u - identity(u.rows())) <= tol;
}

inline bool is_projection(const CMat& p, double tol) {
    return p.rows() == p.cols() && op_norm(p * p - p) <= tol && op_norm(p - p.adjoint()) <= tol;
}

// Orthogonal projection onto the support of the part of h with eigenvalues above `cut`.
inline CMat support_projection(const CMat& h, double cut) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(h));
    const Index d = h.rows();
    CMat p = CMat::Zero(d, d);
    for (Index i = 0; i < d; ++i)
        if (es.eigenvalues()(i) > cut) p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    return p;
}

// Projection onto the column span of `cols` (orthonormalized via SVD).
inline CMat span_projection(const CMat& cols, double rank_tol = 1e-10) {
    const Index d = cols.rows();
    if (cols.cols() == 0) return CMat::Zero(d, d);
    Eigen::BDCSVD<CMat> svd(cols, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    CMat p = CMat::Zero(d, d);
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > rank_tol * std::max(1.0, s(0))) p += svd.matrixU().col(i) * svd.matrixU().col(i).adjoint();
    return p;
}

// Orthonormal basis (columns) of the range of a projection.
inline CMat range_basis(const CMat& p) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(p));
    std::vector<Index> keep;
    for (Index i = 0; i < p.rows(); ++i)
        if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
    CMat v(p.rows(), static_cast<Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) v.col(static_cast<Index>(j)) = es.eigenvectors().col(keep[j]);
    return v;
}

inline Index projection_rank(const CMat& p) {
    return static_cast<Index>(std::llround(p.trace().real()));
}

// ---------------------------------------------------------------------------
// Gauge fixing

// Index (column-major) of the first entry whose magnitude is within a relative
// 1e-6 of the largest.
inline Index gauge_entry(const CMat& u) {
    const double big = u.cwiseAbs().maxCoeff();
    for (Index k = 0; k < u.size(); ++k)
        if (std::abs(u.data()[k]) >= (1.0 - 1e-6) * big) return k;
    return 0;
}

// Unit scalar z such that z * u has its gauge entry real positive.
inline cplx gauge_phase(const CMat& u) {
    const cplx v = u.data()[gauge_entry(u)];
    if (std::abs(v) == 0.0) return 1.0;
    return std::conj(v) / std::abs(v);
}

// ---------------------------------------------------------------------------
// Polar decomposition

struct PolarDecomposition {
    CMat unitary;
    CMat positive;
};

/// x = unitary * positive with positive = |x|. Rejects numerically singular x.
inline PolarDecomposition polar_unitary(const CMat& x) {
    if (x.rows() != x.cols() || x.rows() == 0) fail(ErrorKind::DimensionMismatch, "polar_unitary: square input required");
    Eigen::JacobiSVD<CMat> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) <= 1e-12 * s(0))
        fail(ErrorKind::SingularInput, "polar_unitary: smallest singular value below 1e-12 * largest");
    PolarDecomposition out;
    out.unitary = svd.matrixU() * svd.matrixV().adjoint();
    out.positive = svd.matrixV() * s.cast<cplx>().asDiagonal() * svd.matrixV().adjoint();
    return out;
}

// ---------------------------------------------------------------------------
// Clustering and spectral projections

// Single-linkage clusters of points closer than `tol`, each sorted ascending.
inline std::vector<std::vector<std::size_t>> cluster_values(std::span<const cplx> values, double tol) {
    const std::size_t n = values.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(values[i] - values[j]) <= tol) parent[find(i)] = find(j);
    std::vector<std::vector<std::size_t>> groups;
    std::vector<long> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(groups.size());
            groups.emplace_back();
        }
        groups[static_cast<std::size_t>(slot[r])].push_back(i);
    }
    return groups;
}

struct SpectralProjection {
    cplx eigenvalue;
    CMat projection;
};

/// Spectral decomposition of a normal matrix; eigenvalues closer than
/// `cluster_tol` are merged. Sorted by phase, then modulus.
inline std::vector<SpectralProjection> spectral_projections(const CMat& m, double cluster_tol = 1e-7) {
    if (m.rows() != m.cols() || m.rows() == 0) fail(ErrorKind::DimensionMismatch, "spectral_projections: square input required");
    const double scale = std::max(op_norm(m), 1e-300);
    if (op_norm(m * m.adjoint() - m.adjoint() * m) > 1e-9 * scale * scale)
        fail(ErrorKind::NotNormal, "spectral_projections: input is not normal");
    Eigen::ComplexSchur<CMat> schur(m);
    const CMat& t = schur.matrixT();
    const CMat& q = schur.matrixU();
    std::vector<cplx> ev(static_cast<std::size_t>(m.rows()));
    for (Index i = 0; i < m.rows(); ++i) ev[static_cast<std::size_t>(i)] = t(i, i);
    std::vector<SpectralProjection> out;
    for (const auto& group : cluster_values(ev, cluster_tol)) {
        cplx mean = 0.0;
        CMat p = CMat::Zero(m.rows(), m.rows());
        for (std::size_t i : group) {
            mean += ev[i];
            const auto col = q.col(static_cast<Index>(i));
            p += col * col.adjoint();
        }
        mean /= static_cast<double>(group.size());
        out.push_back({mean, p});
    }
    std::sort(out.begin(), out.end(), [](const SpectralProjection& a, const SpectralProjection& b) {
        const double ta = turn_of(a.eigenvalue, 1e-9), tb = turn_of(b.eigenvalue, 1e-9);
        if (std::abs(ta - tb) > 1e-12) return ta < tb;
        return std::abs(a.eigenvalue) < std::abs(b.eigenvalue);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Null spaces and eigenvalue certificates

struct NullSpace {
    CMat basis;                       // orthonormal columns
    Eigen::VectorXd singular_values;  // ascending
};

/// Right null space of `a`: right singular vectors with singular value <= threshold.
inline NullSpace null_space(const CMat& a, double threshold) {
    Eigen::BDCSVD<CMat> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd s_desc = svd.singularValues();
    const Index ncol = a.cols();
    Eigen::VectorXd s_all = Eigen::VectorXd::Zero(ncol);  // rank-deficient tall/wide padding
    s_all.head(s_desc.size()) = s_desc;
    NullSpace out;
    out.singular_values = s_all.reverse();
    std::vector<Index> keep;
    for (Index i = 0; i < ncol; ++i)
        if (s_all(i) <= threshold) keep.push_back(i);
    out.basis.resize(ncol, static_cast<Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) out.basis.col(static_cast<Index>(j)) = svd.matrixV().col(keep[j]);
    return out;
}

struct EigenCertificate {
    double smallest = 0.0;  // smallest singular value of (A - lambda I)
    double next = 0.0;      // second smallest
    bool simple = false;
    CVec vector;            // unit right null direction
};

inline constexpr double kNullTol = 1e-8;
inline constexpr double kGapTol = 1e-6;

/// Numerical simplicity certificate: lambda is a simple eigenvalue of `a` when
/// the smallest singular value of (a - lambda I) is below 1e-8 and the second
/// smallest exceeds 1e-6.
inline EigenCertificate certify_eigenvalue(const CMat& a, cplx lambda,
                                           double null_tol = kNullTol, double gap_tol = kGapTol) {
    const Index n = a.rows();
    CMat shifted = a - lambda * CMat::Identity(n, n);
    Eigen::BDCSVD<CMat> svd(shifted, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    EigenCertificate c;
    c.smallest = s(n - 1);
    c.next = n > 1 ? s(n - 2) : std::numeric_limits<double>::infinity();
    c.simple = c.smallest <= null_tol && c.next > gap_tol;
    c.vector = svd.matrixV().col(n - 1);
    return c;
}

inline std::vector<cplx> eigenvalues(const CMat& a) {
    Eigen::ComplexEigenSolver<CMat> es(a, false);
    if (es.info() != Eigen::Success) fail(ErrorKind::InternalInconsistency, "eigenvalue solver did not converge");
    std::vector<cplx> out(static_cast<std::size_t>(a.rows()));
    for (Index i = 0; i < a.rows(); ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    return out;
}

inline double spectral_radius(const CMat& a) {
    double r = 0.0;
    for (cplx z : eigenvalues(a)) r = std::max(r, std::abs(z));
    return r;
}

// Smallest q in [1, max_order] with |z^q - 1| <= tol, or 0.
inline std::size_t root_of_unity_order(cplx z, std::size_t max_order, double tol) {
    const double t = turn_of(z, 0.0);
    for (std::size_t q = 1; q <= max_order; ++q)
        if (std::abs(expi(t * static_cast<double>(q)) - 1.0) <= tol && std::abs(std::abs(z) - 1.0) <= tol) return q;
    return 0;
}

} // namespace eqp
