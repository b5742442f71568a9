// random.hpp: seeded sampling of matrices, unitaries and channels.
//
// Draws come from std::mt19937_64, whose output sequence is fixed by the
// standard. Conversions to doubles are done here rather than through
// <random> distributions, whose algorithms are implementation-defined.

#pragma once

#include "eqp/channel.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace eqp {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    // Independent stream `id` derived from a base seed.
    static Rng stream(std::uint64_t seed, std::uint64_t id) {
        return Rng(splitmix64(seed + 0x9E3779B97F4A7C15ULL * (id + 1)));
    }

    std::uint64_t next() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Standard normal (Box-Muller, one value per call).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    // Standard complex normal: E|z|^2 = 1.
    cplx complex_normal() { return {normal() * M_SQRT1_2, normal() * M_SQRT1_2}; }

    // Index in [0, n).
    std::size_t below(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    // Index drawn with the given probabilities.
    std::size_t categorical(const std::vector<double>& probs) {
        const double x = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (x < acc) return i;
        }
        return probs.size() - 1;
    }

private:
    std::mt19937_64 engine_;
};

inline CMat random_cmat(Rng& rng, Index rows, Index cols) {
    CMat m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
    return m;
}

inline CMat random_cmat(Rng& rng, Index d) { return random_cmat(rng, d, d); }

inline CMat random_hermitian(Rng& rng, Index d) { return hermitian_part(random_cmat(rng, d)); }

inline CMat random_psd(Rng& rng, Index d) {
    const CMat g = random_cmat(rng, d);
    return g * g.adjoint();
}

inline CMat random_density(Rng& rng, Index d) {
    const CMat p = random_psd(rng, d);
    return p / p.trace().real();
}

// Haar-distributed unitary: QR of a Ginibre matrix, columns rephased by the
// diagonal of R.
inline CMat haar_unitary(Rng& rng, Index d) {
    const CMat g = random_cmat(rng, d);
    Eigen::HouseholderQR<CMat> qr(g);
    CMat q = qr.householderQ() * CMat::Identity(d, d);
    const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < d; ++j) {
        const cplx rjj = r(j, j);
        const double m = std::abs(rjj);
        q.col(j) *= (m > 0.0 ? rjj / m : cplx(1.0));
    }
    return q;
}

// Channel with `rank` Kraus operators cut from a random isometry C^d -> C^{rank d}.
inline KrausChannel random_channel(Rng& rng, Index d, Index rank) {
    const CMat g = random_cmat(rng, rank * d, d);
    Eigen::HouseholderQR<CMat> qr(g);
    const CMat v = qr.householderQ() * CMat::Identity(rank * d, d);
    std::vector<CMat> kraus;
    for (Index r = 0; r < rank; ++r) kraus.push_back(v.middleRows(r * d, d));
    return KrausChannel(std::move(kraus));
}

// Irreducible channel with peripheral group of order m: the space is split into
// m random blocks (sizes differing by at most one, all nonempty) cycled by the
// channel, each block map a random full-rank channel piece; the block basis is
// then rotated by a Haar unitary unless `rotate` is false.
inline KrausChannel random_block_cyclic_channel(Rng& rng, Index d, Index m, bool rotate = true) {
    if (m < 1 || m > d) fail(ErrorKind::InvalidArgument, "random_block_cyclic_channel: need 1 <= m <= d");
    std::vector<Index> size(static_cast<std::size_t>(m), d / m), start(static_cast<std::size_t>(m), 0);
    for (Index k = 0; k < d % m; ++k) size[static_cast<std::size_t>(k)] += 1;
    for (Index k = 1; k < m; ++k) start[static_cast<std::size_t>(k)] = start[static_cast<std::size_t>(k - 1)] + size[static_cast<std::size_t>(k - 1)];
    const Index rank = d;
    std::vector<CMat> kraus(static_cast<std::size_t>(rank), CMat::Zero(d, d));
    for (Index k = 0; k < m; ++k) {
        const auto ks = static_cast<std::size_t>(k), kn = static_cast<std::size_t>((k + 1) % m);
        const Index din = size[ks], dout = size[kn];
        // isometry C^{din} -> C^{rank * dout}
        const CMat g = random_cmat(rng, rank * dout, din);
        Eigen::HouseholderQR<CMat> qr(g);
        const CMat v = qr.householderQ() * CMat::Identity(rank * dout, din);
        for (Index r = 0; r < rank; ++r)
            kraus[static_cast<std::size_t>(r)].block(start[kn], start[ks], dout, din) = v.middleRows(r * dout, dout);
    }
    if (rotate) {
        const CMat w = haar_unitary(rng, d);
        for (auto& k : kraus) k = w * k * w.adjoint();
    }
    return KrausChannel(std::move(kraus));
}

} // namespace eqp
