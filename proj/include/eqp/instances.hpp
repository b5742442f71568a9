// instances.hpp: constructed processes used by the examples, tests and the
// acceptance suite.

#pragma once

#include "eqp/ergodic_base.hpp"
#include "eqp/random.hpp"

#include <numeric>
#include <vector>

namespace eqp {

inline CMat random_diagonal_unitary(Rng& rng, Index d) {
    CMat u = CMat::Zero(d, d);
    for (Index i = 0; i < d; ++i) u(i, i) = expi(rng.uniform());
    return u;
}

// Channel a -> sum_i w_i D_i S^s a S^{-s} D_i^* with random diagonal unitaries D_i.
inline KrausChannel decorated_shift_channel(Rng& rng, Index d, long s, std::size_t terms = 2) {
    const CMat sh = channels::shift_unitary(d);
    CMat ss = identity(d);
    for (long j = 0; j < ((s % d) + d) % d; ++j) ss = sh * ss;
    std::vector<double> w(terms);
    double total = 0.0;
    for (auto& x : w) total += (x = 0.2 + rng.uniform());
    std::vector<CMat> kraus;
    for (std::size_t i = 0; i < terms; ++i) kraus.push_back(std::sqrt(w[i] / total) * random_diagonal_unitary(rng, d) * ss);
    return KrausChannel(std::move(kraus));
}

// n-point cycle whose point j carries a decorated shift by shifts[j]. The total
// shift must be a unit mod d.
inline ProcessInstance decorated_cycle(std::size_t n, Index d, const std::vector<long>& shifts, std::uint64_t seed) {
    if (shifts.size() != n) fail(ErrorKind::InvalidArgument, "decorated_cycle: one shift per point");
    const long total = std::accumulate(shifts.begin(), shifts.end(), 0L);
    if (std::gcd(((total % d) + d) % d, static_cast<long>(d)) != 1)
        fail(ErrorKind::InvalidArgument, "decorated_cycle: total shift must be coprime to d");
    Rng rng(seed);
    std::vector<KrausChannel> chans;
    std::vector<std::size_t> assign;
    for (std::size_t j = 0; j < n; ++j) {
        chans.push_back(decorated_shift_channel(rng, d, shifts[j]));
        assign.push_back(j);
    }
    return make_process(FiniteCycleBase::cycle(n), std::move(chans), std::move(assign));
}

// d = 3 channels moving between A = span(e1, e2) and B = span(e3). The swap sends
// A to B and B to a random state in A; the keep map rotates A by random unitaries.
inline KrausChannel block_swap_channel(Rng& rng) {
    const double q = 0.2 + 0.6 * rng.uniform();
    std::vector<CMat> kraus(4, CMat::Zero(3, 3));
    kraus[0](2, 0) = 1.0;
    kraus[1](2, 1) = 1.0;
    const CMat v = haar_unitary(rng, 2);
    kraus[2].block(0, 2, 2, 1) = std::sqrt(q) * v.col(0);
    kraus[3].block(0, 2, 2, 1) = std::sqrt(1.0 - q) * v.col(1);
    return KrausChannel(std::move(kraus));
}

inline KrausChannel block_keep_channel(Rng& rng) {
    const double w = 0.2 + 0.6 * rng.uniform();
    std::vector<CMat> kraus;
    for (double p : {w, 1.0 - w}) {
        CMat u = CMat::Zero(3, 3);
        u.topLeftCorner(2, 2) = haar_unitary(rng, 2);
        u(2, 2) = expi(rng.uniform());
        kraus.push_back(std::sqrt(p) * u);
    }
    return KrausChannel(std::move(kraus));
}

// Non-unital cycle with N_alpha = 2 and blocks of unequal rank. `swaps[j]` marks
// the points carrying a swap; their number must be odd.
inline ProcessInstance block_swap_cycle(const std::vector<bool>& swaps, std::uint64_t seed) {
    const auto count = std::count(swaps.begin(), swaps.end(), true);
    if (count % 2 == 0) fail(ErrorKind::InvalidArgument, "block_swap_cycle: needs an odd number of swaps");
    Rng rng(seed);
    std::vector<KrausChannel> chans;
    std::vector<std::size_t> assign;
    for (std::size_t j = 0; j < swaps.size(); ++j) {
        chans.push_back(swaps[j] ? block_swap_channel(rng) : block_keep_channel(rng));
        assign.push_back(j);
    }
    return make_process(FiniteCycleBase::cycle(swaps.size()), std::move(chans), std::move(assign));
}

// Single channel as a one-point cycle.
inline ProcessInstance trivial_base(const KrausChannel& ch) {
    return make_process(FiniteCycleBase::cycle(1), {ch}, {0});
}

// Rotation by t with dephasing on [0, t) and the flip on [t, 1).
inline ProcessInstance quasiperiodic_process(double t) {
    return make_process(RotationBase{t}, {channels::dephasing(2), channels::cyclic_shift(2)}, {0, 1}, {0.0, t, 1.0});
}

// i.i.d. unitary channels a -> u_k S a S^* u_k^* with random diagonal u_k,
// equal weights.
inline ProcessInstance iid_decorated_shift(Index d, std::size_t support, std::uint64_t seed) {
    Rng rng(seed);
    const CMat s = channels::shift_unitary(d);
    std::vector<KrausChannel> chans;
    for (std::size_t k = 0; k < support; ++k) chans.push_back(channels::unitary(random_diagonal_unitary(rng, d) * s));
    return make_process(IIDBase{std::vector<double>(support, 1.0 / static_cast<double>(support))}, std::move(chans), {});
}

// i.i.d. Haar unitary conjugations with a finite sampled support.
inline ProcessInstance iid_haar(Index d, std::size_t support, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<KrausChannel> chans;
    for (std::size_t k = 0; k < support; ++k) chans.push_back(channels::unitary(haar_unitary(rng, d)));
    return make_process(IIDBase{std::vector<double>(support, 1.0 / static_cast<double>(support))}, std::move(chans), {});
}

// i.i.d. block-cyclic channels on fixed blocks (no basis rotation), period m.
inline ProcessInstance iid_block_cyclic(Index d, Index m, std::size_t support, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<KrausChannel> chans;
    for (std::size_t k = 0; k < support; ++k) chans.push_back(random_block_cyclic_channel(rng, d, m, false));
    return make_process(IIDBase{std::vector<double>(support, 1.0 / static_cast<double>(support))}, std::move(chans), {});
}

} // namespace eqp
