#include "eqp/instances.hpp"
#include "eqp/periodicity.hpp"

#include <gtest/gtest.h>

using namespace eqp;

namespace {

struct Analyzed {
    ProcessInstance process;
    SpectralReport report;
    Eigentuple tuple;
    PeriodicPartition partition;
};

Analyzed analyze(ProcessInstance p) {
    SpectralReport rep = peripheral_and_gamma(p);
    Eigentuple e = eigentuple(p, rep, rep.gamma[generator_coset(rep)].representative);
    PeriodicPartition part = build_partition(e, p.cycle(), rep.rho);
    return {std::move(p), std::move(rep), std::move(e), std::move(part)};
}

CMat basis_projection(Index d, Index k) { return basis_op(d, k, k); }

} // namespace

TEST(Partition, CyclicShiftTwo) {
    auto a = analyze(trivial_base(channels::cyclic_shift(2)));
    ASSERT_EQ(a.partition.order, 2u);
    EXPECT_NEAR(std::abs(a.partition.alpha + 1.0), 0.0, 1e-10);
    EXPECT_LT(op_norm(a.partition.projections[0][0] - basis_projection(2, 0)), 1e-10);
    EXPECT_LT(op_norm(a.partition.projections[1][0] - basis_projection(2, 1)), 1e-10);
    EXPECT_EQ(a.partition.sigma[0], 1);
    EXPECT_EQ(a.partition.xi[0], 0);
    EXPECT_LT(verify_shift_relation(a.process, a.partition), 1e-12);
    Rng rng(1);
    const auto r = verify_partition_theorem(a.process, a.partition, a.report.rho, rng);
    EXPECT_NEAR(r.block_weight, 0.0, 1e-15);
    EXPECT_LT(r.max(), 1e-10);
}

TEST(Partition, KoopmanCosetIsTrivial) {
    const auto p = make_process(FiniteCycleBase::cycle(2), {channels::depolarizing(2, 0.3), channels::depolarizing(2, 0.6)}, {0, 1});
    const auto rep = peripheral_and_gamma(p);
    const auto e = eigentuple(p, rep, -1.0);
    const auto part = build_partition(e, p.cycle(), rep.rho);
    ASSERT_EQ(part.projections.size(), 1u);
    EXPECT_LT(op_norm(part.projections[0][1] - identity(2)), 1e-10);
    EXPECT_EQ(part.sigma[0], 0);
    EXPECT_EQ(part.sigma[1], 0);
    EXPECT_LT(verify_shift_relation(p, part), 1e-12);
}

TEST(Partition, DecoratedTwoPoint) {
    auto a = analyze(decorated_cycle(2, 2, {1, 0}, 21));
    EXPECT_LE(verify_shift_relation(a.process, a.partition), 1e-9);
    Rng rng(2);
    EXPECT_LE(verify_partition_theorem(a.process, a.partition, a.report.rho, rng).max(), 1e-8);
    EXPECT_TRUE(skew_ergodicity(a.partition, a.process.cycle()).ergodic);
}

TEST(Partition, StructureSuite) {
    const std::vector<std::pair<std::size_t, std::vector<long>>> cases{
        {1, {1}}, {3, {1, 1, 1}}, {5, {1, 0, 2, 0, 1}}, {8, {1, 1, 0, 2, 0, 0, 1, 0}}, {4, {0, 0, 1, 0}}};
    std::uint64_t seed = 300;
    for (const auto& [n, shifts] : cases) {
        const Index d = n == 3 ? 2 : 3;
        auto a = analyze(decorated_cycle(n, d, shifts, seed++));
        EXPECT_EQ(static_cast<Index>(a.partition.order), d);
        EXPECT_LE(a.partition.match_distance, 1e-7);
        EXPECT_LE(verify_shift_relation(a.process, a.partition), 1e-8);
        Rng rng(seed);
        const auto r = verify_partition_theorem(a.process, a.partition, a.report.rho, rng);
        EXPECT_LE(r.max(), 1e-8);
        const auto sk = skew_ergodicity(a.partition, a.process.cycle());
        EXPECT_TRUE(sk.ergodic);
        EXPECT_EQ(sk.birkhoff_error, 0.0);
        for (long x : a.partition.xi) EXPECT_TRUE(x == 0 || x == -1);
    }
}

TEST(Partition, NonUnitalBlockSwap) {
    auto a = analyze(block_swap_cycle({true, false, true, true}, 44));
    ASSERT_EQ(a.partition.order, 2u);
    EXPECT_LE(verify_shift_relation(a.process, a.partition), 1e-8);
    Rng rng(4);
    const auto r = verify_partition_theorem(a.process, a.partition, a.report.rho, rng);
    EXPECT_LE(r.max(), 1e-8);
    // unequal ranks with equal weight 1/2
    EXPECT_NE(projection_rank(a.partition.projections[0][0]), projection_rank(a.partition.projections[1][0]));
    EXPECT_GT(op_norm(a.report.rho[0] - identity(3) / 3.0), 1e-3);
}

TEST(Skew, NegativeControlTwoCycles) {
    // sigma == 0 on a two-point base: constructed control, not a theorem instance
    const auto sk = skew_ergodicity(std::vector<long>{0, 0}, 2, FiniteCycleBase::cycle(2));
    EXPECT_FALSE(sk.ergodic);
    EXPECT_EQ(sk.cycle_length, 2u);
}

TEST(StoppingTimes, CyclicShiftEvenTimes) {
    auto a = analyze(trivial_base(channels::cyclic_shift(2)));
    const auto tr = stopping_times(a.partition, a.process.cycle(), 0, 1000);
    ASSERT_EQ(tr.taus.size(), 500u);
    for (std::size_t j = 0; j < tr.taus.size(); ++j) EXPECT_EQ(tr.taus[j], 2 * (j + 1));
    EXPECT_DOUBLE_EQ(tr.density, 0.5);
    const auto avg = cesaro_phase_average(a.tuple, tr, 0);
    EXPECT_LT(std::abs(avg.estimate - 1.0), 1e-12);
    EXPECT_LT(std::abs(avg.expected - 1.0), 1e-12);
}

TEST(StoppingTimes, HorizonTooShort) {
    try {
        stopping_times(std::vector<long>{1}, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::HorizonTooShort);
    }
}

TEST(StoppingTimes, DensityOnDecoratedCycles) {
    auto a = analyze(decorated_cycle(5, 3, {1, 0, 2, 0, 1}, 77));
    const std::size_t cycle = 5 * a.partition.order;
    for (std::size_t w0 = 0; w0 < 5; ++w0) {
        const auto tr = stopping_times(a.partition, a.process.cycle(), w0, 40 * cycle);
        EXPECT_NEAR(tr.density, 1.0 / static_cast<double>(a.partition.order), 1e-15);
        for (std::size_t t : tr.taus) EXPECT_EQ(tr.cumulative[t - 1], 0);
        const auto avg = cesaro_phase_average(a.tuple, tr, w0);
        EXPECT_LT(std::abs(avg.estimate - avg.expected), 1e-9);
    }
}

TEST(Cesaro, CyclicShiftTwo) {
    auto a = analyze(trivial_base(channels::cyclic_shift(2)));
    const auto c = cesaro_projector(a.process, a.partition);
    EXPECT_LE(c.idempotency, 1e-6);
    // psi^2 is the identity on diagonals and kills off-diagonals
    Rng rx(9);
    const CMat x = random_cmat(rx, 2);
    const CMat diag = x.diagonal().asDiagonal();
    EXPECT_LT((c.matrix * vec(x) - vec(diag)).norm(), 1e-10);
    Rng rng(10);
    const auto chk = check_cesaro(c, a.report.rho, rng);
    EXPECT_LT(chk.inner_product, 1e-10);
    EXPECT_LT(chk.unital, 1e-10);
}

TEST(Cesaro, DecoratedAndBlockSwapInstances) {
    std::vector<ProcessInstance> ps;
    ps.push_back(decorated_cycle(5, 3, {1, 0, 2, 0, 1}, 17));
    ps.push_back(decorated_cycle(4, 3, {0, 0, 1, 0}, 18));
    ps.push_back(block_swap_cycle({true, false, true, true}, 44));
    for (auto& p : ps) {
        auto a = analyze(std::move(p));
        const auto c = cesaro_projector(a.process, a.partition, 2000);
        Rng rng(12);
        const auto chk = check_cesaro(c, a.report.rho, rng, 50);
        EXPECT_LE(chk.idempotency, 1e-6);
        EXPECT_LE(chk.commutation, 1e-6);
        EXPECT_GE(chk.positivity, -1e-8);
        EXPECT_LE(chk.inner_product, 1e-6);
        EXPECT_GT(chk.faithfulness_min, 1e-8);
        EXPECT_LE(chk.unital, 1e-8);
    }
}

TEST(Minimality, RankOneIsMinimal) {
    auto a = analyze(trivial_base(channels::cyclic_shift(2)));
    for (const auto& v : minimality_check(a.process, a.partition)) EXPECT_EQ(v.verdict, Minimality::Minimal);
}

TEST(Minimality, IidRankTwoBlocks) {
    const auto p = iid_block_cyclic(4, 2, 3, 55);
    const KrausChannel avg = averaged_channel(p);
    const PFResult pf = ehk_partition(avg);
    ASSERT_TRUE(pf.irreducible);
    ASSERT_EQ(pf.m, 2u);
    for (const auto& part : pf.partition) EXPECT_EQ(projection_rank(part), 2);
    for (const auto& v : minimality_check(avg, pf.partition, 2)) EXPECT_EQ(v.verdict, Minimality::Minimal);
}

TEST(Minimality, ReducibleControlFindsWitness) {
    // constructed control: the flip tensored with the identity, with p_k = |e_k><e_k| (x) I
    const auto ch = channels::tensor_product(channels::cyclic_shift(2), channels::identity(2));
    const std::vector<CMat> parts{Eigen::kroneckerProduct(basis_projection(2, 0), identity(2)).eval(),
                                  Eigen::kroneckerProduct(basis_projection(2, 1), identity(2)).eval()};
    for (const auto& v : minimality_check(ch, parts, 2)) {
        ASSERT_EQ(v.verdict, Minimality::NotMinimal);
        ASSERT_TRUE(v.witness.has_value());
        EXPECT_EQ(projection_rank(*v.witness), 1);
        CMat t = ch.transfer() * ch.transfer();
        const KrausChannel sq = kraus_from_transfer(t);
        EXPECT_TRUE(is_jointly_invariant(sq.kraus(), *v.witness, 1e-8));
    }
}

TEST(Aperiodicity, TrivialBaseExamples) {
    EXPECT_FALSE(aperiodicity_check(trivial_base(channels::depolarizing(2, 0.5)), 8).first_reducible.has_value());
    const auto r = aperiodicity_check(trivial_base(channels::cyclic_shift(2)), 8);
    ASSERT_TRUE(r.first_reducible.has_value());
    EXPECT_EQ(*r.first_reducible, 2u);
}

TEST(Aperiodicity, ComponentsOfPowers) {
    // peripheral spectrum = 4th roots of unity: k = 2 splits into two irreducible
    // components, k = 4 is the first reducible power
    const auto p = decorated_cycle(2, 2, {1, 0}, 21);
    const auto r = aperiodicity_check(p, 8);
    ASSERT_TRUE(r.first_reducible.has_value());
    EXPECT_EQ(*r.first_reducible, 4u);
    const auto q = power_component(p, 3, 0);
    EXPECT_EQ(q.cycle().size(), 2u);
}

TEST(Aperiodicity, IidInstances) {
    EXPECT_FALSE(aperiodicity_check(iid_haar(2, 5, 3), 8).first_reducible.has_value());
    const auto r = aperiodicity_check(iid_decorated_shift(3, 4, 5), 8);
    ASSERT_TRUE(r.first_reducible.has_value());
    EXPECT_EQ(*r.first_reducible, 3u);
}
