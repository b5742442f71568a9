#include "eqp/ergodic_base.hpp"
#include "eqp/instances.hpp"

#include <gtest/gtest.h>

using namespace eqp;

TEST(FiniteCycle, SingleCycleDetection) {
    EXPECT_TRUE(FiniteCycleBase::cycle(5).is_single_cycle());
    EXPECT_TRUE(FiniteCycleBase::permutation({2, 0, 1}).is_single_cycle());
    EXPECT_FALSE(FiniteCycleBase::permutation({1, 0, 3, 2}).is_single_cycle());
    EXPECT_THROW(FiniteCycleBase::permutation({0, 0, 1}), Error);
    const auto b = FiniteCycleBase::cycle(4);
    EXPECT_EQ(b.next(3), 0u);
    EXPECT_EQ(b.prev(0), 3u);
    EXPECT_EQ(b.advance(1, 6), 3u);
}

TEST(Koopman, FiniteRootsOfUnity) {
    const auto k = koopman_peripheral(FiniteCycleBase::cycle(6));
    const auto r = k.roots();
    ASSERT_EQ(r.size(), 6u);
    for (std::size_t j = 0; j < 6; ++j) EXPECT_LT(std::abs(std::pow(r[j], 6) - 1.0), 1e-12);
    EXPECT_TRUE(k.member(expi(1.0 / 3.0)));
    EXPECT_FALSE(k.member(expi(0.1)));
}

TEST(Koopman, IidIsTrivial) {
    const auto k = koopman_peripheral(IIDBase{{0.5, 0.5}});
    EXPECT_EQ(k.roots().size(), 1u);
    EXPECT_TRUE(k.member(1.0));
    EXPECT_FALSE(k.member(-1.0));
}

TEST(Koopman, RotationHarmonics) {
    const double t = 0.6180339887;
    const auto k = koopman_peripheral(RotationBase{t});
    EXPECT_TRUE(k.member(expi(3 * t)));
    EXPECT_TRUE(k.member(expi(-7 * t)));
    EXPECT_FALSE(k.member(expi(0.5)));
}

TEST(Koopman, RationalRotationRejected) {
    EXPECT_FALSE(RotationBase{0.25}.passes_guard());
    EXPECT_THROW(koopman_peripheral(RotationBase{0.25}), Error);
    try {
        make_process(RotationBase{0.5}, {channels::dephasing(2), channels::cyclic_shift(2)}, {0, 1}, {0.0, 0.5, 1.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::RationalRotation);
    }
}

TEST(Koopman, Eigenfunction) {
    const auto base = FiniteCycleBase::cycle(4);
    const auto f = koopman_eigenfunction(base, cplx(0.0, 1.0));
    for (std::size_t l = 0; l < 4; ++l) EXPECT_LT(std::abs(f[base.next(l)] - cplx(0.0, 1.0) * f[l]), 1e-12);
    EXPECT_LT(std::abs(f[0] - 1.0), 1e-15);
    try {
        koopman_eigenfunction(base, expi(0.1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotAnEigenvalue);
    }
}

TEST(Process, Validation) {
    EXPECT_THROW(make_process(FiniteCycleBase::cycle(2), {channels::identity(2)}, {0}), Error);
    EXPECT_THROW(make_process(FiniteCycleBase::cycle(2), {channels::identity(2), channels::identity(3)}, {0, 1}), Error);
    EXPECT_THROW(make_process(IIDBase{{0.3, 0.3}}, {channels::identity(2), channels::identity(2)}, {}), Error);
    const KrausChannel bad(std::vector<CMat>{2.0 * identity(2)});
    EXPECT_THROW(make_process(FiniteCycleBase::cycle(1), {bad}, {0}), Error);
    const auto p = make_process(IIDBase{{0.5, 0.5}}, {channels::identity(2), channels::cyclic_shift(2)}, {});
    EXPECT_TRUE(p.is_iid());
    EXPECT_EQ(p.assignment.size(), 2u);
}

TEST(Rotation, DoubleDoubleOrbit) {
    const double t = 0.6180339887, s0 = 0.123456789;
    for (std::uint64_t j : {1ull, 1000ull, 100000ull, 10000000ull}) {
        const long double exact = static_cast<long double>(s0) + static_cast<long double>(j) * static_cast<long double>(t);
        const long double frac = exact - std::floor(exact);
        EXPECT_NEAR(rotation_point(s0, t, j), static_cast<double>(frac), 1e-12);
    }
}

TEST(Rotation, IntervalLookup) {
    const auto p = quasiperiodic_process(0.6180339887);
    EXPECT_EQ(p.interval_of(0.0), 0u);
    EXPECT_EQ(p.interval_of(0.5), 0u);
    EXPECT_EQ(p.interval_of(0.7), 1u);
    EXPECT_EQ(p.channel_at_rotation(0.9).size(), 2u);
}

TEST(Orbit, FiniteAndIidDeterminism) {
    const auto cyc = decorated_cycle(3, 2, {1, 0, 0}, 7);
    const auto o = orbit(cyc, 1.0, 5);
    ASSERT_EQ(o.size(), 5u);
    EXPECT_EQ(o[0].point, 2.0);
    EXPECT_EQ(o[1].point, 0.0);
    const auto iid = iid_decorated_shift(3, 4, 11);
    const auto a = orbit(iid, 0.0, 200, 99), b = orbit(iid, 0.0, 200, 99), c = orbit(iid, 0.0, 200, 100);
    bool differ = false;
    for (std::size_t j = 0; j < 200; ++j) {
        EXPECT_EQ(a[j].channel, b[j].channel);
        differ = differ || a[j].channel != c[j].channel;
    }
    EXPECT_TRUE(differ);
}
