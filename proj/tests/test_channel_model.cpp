#include <giclab/channel_model.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace giclab;

TEST(ChannelParams, WeakFlag)
{
	EXPECT_TRUE((ChannelParams{0.25, 0.25, 1, 1}.weak()));
	EXPECT_FALSE((ChannelParams{1.0, 0.25, 1, 1}.weak()));
	EXPECT_NO_THROW((ChannelParams{0, 0, 1, 1}.validate()));
	EXPECT_THROW((ChannelParams{1.5, 0.2, 1, 1}.validate()), PreconditionError);
	EXPECT_NO_THROW((ChannelParams{1.5, 0.2, 1, 1}.validate(true)));
	EXPECT_THROW((ChannelParams{0.2, 0.2, -1, 1}.validate(true)), PreconditionError);
	EXPECT_THROW((ChannelParams{0.2, NAN, 1, 1}.validate(true)), PreconditionError);
}

TEST(PowerSplit, Fractions)
{
	ChannelParams c{0.25, 0.25, 2, 4};
	auto s = PowerSplit::from_fractions(c, 0.25, 0.5);
	EXPECT_EQ(s, (PowerSplit{0.5, 1.5, 2, 2}));
	EXPECT_DOUBLE_EQ(s.t1(c), 0.25);
	EXPECT_DOUBLE_EQ(s.t2(c), 0.5);
	EXPECT_TRUE(s.valid_for(c));
	EXPECT_FALSE((PowerSplit{0.5, 1.0, 2, 2}.valid_for(c)));
	EXPECT_FALSE((PowerSplit{-0.5, 2.5, 2, 2}.valid_for(c)));
}

TEST(Reallocation, FirstStepOfTheCornerTrace)
{
	PowerSplit s{0, 1, 1, 0};
	auto out = apply_reallocation(s, {0, Direction::none, 0.1, Direction::toward_private});
	EXPECT_EQ(out.pu1, 0);
	EXPECT_EQ(out.pv1, 1);
	EXPECT_DOUBLE_EQ(out.pu2, 0.9);
	EXPECT_DOUBLE_EQ(out.pv2, 0.1);
}

TEST(Reallocation, IdentityAndRejection)
{
	PowerSplit s{0.5, 0.5, 0.5, 0.5};
	EXPECT_EQ(apply_reallocation(s, {}), s);
	EXPECT_THROW(apply_reallocation(PowerSplit{0, 1, 1, 0}, {0.2, Direction::toward_private, 0, Direction::none}),
		RejectedMove);
	EXPECT_THROW(apply_reallocation(s, {-0.1, Direction::toward_public, 0, Direction::none}), RejectedMove);
}

TEST(Reallocation, SumsBitIdentical)
{
	std::mt19937_64 rng(1);
	std::uniform_real_distribution<double> u(0, 1);
	for (int i = 0; i < 20000; ++i) {
		ChannelParams c{0.5, 0.5, 0.1 + 10 * u(rng), 0.1 + 10 * u(rng)};
		auto s = PowerSplit::from_fractions(c, u(rng), u(rng));
		Reallocation r{u(rng) * s.pv1, Direction::toward_public, u(rng) * s.pu2, Direction::toward_private};
		PowerSplit e;
		ASSERT_NO_THROW(e = apply_reallocation(s, r));
		ASSERT_EQ(e.pu1 + e.pv1, s.pu1 + s.pv1);
		ASSERT_EQ(e.pu2 + e.pv2, s.pu2 + s.pv2);
		ASSERT_GE(std::min({e.pu1, e.pv1, e.pu2, e.pv2}), 0.0);
	}
}

TEST(StepMetrics, Arithmetic)
{
	RateQuadruple a{0, 1.0, 0.2, 0}, b{0, 0.9, 0.4, 0};
	auto m = step_metrics(a, b);
	EXPECT_NEAR(m.dr1, 0.1, 1e-15);
	EXPECT_NEAR(m.dr2, 0.2, 1e-15);
	EXPECT_NEAR(m.upsilon, 2.0, 1e-12);
	EXPECT_NEAR(m.gamma, std::sqrt(0.05), 1e-15);
	EXPECT_THROW(step_metrics(b, a), NotCounterclockwise);
	RateQuadruple z{0, 1, 0, 0};
	EXPECT_THROW(step_metrics(z, z), NotCounterclockwise);
	EXPECT_FALSE(try_step_metrics(z, z).has_value());
}

TEST(StepMetrics, SwapAlwaysFails)
{
	std::mt19937_64 rng(2);
	std::uniform_real_distribution<double> u(0, 1);
	for (int i = 0; i < 1000; ++i) {
		RateQuadruple s{u(rng), u(rng), u(rng), u(rng)}, e = s;
		e.rv1 -= 0.01 + 0.1 * u(rng);
		e.rv2 += 0.01 + 0.1 * u(rng);
		ASSERT_NO_THROW(step_metrics(s, e));
		ASSERT_THROW(step_metrics(e, s), NotCounterclockwise);
	}
}

TEST(RateQuadruple, Sums)
{
	RateQuadruple r{0.1, 0.2, 0.3, 0.4};
	EXPECT_DOUBLE_EQ(r.r1(), 0.1 + 0.2);
	EXPECT_DOUBLE_EQ(r.r2(), 0.3 + 0.4);
	EXPECT_DOUBLE_EQ(r.weighted(0.5), 0.3 + 0.5 * 0.7);
}
