#include <giclab/timeshare_envelope.hpp>

#include <gtest/gtest.h>

using namespace giclab;

namespace {
const ChannelParams ref{0.25, 0.25, 1, 1};
}

TEST(TwoPhase, SingleUserWhenOtherIsSilent)
{
	ChannelParams c{0.3, 0.4, 2, 0};
	auto e = two_phase_optimize(c, 0.7, SingleUser::automatic);
	EXPECT_EQ(e.phase2_user, 1);
	EXPECT_EQ(e.r1, cap(2, 1));
	EXPECT_EQ(e.r2, 0);
	ASSERT_EQ(e.plan.phases.size(), 1u);
	EXPECT_TRUE(e.plan.conserves(c));
}

TEST(TwoPhase, NoInterferenceNeedsOnePhase)
{
	ChannelParams c{0, 0, 1.5, 3};
	double mu = 0.6;
	auto e = two_phase_optimize(c, mu, SingleUser::automatic);
	EXPECT_NEAR(e.objective, cap(1.5, 1) + mu * cap(3, 1), 1e-9);
}

TEST(TwoPhase, AtLeastTheSinglePhaseValue)
{
	for (double mu : {0.2, 0.5, 0.9, 1.6}) {
		auto e = two_phase_optimize(ref, mu, SingleUser::automatic);
		double single = two_user_value(ref, ref.p1, ref.p2, mu).objective;
		EXPECT_GE(e.objective, single - 1e-10) << mu;
		EXPECT_TRUE(e.plan.conserves(ref)) << mu;
		EXPECT_NEAR(e.objective, e.r1 + mu * e.r2, 1e-12);
	}
}

TEST(TwoPhase, RestrictedUserIsHonoured)
{
	ChannelParams c{0.6, 0.6, 4, 4};
	for (auto [who, id] : {std::pair{SingleUser::user1, 1}, std::pair{SingleUser::user2, 2}}) {
		auto e = two_phase_optimize(c, 0.5, who);
		EXPECT_TRUE(e.phase2_user == 0 || e.phase2_user == id);
		EXPECT_TRUE(e.plan.conserves(c));
	}
}

TEST(TwoPhase, RejectsNonPositiveWeight)
{
	EXPECT_THROW(two_phase_optimize(ref, 0, SingleUser::automatic), PreconditionError);
}

TEST(TwoPhase, ScheduleOracle)
{
	// brute-force over the phase length and the solo user's energy share
	ChannelParams c{0.5, 0.5, 3, 3};
	double mu = 0.4;
	auto e = two_phase_optimize(c, mu, SingleUser::automatic);
	double best = -1;
	for (int solo : {1, 2})
		for (int i = 1; i <= 12; ++i)
			for (int j = 0; j <= 12; ++j) {
				double w = i / 12.0, f = j / 12.0;
				double e1 = solo == 1 ? f * c.p1 : c.p1, e2 = solo == 2 ? f * c.p2 : c.p2;
				double v = w * two_user_value(c, e1 / w, e2 / w, mu).objective;
				double rest = (1 - f) * (solo == 1 ? c.p1 : c.p2);
				if (w < 1)
					v += (solo == 1 ? 1 : mu) * (1 - w) * 0.5 * std::log2(1 + rest / (1 - w));
				best = std::max(best, v);
			}
	EXPECT_GE(e.objective, best - 1e-9);
	EXPECT_LE(e.objective, best + 1e-2);
}

TEST(EnvelopeSweep, SupportPropertyAndConservation)
{
	std::vector<double> mu{0.2, 0.4, 0.6, 0.8, 1.2, 2.0};
	auto env = envelope_sweep(ref, mu);
	ASSERT_EQ(env.size(), mu.size());
	for (auto& x : env) {
		EXPECT_TRUE(x.plan.conserves(ref));
		for (auto& y : env)
			EXPECT_GE(x.objective + 1e-8, y.r1 + x.mu * y.r2);
	}
	for (size_t i = 1; i < env.size(); ++i) {
		EXPECT_LE(env[i].r1, env[i - 1].r1 + 1e-8);
		EXPECT_GE(env[i].r2, env[i - 1].r2 - 1e-8);
	}
}

TEST(EnvelopeSweep, RequiresAscendingGrid)
{
	EXPECT_THROW(envelope_sweep(ref, {0.5, 0.3}), PreconditionError);
}

TEST(ThreePhase, DegenerateCasesAreExact)
{
	for (ChannelParams c : {ChannelParams{0, 0, 1, 2}, ChannelParams{0.3, 0.3, 0, 2}, ChannelParams{0.3, 0.3, 2, 0}}) {
		auto r = three_phase_check(c, 0.5);
		EXPECT_TRUE(r.degenerate);
		EXPECT_EQ(r.improvement, 0);
	}
}

TEST(ThreePhase, NoGainOverTwoPhases)
{
	ChannelParams c{0.7, 0.7, 5, 5};
	auto r = three_phase_check(c, 0.5, 12);
	EXPECT_FALSE(r.degenerate);
	EXPECT_LE(r.improvement, 1e-6);
	EXPECT_NEAR(r.tau0 + r.tau1 + r.tau2, 1, 1e-12);
}

TEST(MergeCheck, SplittingTheSharedPhaseDoesNotHelp)
{
	for (double mu : {0.3, 0.8}) {
		auto e = two_phase_optimize(ref, mu, SingleUser::automatic);
		auto m = merge_check(ref, e, 3);
		EXPECT_GT(m.trials, 0);
		EXPECT_LE(m.best_gain, 1e-8);
	}
}
