#include <giclab/boundary_tracer.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace giclab;

namespace {
const ChannelParams ref{0.25, 0.25, 1, 1};

std::vector<double> linspace(double a, double b, int n)
{
	std::vector<double> v(n);
	for (int i = 0; i < n; ++i)
		v[i] = a + (b - a) * i / (n - 1);
	return v;
}

BoundarySample corner_sample(const ChannelParams& c)
{
	auto k = corner_max_r1(c);
	return {0, k.split, k.rates, std::nullopt, CodingStrategy::corner_start};
}
} // namespace

TEST(OptimizeSplit, SmallMuIsNearTheCorner)
{
	auto o = optimize_split(ref, 1e-4);
	auto k = corner_max_r1(ref);
	EXPECT_NEAR(o.rates.r1(), k.rates.r1(), 1e-4);
	EXPECT_NEAR(o.rates.r1(), 0.5, 1e-4);
}

TEST(OptimizeSplit, NoInterferenceIsAllPrivate)
{
	ChannelParams c{0, 0, 2, 3};
	for (double mu : {0.3, 2.0}) {
		auto o = optimize_split(c, mu);
		EXPECT_NEAR(o.rates.r1(), cap(2, 1), 1e-12);
		EXPECT_NEAR(o.rates.r2(), cap(3, 1), 1e-12);
	}
}

TEST(OptimizeSplit, ContinuousAcrossUnitWeight)
{
	auto lo = optimize_split(ref, 0.999), hi = optimize_split(ref, 1.001);
	EXPECT_NEAR(lo.rates.r1() + lo.rates.r2(), hi.rates.r1() + hi.rates.r2(), 1e-4);
}

TEST(OptimizeSplit, BeatsEveryGridPoint)
{
	for (double mu : {0.2, 0.6, 1.5}) {
		auto o = optimize_split(ref, mu);
		auto st = strategy_for_mu(mu);
		for (double t1 : linspace(0, 1, 41))
			for (double t2 : linspace(0, 1, 41))
				ASSERT_GE(o.objective + 1e-12,
					strategy_rates(ref, PowerSplit::from_fractions(ref, t1, t2), st).weighted(mu));
	}
}

TEST(SweepBoundary, ObjectiveIsMaximalAcrossSamples)
{
	auto grid = linspace(0.1, 0.9, 9);
	auto s = sweep_boundary(ref, grid);
	ASSERT_EQ(s.size(), grid.size());
	for (auto& x : s)
		for (auto& y : s)
			EXPECT_GE(x.rates.weighted(x.mu) + 1e-9, y.rates.weighted(x.mu));
	EXPECT_FALSE(s[0].metrics);
}

TEST(SweepBoundary, RejectsBadInput)
{
	EXPECT_THROW(sweep_boundary(ref, {0.5, 0.4}), PreconditionError);
	EXPECT_THROW(sweep_boundary(ref, {0.0, 0.4}), PreconditionError);
	EXPECT_THROW(sweep_boundary(ref, {0.5}, 8), PreconditionError);
}

TEST(StepCandidates, UserTwoOnlyWhenUserOneIsFrozen)
{
	auto set = step_candidates(ref, corner_sample(ref), 0, 0.05);
	EXPECT_EQ(set.pareto.move.dp1, 0);
	EXPECT_GT(set.pareto.move.dp2, 0);
	for (auto& k : set.candidates) {
		EXPECT_EQ(k.move.dir1, Direction::none);
		EXPECT_GT(k.metrics.dr1, 0);
		EXPECT_GT(k.metrics.dr2, 0);
	}
}

TEST(StepCandidates, EmptyWhenNothingMoves)
{
	EXPECT_THROW(step_candidates(ref, corner_sample(ref), 0, 0), EmptyCandidateSet);
}

TEST(StepCandidates, PickHasMinimalSlope)
{
	auto set = step_candidates(ref, corner_sample(ref), 0.05, 0.05);
	for (auto& k : set.candidates)
		EXPECT_GE(k.metrics.upsilon + 1e-10, set.pareto.metrics.upsilon);
}

TEST(TraceIncremental, FirstStepClosedForm)
{
	auto tr = trace_incremental(ref, 1, {0.05});
	ASSERT_EQ(tr.samples.size(), 2u);
	auto& r = tr.samples[1].rates;
	double r1 = 0.5 * std::log2(1 + 1 / (1 + 0.25 * 0.05));
	double r2 = 0.5 * std::log2(1 + 0.25 * 0.95 / (2 + 0.25 * 0.05)) + 0.5 * std::log2(1 + 0.05 / 1.25);
	EXPECT_NEAR(r.r1(), r1, 1e-12);
	EXPECT_NEAR(r.r2(), r2, 1e-9);
	ASSERT_TRUE(tr.samples[1].metrics);
	EXPECT_GT(tr.samples[1].metrics->upsilon, 1);
}

TEST(TraceIncremental, RejectsEmptySchedule)
{
	EXPECT_THROW(trace_incremental(ref, 1, {}), PreconditionError);
	EXPECT_THROW(trace_incremental(ref, 0, {0.05}), PreconditionError);
}

TEST(TraceEqualSteps, NoInterferenceHasNoSegments)
{
	auto tr = trace_equal_steps(ChannelParams{0, 0, 1, 1}, 0.01, 20);
	EXPECT_EQ(tr.switches, 0);
}

TEST(TraceEqualSteps, SegmentsAreMonotone)
{
	auto tr = trace_equal_steps(ref, 0.01, 40);
	ASSERT_GT(tr.samples.size(), 3u);
	auto starts = tr.segment_starts;
	starts.push_back(tr.samples.size());
	for (size_t k = 0; k + 1 < starts.size(); ++k) {
		std::vector<BoundarySample> seg(tr.samples.begin() + starts[k], tr.samples.begin() + starts[k + 1]);
		auto m = check_monotonicity(seg);
		EXPECT_TRUE(m.ok()) << "segment " << k;
	}
	for (size_t i = 1; i < tr.samples.size(); ++i) {
		EXPECT_LT(tr.samples[i].rates.r1(), tr.samples[i - 1].rates.r1());
		EXPECT_GT(tr.samples[i].rates.r2(), tr.samples[i - 1].rates.r2());
		EXPECT_GE(tr.samples[i].metrics->upsilon, 1.0);
	}
}

TEST(CheckMonotonicity, FlagsAConvexKink)
{
	auto mk = [](double r1, double r2) {
		BoundarySample s;
		s.rates = {0, r1, 0, r2};
		return s;
	};
	// chord slopes from the first point: 1, then 3
	std::vector<BoundarySample> seg{mk(1, 0), mk(0.9, 0.1), mk(0.8, 0.6)};
	auto m = check_monotonicity(seg);
	EXPECT_EQ(m.upsilon_violations, 1);
	EXPECT_EQ(m.steps, 2);
	EXPECT_TRUE(check_monotonicity({mk(1, 0), mk(0.9, 0.3), mk(0.8, 0.5)}).ok());
}

TEST(ScaledMoves, EndPointsAndGrid)
{
	auto tr = trace_incremental(ref, 1, {0.05});
	auto rep = verify_theorem10(ref, tr.samples[0], tr.samples[1], linspace(0, 1, 64));
	EXPECT_EQ(rep.gamma.front(), 0);
	EXPECT_EQ(rep.dr1.front(), 0);
	EXPECT_TRUE(rep.identity_at_one);
	EXPECT_EQ(rep.violations(), 0);
}

TEST(ScaledMoves, RandomSegments)
{
	std::mt19937_64 rng(23);
	std::uniform_real_distribution<double> u(0.05, 0.95);
	for (int i = 0; i < 10; ++i) {
		ChannelParams c{u(rng), u(rng), 0.5 + 5 * u(rng), 0.5 + 5 * u(rng)};
		auto tr = trace_incremental(c, 1, {0.05 * c.p2});
		if (tr.samples.size() < 2)
			continue;
		auto rep = verify_theorem10(c, tr.samples[0], tr.samples[1], linspace(0, 1, 17));
		EXPECT_TRUE(rep.identity_at_one);
		EXPECT_EQ(rep.gamma_violations, 0);
	}
}
