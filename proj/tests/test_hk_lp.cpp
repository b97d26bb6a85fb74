#include <giclab/hk_lp.hpp>
#include <giclab/optimize.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace giclab;

namespace {
// max w'x over {A x <= b, x >= 0} by enumerating every vertex of the 4-d polytope
double vertex_oracle(const HkConstraintSet& cs, const std::array<double, 4>& w)
{
	std::vector<std::array<double, 4>> A;
	std::vector<double> b;
	for (auto& r : cs.rows) {
		A.push_back(r.coef);
		b.push_back(r.rhs);
	}
	for (int j = 0; j < 4; ++j) {
		std::array<double, 4> e{};
		e[j] = -1;
		A.push_back(e);
		b.push_back(0);
	}
	int m = int(A.size());
	double best = -INFINITY;
	for (int i0 = 0; i0 < m; ++i0)
		for (int i1 = i0 + 1; i1 < m; ++i1)
			for (int i2 = i1 + 1; i2 < m; ++i2)
				for (int i3 = i2 + 1; i3 < m; ++i3) {
					int id[4] = {i0, i1, i2, i3};
					double M[4][5];
					for (int r = 0; r < 4; ++r) {
						for (int c = 0; c < 4; ++c)
							M[r][c] = A[id[r]][c];
						M[r][4] = b[id[r]];
					}
					bool singular = false;
					for (int c = 0; c < 4 && !singular; ++c) {
						int p = c;
						for (int r = c + 1; r < 4; ++r)
							if (std::abs(M[r][c]) > std::abs(M[p][c]))
								p = r;
						if (std::abs(M[p][c]) < 1e-12) {
							singular = true;
							break;
						}
						std::swap(M[p], M[c]);
						for (int r = 0; r < 4; ++r)
							if (r != c) {
								double q = M[r][c] / M[c][c];
								for (int k = c; k < 5; ++k)
									M[r][k] -= q * M[c][k];
							}
					}
					if (singular)
						continue;
					double x[4];
					for (int r = 0; r < 4; ++r)
						x[r] = M[r][4] / M[r][r];
					bool feas = true;
					for (int r = 0; r < m && feas; ++r) {
						double s = 0;
						for (int c = 0; c < 4; ++c)
							s += A[r][c] * x[c];
						feas = s <= b[r] + 1e-10;
					}
					if (feas)
						best = std::max(best, w[0] * x[0] + w[1] * x[1] + w[2] * x[2] + w[3] * x[3]);
				}
	return best;
}
} // namespace

TEST(HkConstraints, DecoupledHk7)
{
	ChannelParams c{0, 0, 1, 1};
	auto cs = build_hk_constraints(c, {1, 0, 1, 0});
	ASSERT_EQ(cs.rows.size(), 14u);
	EXPECT_EQ(cs.rows[6].label, "HK7");
	EXPECT_DOUBLE_EQ(cs.rows[6].rhs, 0.5);
}

TEST(HkConstraints, Hk2AtSymmetricSplit)
{
	ChannelParams c{0.25, 0.25, 1, 1};
	auto cs = build_hk_constraints(c, {0.5, 0.5, 0.5, 0.5});
	// I(U1;Y2|U2,V2): signal 0.25*0.5 over noise 0.25*0.5 + 1
	EXPECT_NEAR(cs.rows[1].rhs, 0.5 * std::log2(1 + 0.125 / 1.125), 1e-15);
	EXPECT_NEAR(cs.rows[1].rhs, 0.0760, 5e-5);
}

TEST(HkConstraints, Hk13Decomposes)
{
	std::mt19937_64 rng(7);
	std::uniform_real_distribution<double> u(0, 1);
	for (int i = 0; i < 200; ++i) {
		ChannelParams c{u(rng), u(rng), 10 * u(rng), 10 * u(rng)};
		auto s = PowerSplit::from_fractions(c, u(rng), u(rng));
		auto cs = build_hk_constraints(c, s);
		double rhs = gaussian_mi(c, s, Receiver::Y1, {U1, U2}, {}) + gaussian_mi(c, s, Receiver::Y1, {V1}, {U1, U2});
		ASSERT_NEAR(cs.rows[12].rhs, rhs, 1e-12);
		for (auto& r : cs.rows)
			ASSERT_GE(r.rhs, 0);
	}
}

TEST(SolveHkLp, ZeroRegion)
{
	HkConstraintSet cs = build_hk_constraints({0.2, 0.2, 0, 0}, {0, 0, 0, 0});
	auto sol = solve_hk_lp(cs, 0.5);
	EXPECT_EQ(sol.status, LpStatus::optimal);
	EXPECT_EQ(sol.objective, 0);
	EXPECT_EQ(sol.rates.r1() + sol.rates.r2(), 0);
}

TEST(SolveHkLp, Decoupled)
{
	auto sol = solve_hk_lp(build_hk_constraints({0, 0, 1, 1}, {0, 1, 0, 1}), 1.0);
	EXPECT_NEAR(sol.objective, 1.0, 1e-12);
}

TEST(SolveHkLp, MatchesVertexEnumeration)
{
	std::mt19937_64 rng(8);
	std::uniform_real_distribution<double> u(0, 1);
	for (int i = 0; i < 300; ++i) {
		ChannelParams c{0.95 * u(rng), 0.95 * u(rng), 0.1 + 10 * u(rng), 0.1 + 10 * u(rng)};
		auto s = PowerSplit::from_fractions(c, u(rng), u(rng));
		double mu = 0.05 + 2 * u(rng);
		auto cs = build_hk_constraints(c, s);
		auto sol = solve_hk_lp(cs, mu);
		ASSERT_EQ(sol.status, LpStatus::optimal);
		ASSERT_NEAR(sol.objective, vertex_oracle(cs, {1, mu, 1, mu}), 1e-9);
		ASSERT_NEAR(sol.objective, sol.rates.weighted(mu), 1e-9);
		ASSERT_NEAR(sol.objective, sol.dual_objective, 1e-9);
		ASSERT_GE(sol.active_set.size(), 4u);
	}
}

TEST(SolveHkLp, FlatOptimumPicksSmallestVertex)
{
	// equal gains, all public, mu = 1: the sum-rate face is an edge
	ChannelParams c{1, 1, 1, 1};
	auto sol = solve_hk_lp(build_hk_constraints(c, {1, 0, 1, 0}), 1.0);
	EXPECT_TRUE(sol.degenerate);
	EXPECT_NEAR(sol.objective, 0.5 * std::log2(3.0), 1e-12);
	EXPECT_NEAR(sol.rates.ru1, 0.5 * std::log2(3.0) - 0.5, 1e-9);
	EXPECT_NEAR(sol.rates.ru2, 0.5, 1e-9);
}

TEST(ReducedRegion, CornerAndDecoupled)
{
	ChannelParams c{0.25, 0.25, 1, 1};
	auto corner = corner_max_r1(c);
	auto r = reduced_region_value(c, corner.split, 0.5);
	EXPECT_EQ(r.rates.ru1, corner.rates.ru1);
	EXPECT_EQ(r.rates.rv1, corner.rates.rv1);
	EXPECT_DOUBLE_EQ(r.rates.ru2, corner.rates.ru2);
	EXPECT_EQ(r.rates.rv2, corner.rates.rv2);
	ChannelParams d{0, 0, 3, 1};
	auto z = reduced_region_value(d, {0, 3, 0, 1}, 0.4);
	EXPECT_NEAR(z.objective, cap(3, 1) + 0.4 * cap(1, 1), 1e-15);
}

TEST(ReducedRegion, NeverExceedsFullLp)
{
	std::mt19937_64 rng(9);
	std::uniform_real_distribution<double> u(0, 1);
	for (int i = 0; i < 1000; ++i) {
		ChannelParams c{0.95 * u(rng), 0.95 * u(rng), 0.1 + 10 * u(rng), 0.1 + 10 * u(rng)};
		auto s = PowerSplit::from_fractions(c, u(rng), u(rng));
		double mu = 0.05 + 1.9 * u(rng);
		auto rep = verify_reduction_chain(c, s, mu);
		ASSERT_TRUE(rep.all_hold()) << i;
		ASSERT_LE(rep.reduced_value, rep.full_value + 1e-9);
	}
}

TEST(ReductionChain, TightWithoutPrivatePower)
{
	ChannelParams c{0.3, 0.4, 2, 2};
	auto rep = verify_reduction_chain(c, {2, 0, 1, 1}, 0.5);
	EXPECT_EQ(rep.checks[0].lhs, rep.checks[0].rhs);
}

TEST(ReductionChain, ReferenceInstanceOptimaAgree)
{
	// at a = b = 0.25, P = 1 the reduced and full maxima over splits coincide
	ChannelParams c{0.25, 0.25, 1, 1};
	for (double mu : {0.3, 0.5, 0.8}) {
		auto red = maximize_box<2>(
			[&](const std::array<double, 2>& t) {
				return reduced_region_value(c, PowerSplit::from_fractions(c, t[0], t[1]), mu).objective;
			},
			{0, 0}, {1, 1});
		auto full = maximize_box<2>(
			[&](const std::array<double, 2>& t) {
				return solve_hk_lp(build_hk_constraints(c, PowerSplit::from_fractions(c, t[0], t[1])), mu).objective;
			},
			{0, 0}, {1, 1});
		EXPECT_NEAR(red.value, full.value, 1e-6) << mu;
	}
}
