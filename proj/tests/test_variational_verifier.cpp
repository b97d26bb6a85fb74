#include <giclab/variational_verifier.hpp>

#include <gtest/gtest.h>

using namespace giclab;

namespace {
const ChannelParams ref{0.25, 0.25, 1, 1};
const PowerSplit mid{0.3, 0.7, 0.4, 0.6};

struct Fixture {
	Grid g = variational_grid(ref, mid, 1024, 10);
	CoreSet cores = gaussian_cores(g, mid);
};
} // namespace

TEST(Perturbation, ProjectionKillsLowMoments)
{
	Fixture fx;
	std::mt19937_64 rng(4);
	for (int m = 0; m < 4; ++m) {
		auto h = random_perturbation(fx.cores[m], rng);
		EXPECT_TRUE(h.admissible(1e-10)) << m;
		EXPECT_NEAR(h.eps_max(fx.cores[m]), 1, 1e-12);
		auto hi = fx.cores[m].perturbed(h.h, 0.999);
		EXPECT_NO_THROW(fx.cores[m].perturbed(h.h, -0.999));
		EXPECT_NEAR(hi.variance(), fx.cores[m].variance(), 1e-9);
	}
}

TEST(Perturbation, PointMassCannotBePerturbed)
{
	auto g = Grid::make(5, 101);
	EXPECT_THROW(project_perturbation(GridDensity::gaussian(g, 0), std::vector<double>(g.n, 1.0)),
		PreconditionError);
}

TEST(CompoundEngine, GaussianMutualInformation)
{
	Fixture fx;
	CompoundEngine e(ref, fx.cores);
	std::vector<MiTerm> terms{{Receiver::Y1, {U1, V1}, {}}, {Receiver::Y2, {U2}, {U1}},
		{Receiver::Y2, {U1}, {U2}}, {Receiver::Y1, {U1, U2}, {}}, {Receiver::Y1, {V1}, {U1, U2}}};
	for (auto& t : terms) {
		double got = evaluate_functional(mi_functional(t), e);
		EXPECT_NEAR(got, ln2 * gaussian_mi(ref, mid, t.rx, t.signal, t.given), 1e-8) << t.str();
	}
}

TEST(CompoundEngine, CompoundDensityIsGaussian)
{
	Fixture fx;
	CompoundEngine e(ref, fx.cores);
	auto& v = e.compound(Receiver::Y2, {U1, V1, U2});
	GridDensity d(fx.g, v);
	EXPECT_NEAR(d.mass(), 1, 1e-12);
	EXPECT_NEAR(d.variance(), 1 + ref.a * 1.0 + 0.4, 1e-9);
}

TEST(CompoundMatrix, FullRankForPositiveGains)
{
	auto m = core_compound_matrix(ref, CodingStrategy::sd_at_y2);
	EXPECT_GT(std::abs(m.det), 1e-6);
	EXPECT_GT(std::abs(core_compound_matrix(ref, CodingStrategy::mirror).det), 1e-6);
	EXPECT_THROW(core_compound_matrix({0, 0.3, 1, 1}, CodingStrategy::sd_at_y2), SingularForZeroGain);
	EXPECT_THROW(core_compound_matrix({0.3, 0, 1, 1}, CodingStrategy::mirror), SingularForZeroGain);
}

TEST(FirstVariation, GaussianIsStationary)
{
	Fixture fx;
	CompoundEngine e(ref, fx.cores);
	std::mt19937_64 rng(8);
	auto start = strategy_rates(ref, PowerSplit::from_fractions(ref, 0.2, 0.5), CodingStrategy::sd_at_y2);
	std::vector<FunctionalSpec> specs{entropy_functional(U2), mi_functional({Receiver::Y2, {U1}, {U2}}),
		rate_functional(Functional::DeltaR2, ref, start, mid, CodingStrategy::sd_at_y2)};
	for (auto& s : specs)
		for (int m = 0; m < 4; ++m) {
			auto h = random_perturbation(fx.cores[m], rng);
			auto v = first_variation(s, e, m, h);
			EXPECT_LT(std::abs(v.derivative), 1e-5) << functional_name(s.kind) << " core " << m;
			EXPECT_LT(std::abs(v.analytic), 1e-6) << functional_name(s.kind) << " core " << m;
		}
}

TEST(SecondVariation, EntropyIsConcaveAndMatchesClosedForm)
{
	Fixture fx;
	CompoundEngine e(ref, fx.cores);
	std::mt19937_64 rng(9);
	for (int m = 0; m < 4; ++m) {
		auto h = random_perturbation(fx.cores[m], rng);
		auto v = second_variation(entropy_functional(m), e, m, h);
		// -int h^2 / f dx, straight from the samples
		double want = 0;
		for (int i = 0; i < fx.g.n; ++i)
			if (fx.cores[m][i] > 0)
				want -= h.h[i] * h.h[i] / fx.cores[m][i];
		want *= fx.g.dx();
		EXPECT_LT(v.estimate, 0);
		EXPECT_NEAR(v.analytic, want, 1e-9 * std::abs(want));
		EXPECT_NEAR(v.estimate, want, 0.05 * std::abs(want));
	}
}

TEST(SecondVariation, TooLargeStepIsRejected)
{
	Fixture fx;
	std::mt19937_64 rng(2);
	auto h = random_perturbation(fx.cores[U1], rng);
	EXPECT_THROW(second_variation(entropy_functional(U1), fx.cores, ref, U1, h, 1.5), NegativeDensity);
}

TEST(ScaledPair, FiniteDifferenceMatchesClosedForm)
{
	auto g = Grid::make(14, 1024);
	auto f1 = GridDensity::gaussian(g, 1.0), f2 = GridDensity::gaussian(g, 2.0);
	std::mt19937_64 rng(12);
	auto h = random_perturbation(f2, rng);
	for (double gamma : {0.3, 0.8}) {
		auto v = scaled_pair_second_variation(f1, f2, gamma, h);
		EXPECT_NEAR(v.estimate, v.analytic, 0.05 * std::abs(v.analytic) + 1e-9) << gamma;
	}
}
