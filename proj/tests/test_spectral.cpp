#include <giclab/spectral.hpp>

#include <gtest/gtest.h>

using namespace giclab;

TEST(Grid, OddPointCountAndSymmetry)
{
	auto g = Grid::make(10, 2048);
	EXPECT_EQ(g.n, 2049);
	EXPECT_EQ(g.x(g.centre()), 0);
	EXPECT_DOUBLE_EQ(g.x(0), -10);
	EXPECT_DOUBLE_EQ(g.x(g.n - 1), 10);
	EXPECT_THROW(Grid::make(0, 100), PreconditionError);
	EXPECT_THROW(Grid::make(1, 2), PreconditionError);
}

TEST(GridDensity, GaussianMomentsAndEntropy)
{
	auto g = Grid::make(20, 2048);
	for (double var : {0.5, 1.0, 3.0}) {
		auto f = GridDensity::gaussian(g, var, 0.7);
		EXPECT_NEAR(f.mass(), 1, 1e-13);
		EXPECT_NEAR(f.mean(), 0.7, 1e-12);
		EXPECT_NEAR(f.variance(), var, 1e-10);
		EXPECT_NEAR(differential_entropy(f), gaussian_entropy_nats(var), 1e-8);
	}
}

TEST(GridDensity, UniformCellAverages)
{
	auto g = Grid::make(5, 1001);
	auto f = GridDensity::uniform(g, -1, 2);
	EXPECT_NEAR(f.mass(), 1, 1e-12);
	EXPECT_NEAR(f.mean(), 0.5, 1e-12);
	EXPECT_NEAR(differential_entropy(f), std::log(3.0), 1e-2);
	EXPECT_THROW(GridDensity::uniform(g, 1, 1), PreconditionError);
}

TEST(GridDensity, Errors)
{
	auto g = Grid::make(5, 101);
	EXPECT_THROW(GridDensity(g, std::vector<double>(100)), PreconditionError);
	EXPECT_THROW(GridDensity::gaussian(g, -1), PreconditionError);
	EXPECT_THROW(GridDensity::gaussian(g, 0, 50), PreconditionError);
	auto f = GridDensity::gaussian(g, 1);
	std::vector<double> h(g.n, -1.0);
	EXPECT_THROW(f.perturbed(h, 1), NegativeDensity);
	EXPECT_THROW(GridDensity(g, std::vector<double>(g.n, 0.0)).normalized(), PreconditionError);
}

TEST(Convolve, GaussiansAddVariances)
{
	auto g = Grid::make(30, 4096);
	auto r = convolve(GridDensity::gaussian(g, 1.5, 1), GridDensity::gaussian(g, 2.5, -2));
	auto want = GridDensity::gaussian(g, 4, -1);
	double worst = 0;
	for (int i = 0; i < g.n; ++i)
		worst = std::max(worst, std::abs(r.density[i] - want[i]));
	EXPECT_LT(worst, 1e-12);
	EXPECT_LT(std::abs(r.lost_mass), 1e-12);
}

TEST(Convolve, UniformsGiveATriangle)
{
	auto g = Grid::make(4, 801);
	auto r = convolve(GridDensity::uniform(g, -1, 1), GridDensity::uniform(g, -1, 1)).density;
	// triangle on [-2, 2], peak 1/2; cell averaging blurs the kinks
	for (double x : {-1.5, -0.5, 0.25, 1.0, 1.75}) {
		int i = g.centre() + int(std::lround(x / g.dx()));
		EXPECT_NEAR(r[i], (2 - std::abs(g.x(i))) / 4, 1e-3) << x;
	}
}

TEST(Convolve, ReportsMassAtTheEdge)
{
	auto g = Grid::make(5, 513);
	auto f = GridDensity::gaussian(g, 4);
	EXPECT_THROW(convolve(f, f), MassLoss);
	EXPECT_THROW(convolve(f, GridDensity::gaussian(Grid::make(6, 513), 1)), PreconditionError);
}

TEST(ScaleDensity, GaussianGain)
{
	auto g = Grid::make(25, 2048);
	auto f = GridDensity::gaussian(g, 2);
	for (double gain : {0.04, 0.3, 1.0, 2.5}) {
		auto s = scale_density(f, gain);
		auto want = GridDensity::gaussian(g, 2 * gain);
		double worst = 0;
		for (int i = 0; i < g.n; ++i)
			worst = std::max(worst, std::abs(s[i] - want[i]));
		EXPECT_LT(worst, 1e-10) << gain;
	}
	EXPECT_THROW(scale_density(f, 0), PreconditionError);
}

TEST(EntropyAudit, ClipsNegativeRoundOff)
{
	std::vector<double> v{0.5, -1e-310, 0.5, 0};
	auto a = entropy_audit(v, 1);
	EXPECT_NEAR(a.nats, std::log(2.0), 1e-15);
	EXPECT_GT(a.clipped, 0);
}
