#pragma once

#include "boundary_tracer.hpp"
#include "variational_verifier.hpp"

#include <random>

namespace giclab {

enum class LawKind { Gaussian, Uniform, Laplace, Bimodal };

inline const char* law_name(LawKind k)
{
	switch (k) {
	case LawKind::Gaussian: return "gaussian";
	case LawKind::Uniform: return "uniform";
	case LawKind::Laplace: return "laplace";
	case LawKind::Bimodal: return "bimodal";
	}
	return "?";
}

// Zero-mean law with second moment `var`. Bimodal: 0.5 N(-m, s^2) + 0.5 N(m, s^2)
// with m = separation * sigma and s^2 = var - m^2.
struct InputLaw {
	LawKind kind = LawKind::Gaussian;
	double var = 0;
	double separation = 0.9;

	static InputLaw gaussian(double v) { return make(LawKind::Gaussian, v); }
	static InputLaw uniform(double v) { return make(LawKind::Uniform, v); }
	static InputLaw laplace(double v) { return make(LawKind::Laplace, v); }
	static InputLaw bimodal(double v, double sep = 0.9)
	{
		if (!(sep >= 0 && sep < 1))
			throw PreconditionError("bimodal separation must lie in [0, 1)");
		auto l = make(LawKind::Bimodal, v);
		l.separation = sep;
		return l;
	}
	static InputLaw make(LawKind k, double v)
	{
		if (!(v >= 0))
			throw PreconditionError("negative power");
		InputLaw l;
		l.kind = k;
		l.var = v;
		return l;
	}

	InputLaw with_power(double v) const
	{
		InputLaw l = *this;
		l.var = v;
		return l;
	}

	double mean() const { return 0; }
	double second_moment() const
	{
		switch (kind) {
		case LawKind::Uniform: {
			double w = std::sqrt(3 * var);
			return w * w / 3;
		}
		case LawKind::Laplace: {
			double s = std::sqrt(var / 2);
			return 2 * s * s;
		}
		case LawKind::Bimodal: {
			double m = separation * std::sqrt(var);
			return m * m + (var - m * m);
		}
		default: return var;
		}
	}

	// grid samples; cell averages for the laws with kinks or jumps
	GridDensity density(const Grid& g) const
	{
		if (var == 0)
			return GridDensity::gaussian(g, 0);
		switch (kind) {
		case LawKind::Gaussian: return GridDensity::gaussian(g, var);
		case LawKind::Uniform: {
			double w = std::sqrt(3 * var);
			return GridDensity::uniform(g, -w, w);
		}
		case LawKind::Laplace: {
			double s = std::sqrt(var / 2), d = g.dx();
			auto cdf = [s](double x) { return x < 0 ? 0.5 * std::exp(x / s) : 1 - 0.5 * std::exp(-x / s); };
			std::vector<double> v(g.n);
			for (int i = 0; i < g.n; ++i)
				v[i] = (cdf(g.x(i) + d / 2) - cdf(g.x(i) - d / 2)) / d;
			return GridDensity(g, v).normalized();
		}
		case LawKind::Bimodal: {
			double m = separation * std::sqrt(var), s2 = var - m * m;
			auto a = GridDensity::gaussian(g, s2, -m), b = GridDensity::gaussian(g, s2, m);
			std::vector<double> v(g.n);
			for (int i = 0; i < g.n; ++i)
				v[i] = 0.5 * (a[i] + b[i]);
			return GridDensity(g, v).normalized();
		}
		}
		return {};
	}

	template <class Rng>
	double sample(Rng& rng) const
	{
		if (var == 0)
			return 0;
		switch (kind) {
		case LawKind::Gaussian: return std::sqrt(var) * std::normal_distribution<double>()(rng);
		case LawKind::Uniform: {
			double w = std::sqrt(3 * var);
			return std::uniform_real_distribution<double>(-w, w)(rng);
		}
		case LawKind::Laplace: {
			double u = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
			double s = std::sqrt(var / 2);
			return -s * (u < 0 ? -1 : 1) * std::log1p(-2 * std::abs(u));
		}
		case LawKind::Bimodal: {
			double m = separation * std::sqrt(var), s = std::sqrt(var - m * m);
			double z = std::normal_distribution<double>()(rng) * s;
			return std::bernoulli_distribution(0.5)(rng) ? m + z : z - m;
		}
		}
		return 0;
	}
};

using LawSet = std::array<InputLaw, 4>; // shapes; powers come from the split

inline LawSet law_family(LawKind k, double separation = 0.9)
{
	InputLaw l = InputLaw::make(k, 0);
	l.separation = separation;
	return {l, l, l, l};
}

inline LawSet laws_at(const LawSet& shapes, const PowerSplit& s)
{
	auto p = s.powers();
	return {shapes[0].with_power(p[0]), shapes[1].with_power(p[1]), shapes[2].with_power(p[2]),
		shapes[3].with_power(p[3])};
}

enum class MiMethod { grid, mc_histogram };

struct MiEstimate {
	double value = 0;  // bits
	double uncertainty = 0; // bits: batch-means error (mc) or half-resolution difference (grid)
	MiMethod method = MiMethod::grid;
};

struct GridSpec {
	int n = 2048;
	double sigmas = 10; // L in compound standard deviations
};

inline CoreSet law_cores(const Grid& g, const LawSet& laws)
{
	return {laws[0].density(g), laws[1].density(g), laws[2].density(g), laws[3].density(g)};
}

namespace detail {
inline double mi_nats(CompoundEngine& e, const MiTerm& t)
{
	MessageSet rest = ~(t.signal | t.given);
	auto dx = e.spectrum().grid().dx();
	return entropy_audit(e.compound(t.rx, t.signal | rest), dx).nats - entropy_audit(e.compound(t.rx, rest), dx).nats;
}

inline void check_term(const MiTerm& t)
{
	if (!(t.signal & t.given).empty())
		throw OverlappingSets("signal and conditioning sets intersect");
	if (t.signal.empty())
		throw PreconditionError("empty signal set");
}
} // namespace detail

// Laws carry their own powers (see laws_at).
inline MiEstimate grid_mi(const ChannelParams& c, const PowerSplit& s, const LawSet& laws, Receiver rx,
	MessageSet signal, MessageSet given, GridSpec gs = {})
{
	MiTerm t{rx, signal, given};
	detail::check_term(t);
	auto value = [&](int n) {
		Grid g = variational_grid(c, s, n, gs.sigmas);
		CompoundEngine e(c, law_cores(g, laws));
		return detail::mi_nats(e, t) / ln2;
	};
	MiEstimate r;
	r.value = value(gs.n);
	r.uncertainty = std::abs(r.value - value(gs.n / 2));
	return r;
}

namespace detail {
// differential entropy (nats) by histogram, Freedman-Diaconis bins
inline double histogram_entropy(std::vector<double> x)
{
	std::size_t n = x.size();
	std::vector<double> s = x;
	auto q = [&](double f) {
		std::size_t k = std::size_t(f * double(n - 1));
		std::nth_element(s.begin(), s.begin() + k, s.end());
		return s[k];
	};
	double iqr = q(0.75) - q(0.25);
	double h = 2 * iqr / std::cbrt(double(n));
	if (!(h > 0))
		return -INFINITY;
	double lo = *std::min_element(x.begin(), x.end());
	std::vector<std::size_t> cnt;
	for (double v : x) {
		std::size_t b = std::size_t((v - lo) / h);
		if (b >= cnt.size())
			cnt.resize(b + 1, 0);
		++cnt[b];
	}
	double H = 0;
	for (auto c : cnt)
		if (c) {
			double p = double(c) / double(n);
			H -= p * std::log(p / h);
		}
	return H;
}
} // namespace detail

constexpr std::size_t mc_min_samples = 10000;

inline MiEstimate mc_mi(const ChannelParams& c, const PowerSplit& s, const LawSet& laws, Receiver rx,
	MessageSet signal, MessageSet given, std::size_t n_samples, std::uint64_t seed, std::uint64_t instance = 0)
{
	MiTerm t{rx, signal, given};
	detail::check_term(t);
	if (n_samples < mc_min_samples)
		throw PreconditionError("mc_mi needs at least 1e4 samples");
	(void)s;
	MessageSet rest = ~(signal | given);
	std::seed_seq sq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(instance),
		std::uint32_t(instance >> 32)};
	std::mt19937_64 rng(sq);
	std::normal_distribution<double> noise;
	std::vector<double> full(n_samples), part(n_samples);
	std::array<double, 4> amp;
	for (int m = 0; m < 4; ++m)
		amp[m] = std::sqrt(gain(c, rx, m));
	for (std::size_t i = 0; i < n_samples; ++i) {
		double y = noise(rng), sig = 0;
		for (int m = 0; m < 4; ++m) {
			if (!(rest.has(m) || signal.has(m)))
				continue;
			double v = amp[m] * laws[m].sample(rng);
			(rest.has(m) ? y : sig) += v;
		}
		part[i] = y;
		full[i] = y + sig;
	}
	auto est = [](const std::vector<double>& a, const std::vector<double>& b) {
		return (detail::histogram_entropy(a) - detail::histogram_entropy(b)) / ln2;
	};
	MiEstimate r;
	r.method = MiMethod::mc_histogram;
	r.value = est(full, part);
	const std::size_t B = 10, per = n_samples / B;
	std::vector<double> bm;
	for (std::size_t b = 0; b < B; ++b) {
		std::vector<double> fa(full.begin() + b * per, full.begin() + (b + 1) * per);
		std::vector<double> pa(part.begin() + b * per, part.begin() + (b + 1) * per);
		bm.push_back(est(fa, pa));
	}
	double mean = 0, var = 0;
	for (double v : bm)
		mean += v / B;
	for (double v : bm)
		var += (v - mean) * (v - mean) / (B - 1);
	r.uncertainty = std::sqrt(var / B);
	return r;
}

// Weighted sum-rate of the reduced strategy at split s with grid MI for the laws.
inline RateQuadruple grid_strategy_rates(const ChannelParams& c, const PowerSplit& s, const LawSet& shapes,
	CodingStrategy st, GridSpec gs = {})
{
	Grid g = variational_grid(c, s, gs.n, gs.sigmas);
	CompoundEngine e(c, law_cores(g, laws_at(shapes, s)));
	return chain_rates(st, [&](const MiTerm& t) { return detail::mi_nats(e, t) / ln2; });
}

struct ProbePoint {
	double mu = 0;
	double t1 = 0, t2 = 0;          // best split fractions for the laws
	double law_objective = 0;       // bits
	double gaussian_objective = 0;  // closed-form boundary at the same mu
	double gap = 0;                 // law - gaussian after refinement
	std::vector<double> refinement; // gaps on the refined grids, if any
	bool unresolved = false;
};

struct ProbeReport {
	LawKind law = LawKind::Gaussian;
	std::vector<ProbePoint> points;
	double max_gap = -INFINITY;
	bool any_unresolved = false;
};

// For each mu: best split under the reduced structure with grid MI for the
// given law shapes, against the closed-form Gaussian optimum. A positive gap
// is re-evaluated with n x 2 and L x 1.25, twice; if it stays above `tol`
// it is reported unresolved.
inline ProbeReport non_gaussian_probe(const ChannelParams& c, const std::vector<double>& mu_grid, const LawSet& shapes,
	int split_resolution = 9, GridSpec gs = {}, double tol = 2e-3)
{
	ProbeReport rep;
	rep.law = shapes[0].kind;
	for (double mu : mu_grid) {
		auto st = strategy_for_mu(mu);
		auto obj = [&](const std::array<double, 2>& t, GridSpec g) {
			return grid_strategy_rates(c, PowerSplit::from_fractions(c, t[0], t[1]), shapes, st, g).weighted(mu);
		};
		auto gauss = optimize_split(c, mu);
		ZoomOptions o;
		o.coarse = split_resolution;
		o.local = 5;
		o.shrink = 2;
		o.tol = 2e-3;
		o.starts = 1;
		auto f = [&](const std::array<double, 2>& t) { return obj(t, gs); };
		auto best = maximize_box<2>(f, {0, 0}, {1, 1}, o);
		// also refine around the Gaussian optimum
		double h = 1.0 / (split_resolution - 1);
		auto near = maximize_box<2>(f, {std::max(0.0, gauss.t1 - h), std::max(0.0, gauss.t2 - h)},
			{std::min(1.0, gauss.t1 + h), std::min(1.0, gauss.t2 + h)}, o);
		if (near.value > best.value)
			best = near;
		ProbePoint pp;
		pp.mu = mu;
		pp.t1 = best.x[0];
		pp.t2 = best.x[1];
		pp.law_objective = best.value;
		pp.gaussian_objective = gauss.objective;
		pp.gap = best.value - gauss.objective;
		GridSpec g = gs;
		for (int r = 0; r < 2 && pp.gap > 0; ++r) {
			g.n *= 2;
			g.sigmas *= 1.25;
			pp.law_objective = obj(best.x, g);
			pp.gap = pp.law_objective - gauss.objective;
			pp.refinement.push_back(pp.gap);
		}
		pp.unresolved = pp.gap > tol;
		rep.max_gap = std::max(rep.max_gap, pp.gap);
		rep.any_unresolved |= pp.unresolved;
		rep.points.push_back(pp);
	}
	return rep;
}

} // namespace giclab
