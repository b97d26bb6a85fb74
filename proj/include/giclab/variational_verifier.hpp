#pragma once

#include "gaussian_rates.hpp"
#include "spectral.hpp"

#include <random>

namespace giclab {

struct SingularForZeroGain : Error { using Error::Error; };

using CoreSet = std::array<GridDensity, 4>; // indexed by Msg

// L = sigmas * (largest compound standard deviation), both receivers.
inline Grid variational_grid(const ChannelParams& c, const PowerSplit& s, int n = 2048, double sigmas = 10)
{
	auto p = s.powers();
	double y1 = p[U1] + p[V1] + c.b * (p[U2] + p[V2]) + 1;
	double y2 = c.a * (p[U1] + p[V1]) + p[U2] + p[V2] + 1;
	return Grid::make(sigmas * std::sqrt(std::max(y1, y2)), n);
}

inline CoreSet gaussian_cores(const Grid& g, const PowerSplit& s)
{
	auto p = s.powers();
	return {GridDensity::gaussian(g, p[0]), GridDensity::gaussian(g, p[1]), GridDensity::gaussian(g, p[2]),
		GridDensity::gaussian(g, p[3])};
}

struct Perturbation {
	Grid grid;
	std::vector<double> h;

	double moment(int k) const
	{
		double s = 0;
		for (int i = 0; i < grid.n; ++i)
			s += std::pow(grid.x(i), k) * h[i];
		return s * grid.dx();
	}
	bool admissible(double tol = 1e-10) const
	{
		return std::abs(moment(0)) <= tol && std::abs(moment(1)) <= tol && std::abs(moment(2)) <= tol;
	}
	// largest eps with f +- eps h >= 0
	double eps_max(const GridDensity& f) const
	{
		double r = 0;
		for (int i = 0; i < grid.n; ++i) {
			if (h[i] == 0)
				continue;
			if (f[i] <= 0)
				return 0;
			r = std::max(r, std::abs(h[i]) / f[i]);
		}
		return r > 0 ? 1 / r : INFINITY;
	}
};

// Projects raw h onto {h : int h = int x h = int x^2 h = 0} along
// f {1, x, x^2} exp(-x^2 / 2 var f); scaled so that max |h / f| = 1 when
// `normalise` is set.
inline Perturbation project_perturbation(const GridDensity& f, std::vector<double> h, bool normalise = true)
{
	const Grid& g = f.grid();
	double var = f.variance(), mu = f.mean();
	if (!(var > 0))
		throw PreconditionError("cannot perturb a point mass");
	std::vector<std::array<double, 3>> basis(g.n);
	for (int i = 0; i < g.n; ++i) {
		double z = g.x(i) - mu, w = f[i] * std::exp(-z * z / (2 * var));
		basis[i] = {w, w * z, w * z * z};
	}
	for (int pass = 0; pass < 2; ++pass) {
		double G[3][3] = {}, m[3] = {};
		for (int i = 0; i < g.n; ++i) {
			double x = g.x(i), xk[3] = {1, x, x * x};
			for (int k = 0; k < 3; ++k) {
				m[k] += xk[k] * h[i];
				for (int j = 0; j < 3; ++j)
					G[k][j] += xk[k] * basis[i][j];
			}
		}
		// 3x3 solve, partial pivoting
		int piv[3] = {0, 1, 2};
		for (int col = 0; col < 3; ++col) {
			int best = col;
			for (int r = col + 1; r < 3; ++r)
				if (std::abs(G[piv[r]][col]) > std::abs(G[piv[best]][col]))
					best = r;
			std::swap(piv[col], piv[best]);
			for (int r = col + 1; r < 3; ++r) {
				double q = G[piv[r]][col] / G[piv[col]][col];
				for (int j = col; j < 3; ++j)
					G[piv[r]][j] -= q * G[piv[col]][j];
				m[piv[r]] -= q * m[piv[col]];
			}
		}
		double al[3];
		for (int col = 2; col >= 0; --col) {
			double s = m[piv[col]];
			for (int j = col + 1; j < 3; ++j)
				s -= G[piv[col]][j] * al[j];
			al[col] = s / G[piv[col]][col];
		}
		for (int i = 0; i < g.n; ++i)
			h[i] -= al[0] * basis[i][0] + al[1] * basis[i][1] + al[2] * basis[i][2];
	}
	for (int i = 0; i < g.n; ++i)
		if (f[i] <= 0)
			h[i] = 0;
	Perturbation p{g, std::move(h)};
	if (normalise) {
		double e = p.eps_max(f);
		if (std::isfinite(e))
			for (double& x : p.h)
				x *= e;
	}
	return p;
}

// f times a random mix of three cosines, then projected.
template <class Rng>
Perturbation random_perturbation(const GridDensity& f, Rng& rng)
{
	double sd = std::sqrt(f.variance()), mu = f.mean();
	std::normal_distribution<double> amp;
	std::uniform_real_distribution<double> freq(0.3, 2.5), phase(0, 2 * std::numbers::pi);
	std::array<double, 3> c, w, ph;
	for (int j = 0; j < 3; ++j) {
		c[j] = amp(rng);
		w[j] = freq(rng);
		ph[j] = phase(rng);
	}
	const Grid& g = f.grid();
	std::vector<double> h(g.n);
	for (int i = 0; i < g.n; ++i) {
		double z = (g.x(i) - mu) / sd, q = 0;
		for (int j = 0; j < 3; ++j)
			q += c[j] * std::cos(w[j] * z + ph[j]);
		h[i] = f[i] * q;
	}
	return project_perturbation(f, std::move(h));
}

enum class Functional { Entropy, MutualInfo, Upsilon, Gamma, DeltaR1, DeltaR2 };

inline const char* functional_name(Functional f)
{
	switch (f) {
	case Functional::Entropy: return "entropy";
	case Functional::MutualInfo: return "mutual_info";
	case Functional::Upsilon: return "upsilon";
	case Functional::Gamma: return "gamma";
	case Functional::DeltaR1: return "delta_r1";
	case Functional::DeltaR2: return "delta_r2";
	}
	return "?";
}

struct FunctionalSpec {
	Functional kind = Functional::Entropy;
	int target = 0;                // Entropy: which core
	MiTerm term{};                 // MutualInfo
	RateWiring wiring;             // rate functionals: rate expressions at the end split
	std::array<double, 2> start{}; // (R1, R2) of the start point, nats
};

inline FunctionalSpec entropy_functional(int core)
{
	FunctionalSpec s;
	s.target = core;
	return s;
}

inline FunctionalSpec mi_functional(const MiTerm& t)
{
	FunctionalSpec s;
	s.kind = Functional::MutualInfo;
	s.term = t;
	return s;
}

// Step from `start` (fixed, Gaussian closed form) to the end split; the
// end rates follow the strategy's Gaussian wiring.
inline FunctionalSpec rate_functional(Functional kind, const ChannelParams& c, const RateQuadruple& start,
	const PowerSplit& end, CodingStrategy st)
{
	if (kind == Functional::Entropy || kind == Functional::MutualInfo)
		throw PreconditionError("not a rate functional");
	FunctionalSpec s;
	s.kind = kind;
	strategy_rates(c, end, st, &s.wiring);
	s.start = {start.r1() * ln2, start.r2() * ln2};
	return s;
}

// 4x4 map from cores (U1, V1, U2, V2) to the compounds met while decoding
// successively at Y2 (or at Y1 for the mirror chain).
struct CompoundMatrix {
	std::array<std::array<double, 4>, 4> m{};
	double det = 0;
};

inline double det4(std::array<std::array<double, 4>, 4> m)
{
	double d = 1;
	for (int c = 0; c < 4; ++c) {
		int p = c;
		for (int r = c + 1; r < 4; ++r)
			if (std::abs(m[r][c]) > std::abs(m[p][c]))
				p = r;
		if (m[p][c] == 0)
			return 0;
		if (p != c) {
			std::swap(m[p], m[c]);
			d = -d;
		}
		d *= m[c][c];
		for (int r = c + 1; r < 4; ++r) {
			double q = m[r][c] / m[c][c];
			for (int j = c; j < 4; ++j)
				m[r][j] -= q * m[c][j];
		}
	}
	return d;
}

inline CompoundMatrix core_compound_matrix(const ChannelParams& c, CodingStrategy st)
{
	CompoundMatrix r;
	if (st == CodingStrategy::mirror) {
		if (c.b == 0)
			throw SingularForZeroGain("b = 0: the Y1 chain does not see user 2");
		double s = std::sqrt(c.b);
		r.m = {{{1, 1, s, s}, {0, 1, s, s}, {0, 1, 0, s}, {0, 0, 0, s}}};
	} else {
		if (c.a == 0)
			throw SingularForZeroGain("a = 0: the Y2 chain does not see user 1");
		double s = std::sqrt(c.a);
		r.m = {{{s, s, 1, 1}, {s, s, 0, 1}, {0, s, 0, 1}, {0, s, 0, 0}}};
	}
	r.det = det4(r.m);
	return r;
}

// Densities of gain-weighted sums of cores plus unit Gaussian noise, at
// either receiver. Not thread-safe; use one engine per thread.
class CompoundEngine {
public:
	using cplx = detail::cplx;

	CompoundEngine(const ChannelParams& c, const CoreSet& cores, double max_loss = 1e-6)
		: c_(c), cores_(cores), sp_(cores[0].grid()), max_loss_(max_loss)
	{
		for (auto& f : cores_)
			if (!(f.grid() == sp_.grid()))
				throw PreconditionError("cores on different grids");
		noise_ = sp_.forward(GridDensity::gaussian(sp_.grid(), 1).values());
	}

	const Spectrum& spectrum() const { return sp_; }
	const CoreSet& cores() const { return cores_; }
	const ChannelParams& params() const { return c_; }

	const std::vector<cplx>& core_spectrum(Receiver rx, int m)
	{
		auto& s = core_spec_[int(rx)][m];
		if (s.empty())
			s = sp_.forward_scaled(cores_[m].values(), gain(c_, rx, m));
		return s;
	}

	// density of sum_{m in set} sqrt(g_m) X_m + N
	const std::vector<double>& compound(Receiver rx, MessageSet set)
	{
		auto& e = memo_[int(rx)][set.bits];
		if (!e.empty())
			return e;
		auto prod = noise_;
		int k = 1;
		for (int m = 0; m < 4; ++m)
			if (set.has(m)) {
				auto& s = core_spectrum(rx, m);
				for (int j = 0; j < sp_.bins(); ++j)
					prod[j] *= s[j];
				++k;
			}
		auto r = sp_.inverse(prod, k);
		if (std::abs(r.mass_outside) > max_loss_)
			throw MassLoss("compound density leaks " + std::to_string(r.mass_outside) + " beyond the grid");
		e = std::move(r.values);
		return e;
	}

	// d/d eps of the compound when core `which` becomes f + eps h
	std::vector<double> compound_variation(Receiver rx, MessageSet set, int which, const Perturbation& h)
	{
		if (!set.has(which))
			return std::vector<double>(sp_.grid().n, 0.0);
		auto prod = sp_.forward_scaled(h.h, gain(c_, rx, which));
		for (int j = 0; j < sp_.bins(); ++j)
			prod[j] *= noise_[j];
		int k = 2;
		for (int m = 0; m < 4; ++m)
			if (m != which && set.has(m)) {
				auto& s = core_spectrum(rx, m);
				for (int j = 0; j < sp_.bins(); ++j)
					prod[j] *= s[j];
				++k;
			}
		return sp_.inverse(prod, k).values;
	}

private:
	ChannelParams c_;
	CoreSet cores_;
	Spectrum sp_;
	double max_loss_;
	std::vector<cplx> noise_;
	std::array<std::array<std::vector<cplx>, 4>, 2> core_spec_;
	std::array<std::array<std::vector<double>, 16>, 2> memo_;
};

namespace detail {
// constant + sum coef H(compound)
struct EntropyForm {
	double constant = 0;
	std::vector<std::tuple<double, Receiver, MessageSet>> terms;

	void add_mi(double k, const MiTerm& t)
	{
		MessageSet rest = ~(t.signal | t.given);
		terms.push_back({k, t.rx, t.signal | rest});
		terms.push_back({-k, t.rx, rest});
	}
	void add_rate(double k, const RateExpr& e)
	{
		for (auto& [kk, t] : e.terms)
			add_mi(k * kk, t);
	}
};

// value and first two eps-derivatives
struct Jet {
	double v = 0, d1 = 0, d2 = 0;
};

inline Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet operator*(double k, Jet a) { return {k * a.v, k * a.d1, k * a.d2}; }

inline Jet ratio(Jet n, Jet d)
{
	double q = n.v / d.v;
	double q1 = (n.d1 * d.v - n.v * d.d1) / (d.v * d.v);
	double q2 = (n.d2 * d.v - n.v * d.d2) / (d.v * d.v) - 2 * d.d1 * q1 / d.v;
	return {q, q1, q2};
}

inline Jet norm2(Jet a, Jet b)
{
	double g = std::hypot(a.v, b.v);
	double s = a.v * a.d1 + b.v * b.d1;
	return {g, s / g, (a.d1 * a.d1 + a.v * a.d2 + b.d1 * b.d1 + b.v * b.d2) / g - s * s / (g * g * g)};
}

// entropy of p + eps dp and its analytic eps-derivatives at eps = 0; cells
// below 1e-12 of the peak are left out of the derivative sums
inline Jet entropy_jet(const std::vector<double>& p, const std::vector<double>& dp, double dx)
{
	Jet j;
	j.v = entropy_audit(p, dx).nats;
	double peak = *std::max_element(p.begin(), p.end());
	for (std::size_t i = 0; i < p.size(); ++i)
		if (p[i] > 1e-12 * peak) {
			j.d1 -= dp[i] * (std::log(p[i]) + 1);
			j.d2 -= dp[i] * dp[i] / p[i];
		}
	j.d1 *= dx;
	j.d2 *= dx;
	return j;
}

inline double shifted_entropy(const std::vector<double>& p, const std::vector<double>& dp, double eps, double dx)
{
	std::vector<double> q(p.size());
	for (std::size_t i = 0; i < p.size(); ++i)
		q[i] = p[i] + eps * dp[i];
	return entropy_audit(q, dx).nats;
}

inline std::pair<EntropyForm, EntropyForm> rate_forms(const FunctionalSpec& s)
{
	EntropyForm d1, d2;
	d1.constant = s.start[0];
	d1.add_rate(-1, s.wiring.ru1);
	d1.add_rate(-1, s.wiring.rv1);
	d2.constant = -s.start[1];
	d2.add_rate(1, s.wiring.ru2);
	d2.add_rate(1, s.wiring.rv2);
	return {d1, d2};
}

// Functional along f_which + eps h. The compounds are linear in eps, so each
// one is formed once as p + eps dp.
class Probe {
public:
	Probe(CompoundEngine& e, const FunctionalSpec& s, int which, const Perturbation* h) : s_(s)
	{
		dx_ = e.spectrum().grid().dx();
		std::vector<double> zero(e.spectrum().grid().n, 0.0);
		auto add = [&](const EntropyForm& f, std::vector<Item>& out) {
			for (auto& [k, rx, set] : f.terms) {
				Item it{k, e.compound(rx, set), {}};
				it.dp = h ? e.compound_variation(rx, set, which, *h) : zero;
				out.push_back(std::move(it));
			}
		};
		switch (s.kind) {
		case Functional::Entropy:
			a_.push_back({1, e.cores()[s.target].values(), h && which == s.target ? h->h : zero});
			break;
		case Functional::MutualInfo: {
			EntropyForm f;
			f.add_mi(1, s.term);
			add(f, a_);
			break;
		}
		default: {
			auto [f1, f2] = rate_forms(s);
			c1_ = f1.constant;
			c2_ = f2.constant;
			add(f1, a_);
			add(f2, b_);
		}
		}
	}

	double at(double eps) const
	{
		auto sum = [&](const std::vector<Item>& v, double c) {
			for (auto& it : v)
				c += it.k * shifted_entropy(it.p, it.dp, eps, dx_);
			return c;
		};
		return combine(sum(a_, c1_), sum(b_, c2_));
	}

	Jet jet() const
	{
		auto sum = [&](const std::vector<Item>& v, double c) {
			Jet j{c, 0, 0};
			for (auto& it : v)
				j = j + it.k * entropy_jet(it.p, it.dp, dx_);
			return j;
		};
		Jet a = sum(a_, c1_), b = sum(b_, c2_);
		switch (s_.kind) {
		case Functional::Upsilon: return ratio(b, a);
		case Functional::Gamma: return norm2(a, b);
		case Functional::DeltaR2: return b;
		default: return a;
		}
	}

private:
	struct Item {
		double k;
		std::vector<double> p, dp;
	};
	double combine(double a, double b) const
	{
		switch (s_.kind) {
		case Functional::Upsilon: return b / a;
		case Functional::Gamma: return std::hypot(a, b);
		case Functional::DeltaR2: return b;
		default: return a;
		}
	}

	FunctionalSpec s_;
	double dx_ = 0, c1_ = 0, c2_ = 0;
	std::vector<Item> a_, b_;
};
} // namespace detail

// Value in nats (Upsilon is a ratio).
inline double evaluate_functional(const FunctionalSpec& s, CompoundEngine& e)
{
	return detail::Probe(e, s, 0, nullptr).at(0);
}

inline double evaluate_functional(const FunctionalSpec& s, const CoreSet& cores, const ChannelParams& c)
{
	CompoundEngine e(c, cores);
	return evaluate_functional(s, e);
}

struct FirstVariation {
	double derivative = 0;  // central difference at eps
	double half_step = 0;   // same at eps / 2
	double analytic = 0;    // -sum dp (ln p + 1) dx combined through the functional
	bool richardson_ok = false;
};

constexpr double richardson_floor = 1e-4;

inline void check_eps(const GridDensity& f, const Perturbation& h, double eps)
{
	if (!(f.grid() == h.grid))
		throw PreconditionError("perturbation on a different grid");
	if (eps > h.eps_max(f))
		throw NegativeDensity("f - eps h has negative cells");
}

inline FirstVariation first_variation(const FunctionalSpec& s, CompoundEngine& e, int which, const Perturbation& h,
	double eps = 1e-3)
{
	check_eps(e.cores()[which], h, eps);
	detail::Probe p(e, s, which, &h);
	FirstVariation r;
	r.derivative = (p.at(eps) - p.at(-eps)) / (2 * eps);
	r.half_step = (p.at(eps / 2) - p.at(-eps / 2)) / eps;
	r.analytic = p.jet().d1;
	double gap = std::abs(r.derivative - r.half_step);
	r.richardson_ok = gap <= std::max(0.1 * std::abs(r.half_step), richardson_floor);
	return r;
}

inline FirstVariation first_variation(const FunctionalSpec& s, const CoreSet& cores, const ChannelParams& c,
	int which, const Perturbation& h, double eps = 1e-3)
{
	CompoundEngine e(c, cores);
	return first_variation(s, e, which, h, eps);
}

struct SecondVariation {
	double estimate = 0;   // (F(+eps) - 2 F(0) + F(-eps)) / eps^2
	double analytic = 0;   // sum of -int dp^2 / p terms, chained through ratios
};

inline SecondVariation second_variation(const FunctionalSpec& s, CompoundEngine& e, int which, const Perturbation& h,
	double eps = 1e-3)
{
	check_eps(e.cores()[which], h, eps);
	detail::Probe p(e, s, which, &h);
	return {(p.at(eps) - 2 * p.at(0) + p.at(-eps)) / (eps * eps), p.jet().d2};
}

inline SecondVariation second_variation(const FunctionalSpec& s, const CoreSet& cores, const ChannelParams& c,
	int which, const Perturbation& h, double eps = 1e-3)
{
	CompoundEngine e(c, cores);
	return second_variation(s, e, which, h, eps);
}

// H(f1 * f2_gamma * n) - H(f2 * n) under f2 -> f2 + eps h: finite difference
// and the closed form -int (f1 * h_gamma)^2 / (f1 * f2_gamma) + int h^2 / f2
// (both with the noise kept).
inline SecondVariation scaled_pair_second_variation(const GridDensity& f1, const GridDensity& f2, double gamma,
	const Perturbation& h, double eps = 1e-3)
{
	// reuse the engine: f1 as U1 at Y1 (gain 1), f2 as U2 seen at Y1 with gain gamma
	ChannelParams c{1, gamma, 1, 1};
	auto spike = GridDensity::gaussian(f1.grid(), 0);
	CoreSet cores{f1, spike, f2, spike};
	CompoundEngine e(c, cores);
	check_eps(f2, h, eps);
	auto p1 = e.compound(Receiver::Y1, {U1, U2});
	auto d1 = e.compound_variation(Receiver::Y1, {U1, U2}, U2, h);
	auto p2 = e.compound(Receiver::Y2, {U2});
	auto d2 = e.compound_variation(Receiver::Y2, {U2}, U2, h);
	double dx = f1.grid().dx();
	auto F = [&](double t) {
		return detail::shifted_entropy(p1, d1, t, dx) - detail::shifted_entropy(p2, d2, t, dx);
	};
	auto j = detail::entropy_jet(p1, d1, dx) + -1.0 * detail::entropy_jet(p2, d2, dx);
	return {(F(eps) - 2 * F(0) + F(-eps)) / (eps * eps), j.d2};
}

} // namespace giclab
