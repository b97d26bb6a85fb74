#pragma once

#include "boundary_tracer.hpp"

#include <gsl/gsl_multimin.h>

#include <functional>
#include <memory>

namespace giclab {

struct Phase {
	double duration = 0;
	double p1 = 0, p2 = 0; // per-sample powers during the phase
	bool user1 = false, user2 = false;
};

struct PhasePlan {
	std::vector<Phase> phases;

	double total_duration() const
	{
		double t = 0;
		for (auto& p : phases)
			t += p.duration;
		return t;
	}
	bool conserves(const ChannelParams& c, double tol = 1e-10) const
	{
		double e1 = 0, e2 = 0;
		for (auto& p : phases) {
			e1 += p.duration * p.p1;
			e2 += p.duration * p.p2;
		}
		return std::abs(total_duration() - 1) <= 1e-12 && std::abs(e1 - c.p1) <= tol * std::max(1.0, c.p1) &&
			std::abs(e2 - c.p2) <= tol * std::max(1.0, c.p2);
	}
};

enum class SingleUser { user1, user2, automatic };

struct EnvelopePoint {
	double mu = 0;
	PhasePlan plan;
	double r1 = 0, r2 = 0, objective = 0;
	double omega = 1;     // duration of the two-user phase
	int phase2_user = 0;  // user active in the single-user phase, 0 if none
};

// Best single-phase weighted sum-rate W(q1, q2) at powers (q1, q2).
struct PhaseValue {
	double objective = 0, r1 = 0, r2 = 0;
};

inline PhaseValue two_user_value(const ChannelParams& c, double q1, double q2, double mu, const ZoomOptions& o)
{
	ChannelParams cc{c.a, c.b, q1, q2};
	auto st = strategy_for_mu(mu);
	auto f = [&](const std::array<double, 2>& t) {
		return strategy_rates(cc, PowerSplit::from_fractions(cc, t[0], t[1]), st).weighted(mu);
	};
	auto best = maximize_box<2>(f, {0, 0}, {1, 1}, o);
	auto r = strategy_rates(cc, PowerSplit::from_fractions(cc, best.x[0], best.x[1]), st);
	return {r.weighted(mu), r.r1(), r.r2()};
}

inline PhaseValue two_user_value(const ChannelParams& c, double q1, double q2, double mu)
{
	auto o = optimize_split(ChannelParams{c.a, c.b, q1, q2}, mu);
	return {o.objective, o.rates.r1(), o.rates.r2()};
}

// Coarse W on a (log q1, log q2) lattice, bilinear lookup. Only used to seed searches.
class PhaseTable {
public:
	PhaseTable(const ChannelParams& c, double mu, int n = 40) : c_(c), mu_(mu)
	{
		auto axis = [n](double p) {
			std::vector<double> q{0.0};
			if (p > 0)
				for (int i = 0; i < n; ++i)
					q.push_back(p / 64 * std::pow(64.0 * 48, double(i) / (n - 1)));
			return q;
		};
		q1_ = axis(c.p1);
		q2_ = axis(c.p2);
		ZoomOptions o;
		o.coarse = 9;
		o.local = 7;
		o.tol = 1e-5;
		o.starts = 2;
		w_.assign(q1_.size() * q2_.size(), 0.0);
		parallel_for(q1_.size(), [&](size_t i) {
			for (size_t j = 0; j < q2_.size(); ++j)
				w_[i * q2_.size() + j] = two_user_value(c_, q1_[i], q2_[j], mu_, o).objective;
		});
	}

	double operator()(double q1, double q2) const
	{
		auto locate = [](const std::vector<double>& ax, double q, size_t& i, double& f) {
			if (ax.size() == 1) {
				i = 0;
				f = 0;
				return;
			}
			q = std::min(q, ax.back());
			i = std::upper_bound(ax.begin(), ax.end(), q) - ax.begin();
			i = std::clamp<size_t>(i, 1, ax.size() - 1) - 1;
			double lo = ax[i], hi = ax[i + 1];
			f = i == 0 ? (q - lo) / (hi - lo) : std::log(q / lo) / std::log(hi / lo);
			f = std::clamp(f, 0.0, 1.0);
		};
		size_t i, j;
		double fi, fj;
		locate(q1_, q1, i, fi);
		locate(q2_, q2, j, fj);
		size_t n2 = q2_.size();
		auto w = [&](size_t a, size_t b) {
			return w_[std::min(a, q1_.size() - 1) * n2 + std::min(b, n2 - 1)];
		};
		return (1 - fi) * (1 - fj) * w(i, j) + fi * (1 - fj) * w(i + 1, j) + (1 - fi) * fj * w(i, j + 1) +
			fi * fj * w(i + 1, j + 1);
	}

	double mu() const { return mu_; }

private:
	ChannelParams c_;
	double mu_;
	std::vector<double> q1_, q2_, w_;
};

namespace detail {
template <std::size_t N>
struct NmResult {
	std::array<double, N> x;
	double value;
};

// Nelder-Mead maximisation of f on the unit box (coordinates are clamped).
template <std::size_t N>
NmResult<N> nm_max(const std::function<double(const std::array<double, N>&)>& f, std::array<double, N> x0,
	double step, int max_iter = 400, double size_tol = 1e-10)
{
	struct Ctx {
		const std::function<double(const std::array<double, N>&)>* f;
	} ctx{&f};
	auto clampx = [](const gsl_vector* v) {
		std::array<double, N> x;
		for (std::size_t k = 0; k < N; ++k)
			x[k] = std::clamp(gsl_vector_get(v, k), 0.0, 1.0);
		return x;
	};
	gsl_multimin_function fn;
	fn.n = N;
	fn.params = &ctx;
	fn.f = [](const gsl_vector* v, void* p) -> double {
		std::array<double, N> x;
		for (std::size_t k = 0; k < N; ++k)
			x[k] = std::clamp(gsl_vector_get(v, k), 0.0, 1.0);
		return -(*static_cast<Ctx*>(p)->f)(x);
	};
	std::unique_ptr<gsl_vector, void (*)(gsl_vector*)> x(gsl_vector_alloc(N), gsl_vector_free);
	std::unique_ptr<gsl_vector, void (*)(gsl_vector*)> ss(gsl_vector_alloc(N), gsl_vector_free);
	for (std::size_t k = 0; k < N; ++k)
		gsl_vector_set(x.get(), k, x0[k]);
	gsl_vector_set_all(ss.get(), step);
	std::unique_ptr<gsl_multimin_fminimizer, void (*)(gsl_multimin_fminimizer*)> m(
		gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, N), gsl_multimin_fminimizer_free);
	gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), ss.get());
	for (int it = 0; it < max_iter; ++it) {
		if (gsl_multimin_fminimizer_iterate(m.get()))
			break;
		if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), size_tol) == GSL_SUCCESS)
			break;
	}
	NmResult<N> r{clampx(gsl_multimin_fminimizer_x(m.get())), 0};
	r.value = f(r.x);
	double v0 = f(x0);
	if (v0 > r.value)
		r = {x0, v0};
	return r;
}

inline double solo_rate(double energy, double duration)
{
	return duration > 0 ? duration * cap(energy / duration, 1) : 0.0;
}
} // namespace detail

namespace detail {
// Two-user phase of length w, the solo user k keeps (1 - f) of its energy for
// a solo phase of length 1 - w; the other user spends everything in phase A.
struct TwoPhaseEval {
	const ChannelParams& c;
	double mu;
	int solo;

	std::pair<double, double> powers(double w, double f) const
	{
		double e1 = solo == 1 ? f * c.p1 : c.p1, e2 = solo == 2 ? f * c.p2 : c.p2;
		return {e1 / w, e2 / w};
	}
	double solo_term(double w, double f) const
	{
		double e = (1 - f) * (solo == 1 ? c.p1 : c.p2);
		return (solo == 1 ? 1.0 : mu) * solo_rate(e, 1 - w);
	}
	template <class W>
	double value(double w, double f, W&& wfun) const
	{
		if (w <= 0)
			return solo_term(0, 0);
		auto [q1, q2] = powers(w, f);
		return w * wfun(q1, q2) + solo_term(w, f);
	}
};
} // namespace detail

inline EnvelopePoint make_envelope_point(const ChannelParams& c, double mu, int solo, double w, double f)
{
	EnvelopePoint e;
	e.mu = mu;
	e.omega = w;
	e.phase2_user = w < 1 ? solo : 0;
	detail::TwoPhaseEval ev{c, mu, solo};
	if (w > 0) {
		auto [q1, q2] = ev.powers(w, f);
		PhaseValue pv = two_user_value(c, q1, q2, mu);
		e.plan.phases.push_back({w, q1, q2, q1 > 0, q2 > 0});
		e.r1 += w * pv.r1;
		e.r2 += w * pv.r2;
	}
	if (w < 1) {
		double en = (1 - f) * (solo == 1 ? c.p1 : c.p2), d = 1 - w;
		Phase p{d, 0, 0, solo == 1, solo == 2};
		(solo == 1 ? p.p1 : p.p2) = en / d;
		e.plan.phases.push_back(p);
		(solo == 1 ? e.r1 : e.r2) += detail::solo_rate(en, d);
	}
	e.objective = e.r1 + mu * e.r2;
	return e;
}

namespace detail {
inline EnvelopePoint two_phase_for(const ChannelParams& c, double mu, int solo, const PhaseTable& table)
{
	TwoPhaseEval ev{c, mu, solo};
	// coarse: 64 durations x 33 energy fractions on the table
	const int nw = 64, nf = 33;
	double bw = 1, bf = 1, bv = -INFINITY;
	for (int i = 1; i <= nw; ++i)
		for (int j = 0; j < nf; ++j) {
			double w = double(i) / nw, f = double(j) / (nf - 1);
			double v = ev.value(w, f, table);
			if (v > bv) {
				bv = v;
				bw = w;
				bf = f;
			}
		}
	auto w_exact = [&](double q1, double q2) { return two_user_value(c, q1, q2, mu).objective; };
	// golden section in omega; the energy fraction is re-optimised at each omega
	double hw = 1.0 / nw, hf = 2.0 / (nf - 1);
	double flo = std::max(0.0, bf - hf), fhi = std::min(1.0, bf + hf);
	auto best_f = [&](double w) {
		return golden_max([&](double f) { return ev.value(w, f, w_exact); }, flo, fhi, 1e-9);
	};
	auto r = golden_max([&](double w) { return best_f(w).value; }, std::max(1e-9, bw - hw), std::min(1.0, bw + hw), 1e-8);
	return make_envelope_point(c, mu, solo, r.x, best_f(r.x).x);
}
} // namespace detail

inline EnvelopePoint two_phase_optimize(const ChannelParams& c, double mu, SingleUser single_user,
	const PhaseTable* table = nullptr)
{
	if (!(mu > 0))
		throw PreconditionError("mu must be positive");
	if (c.p2 == 0 || c.p1 == 0) {
		int solo = c.p2 == 0 ? 1 : 2;
		EnvelopePoint e;
		e.mu = mu;
		e.omega = 0;
		e.phase2_user = solo;
		Phase p{1, c.p1, c.p2, solo == 1, solo == 2};
		e.plan.phases.push_back(p);
		(solo == 1 ? e.r1 : e.r2) = cap(solo == 1 ? c.p1 : c.p2, 1);
		e.objective = e.r1 + mu * e.r2;
		return e;
	}
	std::unique_ptr<PhaseTable> own;
	if (!table || table->mu() != mu) {
		own = std::make_unique<PhaseTable>(c, mu);
		table = own.get();
	}
	EnvelopePoint best = make_envelope_point(c, mu, 2, 1.0, 1.0);
	// order matters for ties: single phase, then user 2, then user 1
	std::vector<int> solos;
	if (single_user != SingleUser::user1)
		solos.push_back(2);
	if (single_user != SingleUser::user2)
		solos.push_back(1);
	for (int s : solos) {
		EnvelopePoint e = detail::two_phase_for(c, mu, s, *table);
		if (e.objective > best.objective + 1e-12)
			best = e;
	}
	return best;
}

struct ThreePhaseReport {
	double two_phase = 0, three_phase = 0, improvement = 0;
	double tau0 = 1, tau1 = 0, tau2 = 0, f1 = 1, f2 = 1; // durations, energy fractions in the two-user phase
	bool degenerate = false;
};

namespace detail {
// solo phases share 1 - tau0; best split of that time for the leftover energies
inline double solo_pair(double rest, double e1, double e2, double mu, double* tau1 = nullptr)
{
	if (rest <= 0)
		return 0;
	auto g = [&](double t1) { return solo_rate(e1, t1) + mu * solo_rate(e2, rest - t1); };
	auto r = golden_max(g, 0, rest, 1e-13 * std::max(1.0, rest));
	if (tau1)
		*tau1 = r.x;
	return r.value;
}
} // namespace detail

// One two-user phase plus a solo phase for each user.
inline ThreePhaseReport three_phase_check(const ChannelParams& c, double mu, int resolution = 32,
	const PhaseTable* table = nullptr)
{
	ThreePhaseReport rep;
	if (c.p1 == 0 || c.p2 == 0 || (c.a == 0 && c.b == 0)) {
		// the space collapses, or W is separable and concave
		rep.two_phase = rep.three_phase = two_phase_optimize(c, mu, SingleUser::automatic).objective;
		rep.degenerate = true;
		return rep;
	}
	std::unique_ptr<PhaseTable> own;
	if (!table || table->mu() != mu) {
		own = std::make_unique<PhaseTable>(c, mu);
		table = own.get();
	}
	EnvelopePoint two = two_phase_optimize(c, mu, SingleUser::automatic, table);
	rep.two_phase = two.objective;

	// x = (tau0, f1, f2)
	auto value = [&](const std::array<double, 3>& x, auto&& wfun) {
		double t0 = std::max(x[0], 1e-9);
		double rest = 1 - t0;
		double v = t0 * wfun(x[1] * c.p1 / t0, x[2] * c.p2 / t0);
		return v + detail::solo_pair(rest, (1 - x[1]) * c.p1, (1 - x[2]) * c.p2, mu);
	};
	auto precise = [&](const std::array<double, 3>& x) {
		return value(x, [&](double q1, double q2) { return two_user_value(c, q1, q2, mu).objective; });
	};
	std::vector<std::pair<double, std::array<double, 3>>> grid;
	for (int i = 1; i <= resolution; ++i)
		for (int j = 0; j < resolution; ++j)
			for (int k = 0; k < resolution; ++k) {
				std::array<double, 3> x{double(i) / resolution, double(j) / (resolution - 1),
					double(k) / (resolution - 1)};
				grid.push_back({value(x, *table), x});
			}
	std::partial_sort(grid.begin(), grid.begin() + 3, grid.end(),
		[](auto& a, auto& b) { return a.first > b.first; });

	// starts: best grid points and the two-phase optimum embedded
	std::vector<std::array<double, 3>> starts{grid[0].second, grid[1].second, grid[2].second};
	{
		double w = two.omega;
		double f1 = two.phase2_user == 1 ? two.plan.phases[0].p1 * w / c.p1 : 1.0;
		double f2 = two.phase2_user == 2 ? two.plan.phases[0].p2 * w / c.p2 : 1.0;
		starts.push_back({w, f1, f2});
	}
	std::function<double(const std::array<double, 3>&)> pf = precise;
	rep.three_phase = -INFINITY;
	for (auto& s : starts) {
		auto r = detail::nm_max<3>(pf, s, 0.02, 300, 1e-9);
		if (r.value > rep.three_phase) {
			rep.three_phase = r.value;
			rep.tau0 = r.x[0];
			rep.f1 = r.x[1];
			rep.f2 = r.x[2];
		}
	}
	detail::solo_pair(1 - rep.tau0, (1 - rep.f1) * c.p1, (1 - rep.f2) * c.p2, mu, &rep.tau1);
	rep.tau2 = 1 - rep.tau0 - rep.tau1;
	rep.improvement = std::max(0.0, rep.three_phase - rep.two_phase);
	return rep;
}

inline std::vector<EnvelopePoint> envelope_sweep(const ChannelParams& c, const std::vector<double>& mu_grid)
{
	for (size_t i = 1; i < mu_grid.size(); ++i)
		if (mu_grid[i] < mu_grid[i - 1])
			throw PreconditionError("mu grid must be ascending");
	std::vector<EnvelopePoint> out(mu_grid.size());
	parallel_for(mu_grid.size(), [&](size_t i) { out[i] = two_phase_optimize(c, mu_grid[i], SingleUser::automatic); });
	return out;
}

// Splitting the two-user phase into two equal halves with powers q +- d.
struct MergeReport {
	double best_gain = 0; // of the split over the merged phase, weighted by its duration
	int trials = 0;
};

inline MergeReport merge_check(const ChannelParams& c, const EnvelopePoint& e, int n = 5)
{
	MergeReport rep;
	if (e.plan.phases.empty() || !(e.plan.phases[0].user1 && e.plan.phases[0].user2))
		return rep;
	const Phase& ph = e.plan.phases[0];
	double base = two_user_value(c, ph.p1, ph.p2, e.mu).objective;
	for (int i = -n; i <= n; ++i)
		for (int j = -n; j <= n; ++j) {
			if (i == 0 && j == 0)
				continue;
			double d1 = ph.p1 * 0.9 * i / n, d2 = ph.p2 * 0.9 * j / n;
			double v = 0.5 * (two_user_value(c, ph.p1 + d1, ph.p2 + d2, e.mu).objective +
				two_user_value(c, ph.p1 - d1, ph.p2 - d2, e.mu).objective);
			rep.best_gain = std::max(rep.best_gain, ph.duration * (v - base));
			++rep.trials;
		}
	return rep;
}

} // namespace giclab
