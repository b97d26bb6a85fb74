#pragma once

#include "gaussian_rates.hpp"
#include "hk_lp.hpp"
#include "optimize.hpp"
#include "parallel.hpp"

#include <optional>
#include <vector>

namespace giclab {

struct EmptyCandidateSet : Error { using Error::Error; };

struct BoundarySample {
	double mu = 0;
	PowerSplit split;
	RateQuadruple rates;
	std::optional<StepMetrics> metrics;
	CodingStrategy strategy = CodingStrategy::sd_at_y2;
};

struct SplitOptimum {
	double t1 = 0, t2 = 0, objective = 0;
	PowerSplit split;
	RateQuadruple rates;
};

inline ZoomOptions split_zoom(int resolution)
{
	ZoomOptions o;
	o.coarse = resolution;
	return o;
}

// max over (t1, t2) of the reduced weighted sum-rate at weight mu
inline SplitOptimum optimize_split(const ChannelParams& c, double mu, int resolution = 17)
{
	auto st = strategy_for_mu(mu);
	auto f = [&](const std::array<double, 2>& t) {
		return strategy_rates(c, PowerSplit::from_fractions(c, t[0], t[1]), st).weighted(mu);
	};
	auto best = maximize_box<2>(f, {0, 0}, {1, 1}, split_zoom(resolution));
	SplitOptimum o;
	o.t1 = best.x[0];
	o.t2 = best.x[1];
	o.split = PowerSplit::from_fractions(c, o.t1, o.t2);
	o.rates = strategy_rates(c, o.split, st);
	o.objective = o.rates.weighted(mu);
	return o;
}

inline std::vector<BoundarySample> sweep_boundary(const ChannelParams& c, const std::vector<double>& mu_grid,
	int split_resolution = 17)
{
	if (split_resolution < 16)
		throw PreconditionError("split resolution must be at least 16");
	for (size_t i = 0; i < mu_grid.size(); ++i)
		if (!(mu_grid[i] > 0) || (i > 0 && mu_grid[i] < mu_grid[i - 1]))
			throw PreconditionError("mu grid must be positive and ascending");
	std::vector<SplitOptimum> opt(mu_grid.size());
	parallel_for(mu_grid.size(), [&](size_t i) { opt[i] = optimize_split(c, mu_grid[i], split_resolution); });
	std::vector<BoundarySample> out;
	for (size_t i = 0; i < mu_grid.size(); ++i) {
		BoundarySample s{mu_grid[i], opt[i].split, opt[i].rates, std::nullopt, strategy_for_mu(mu_grid[i])};
		if (i > 0)
			s.metrics = try_step_metrics(out.back().rates, s.rates);
		out.push_back(s);
	}
	return out;
}

struct StepCandidate {
	Reallocation move;
	PowerSplit end;
	RateQuadruple rates;
	StepMetrics metrics;
};

struct StepCandidateSet {
	std::vector<StepCandidate> candidates;
	StepCandidate pareto;
};

// Counterclockwise moves: user 1 toward public, user 2 toward private.
inline Reallocation ccw_move(double dp1, double dp2)
{
	return {dp1, dp1 > 0 ? Direction::toward_public : Direction::none, dp2,
		dp2 > 0 ? Direction::toward_private : Direction::none};
}

inline CodingStrategy stepping_strategy(CodingStrategy s)
{
	return s == CodingStrategy::corner_start ? CodingStrategy::sd_at_y2 : s;
}

// Grid of reallocations; the pick is the minimal slope, then maximal length,
// then the component-wise smallest move (tie tolerance 1e-10).
inline StepCandidateSet step_candidates(const ChannelParams& c, const BoundarySample& start, double dp_max1,
	double dp_max2, int n_candidates = 21, double tie = 1e-10)
{
	auto st = stepping_strategy(start.strategy);
	StepCandidateSet set;
	int n1 = dp_max1 > 0 ? n_candidates : 1, n2 = dp_max2 > 0 ? n_candidates : 1;
	for (int i = 0; i < n1; ++i)
		for (int j = 0; j < n2; ++j) {
			double d1 = n1 > 1 ? dp_max1 * i / (n1 - 1) : 0.0;
			double d2 = n2 > 1 ? dp_max2 * j / (n2 - 1) : 0.0;
			if (d1 == 0 && d2 == 0)
				continue;
			Reallocation r = ccw_move(d1, d2);
			PowerSplit e;
			try {
				e = apply_reallocation(start.split, r);
			} catch (const RejectedMove&) {
				continue;
			}
			RateQuadruple q = strategy_rates(c, e, st);
			if (auto m = try_step_metrics(start.rates, q))
				set.candidates.push_back({r, e, q, *m});
		}
	if (set.candidates.empty())
		throw EmptyCandidateSet("no reallocation gives a counterclockwise step");
	double umin = INFINITY;
	for (auto& k : set.candidates)
		umin = std::min(umin, k.metrics.upsilon);
	double gmax = -INFINITY;
	for (auto& k : set.candidates)
		if (k.metrics.upsilon <= umin + tie)
			gmax = std::max(gmax, k.metrics.gamma);
	const StepCandidate* pick = nullptr;
	for (auto& k : set.candidates) {
		if (k.metrics.upsilon > umin + tie || k.metrics.gamma < gmax - tie)
			continue;
		if (!pick || k.move.dp1 < pick->move.dp1 ||
			(k.move.dp1 == pick->move.dp1 && k.move.dp2 < pick->move.dp2))
			pick = &k;
	}
	set.pareto = *pick;
	return set;
}

struct StepChoice {
	double dp1 = 0, dp2 = 0;
	PowerSplit end;
	RateQuadruple rates;
	StepMetrics metrics;
};

// Among counterclockwise reallocations whose R1 loss equals dr1, the one with
// the largest R2 gain (ties: smaller move). Directions are parametrised as
// (dp1, dp2) = r (1 - s, s), s in [0, 1].
inline std::optional<StepChoice> best_step_for_dr1(const ChannelParams& c, const PowerSplit& from,
	CodingStrategy strategy, double dr1)
{
	auto st = stepping_strategy(strategy);
	RateQuadruple r0 = strategy_rates(c, from, st);
	auto at = [&](double s, double r, PowerSplit& e) {
		e = apply_reallocation(from, ccw_move(std::min(r * (1 - s), from.pv1), std::min(r * s, from.pu2)));
		return strategy_rates(c, e, st);
	};
	// end point reached along direction s, if the loss dr1 is attainable there
	auto along = [&](double s) -> std::optional<StepChoice> {
		double rmax = INFINITY;
		if (s < 1)
			rmax = std::min(rmax, from.pv1 / (1 - s));
		if (s > 0)
			rmax = std::min(rmax, from.pu2 / s);
		if (!(rmax > 0) || !std::isfinite(rmax))
			return std::nullopt;
		PowerSplit e;
		auto loss = [&](double r) { return r0.r1() - at(s, r, e).r1(); };
		const int scan = 48;
		double lo = 0, hi = -1;
		for (int k = 1; k <= scan; ++k) {
			double r = rmax * k / scan;
			if (loss(r) >= dr1) {
				hi = r;
				break;
			}
			lo = r;
		}
		if (hi < 0)
			return std::nullopt;
		for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
			double mid = 0.5 * (lo + hi);
			(loss(mid) >= dr1 ? hi : lo) = mid;
		}
		StepChoice ch;
		ch.rates = at(s, hi, e);
		ch.end = e;
		ch.dp1 = std::min(hi * (1 - s), from.pv1);
		ch.dp2 = std::min(hi * s, from.pu2);
		auto m = try_step_metrics(r0, ch.rates);
		if (!m)
			return std::nullopt;
		ch.metrics = *m;
		return ch;
	};
	auto gain = [&](double s) {
		auto ch = along(s);
		return ch ? ch->metrics.dr2 : -INFINITY;
	};
	const int ns = 33;
	int bi = -1;
	double bv = -INFINITY;
	for (int k = 0; k < ns; ++k) {
		double v = gain(double(k) / (ns - 1));
		if (v > bv) {
			bv = v;
			bi = k;
		}
	}
	if (bi < 0)
		return std::nullopt;
	double lo = std::max(0, bi - 1) / double(ns - 1), hi = std::min(ns - 1, bi + 1) / double(ns - 1);
	auto g = golden_max(gain, lo, hi, 1e-12);
	double s = g.value >= bv ? g.x : double(bi) / (ns - 1);
	return along(s);
}

struct TraceResult {
	std::vector<BoundarySample> samples;
	std::vector<size_t> segment_starts; // sample index where each segment begins
	int switches = 0;
};

namespace detail {
template <class Target>
TraceResult trace(const ChannelParams& c, int n_steps, double stop_upsilon, Target&& target)
{
	TraceResult tr;
	auto corner = corner_max_r1(c);
	tr.samples.push_back({0.0, corner.split, corner.rates, std::nullopt, CodingStrategy::corner_start});
	tr.segment_starts.push_back(0);
	CodingStrategy st = CodingStrategy::sd_at_y2;
	for (int k = 0; k < n_steps; ++k) {
		const BoundarySample& cur = tr.samples.back();
		double d = target(k, cur, st);
		std::optional<StepChoice> ch;
		if (d > 0)
			ch = best_step_for_dr1(c, cur.split, st, d);
		if (!ch && st == CodingStrategy::sd_at_y2) {
			// the segment is exhausted; try the mirrored chain from the same point
			if (d > 0 && (ch = best_step_for_dr1(c, cur.split, CodingStrategy::mirror, d))) {
				st = CodingStrategy::mirror;
				++tr.switches;
				tr.segment_starts.push_back(tr.samples.size() - 1);
			}
		}
		if (!ch || ch->metrics.upsilon < stop_upsilon)
			break;
		tr.samples.push_back({1.0 / ch->metrics.upsilon, ch->end, ch->rates, ch->metrics, st});
	}
	return tr;
}
} // namespace detail

// Steps of fixed R1 loss dr1 from the corner until the slope drops below
// stop_upsilon or no counterclockwise move is left.
inline TraceResult trace_equal_steps(const ChannelParams& c, double dr1, int max_steps, double stop_upsilon = 1.0)
{
	return detail::trace(c, max_steps, stop_upsilon, [dr1](int, const BoundarySample&, CodingStrategy) { return dr1; });
}

// Step k targets the R1 loss of moving dp_schedule[k] from U2 to V2 alone.
inline TraceResult trace_incremental(const ChannelParams& c, int n_steps, const std::vector<double>& dp_schedule,
	double stop_upsilon = 1.0)
{
	if (n_steps < 1 || dp_schedule.empty())
		throw PreconditionError("need at least one step and a non-empty schedule");
	return detail::trace(c, n_steps, stop_upsilon, [&](int k, const BoundarySample& cur, CodingStrategy st) {
		double dp = std::min(dp_schedule[k % dp_schedule.size()], cur.split.pu2);
		if (!(dp > 0))
			dp = std::min(dp_schedule[k % dp_schedule.size()], cur.split.pv1);
		if (!(dp > 0))
			return 0.0;
		auto pure = cur.split.pu2 > 0 ? ccw_move(0, dp) : ccw_move(dp, 0);
		auto e = strategy_rates(c, apply_reallocation(cur.split, pure), stepping_strategy(st));
		return cur.rates.r1() - e.r1();
	});
}

// Chords from the first sample of a segment: slope non-increasing and length
// non-decreasing along a concave boundary.
struct MonotonicityReport {
	int steps = 0, upsilon_violations = 0, gamma_violations = 0;
	double worst_upsilon = 0, worst_gamma = 0;
	bool ok() const { return upsilon_violations == 0 && gamma_violations == 0; }
};

inline MonotonicityReport check_monotonicity(const std::vector<BoundarySample>& seg, double tol = 1e-9)
{
	MonotonicityReport rep;
	if (seg.size() < 2)
		return rep;
	const RateQuadruple& s = seg.front().rates;
	double pu = INFINITY, pg = -INFINITY;
	for (size_t i = 1; i < seg.size(); ++i) {
		double d1 = s.r1() - seg[i].rates.r1(), d2 = seg[i].rates.r2() - s.r2();
		double u = d2 / d1, g = std::hypot(d1, d2);
		if (u > pu + tol) {
			++rep.upsilon_violations;
			rep.worst_upsilon = std::max(rep.worst_upsilon, u - pu);
		}
		if (g < pg - tol) {
			++rep.gamma_violations;
			rep.worst_gamma = std::max(rep.worst_gamma, pg - g);
		}
		pu = u;
		pg = g;
		++rep.steps;
	}
	return rep;
}

struct Theorem10Report {
	std::vector<double> omega, gamma, upsilon, dr1, dr2, r1, r2;
	int gamma_violations = 0, upsilon_violations = 0;
	// constrained programs: max Gamma | Upsilon, max dR2 | dR1, min dR1 | dR2,
	// max R2 | R1, max R1 | R2
	std::array<int, 5> program_violations{};
	int timeshare_violations = 0;
	bool identity_at_one = false;
	int violations() const
	{
		int v = gamma_violations + upsilon_violations + timeshare_violations;
		for (int p : program_violations)
			v += p;
		return v;
	}
};

// omega scales the segment's reallocation; omega_grid must be ascending in [0, 1]
inline Theorem10Report verify_theorem10(const ChannelParams& c, const BoundarySample& start,
	const BoundarySample& end, const std::vector<double>& omega_grid, double tol = 1e-10)
{
	auto st = stepping_strategy(end.strategy);
	Theorem10Report rep;
	double d1 = end.split.pu1 - start.split.pu1, d2 = start.split.pu2 - end.split.pu2;
	for (double w : omega_grid) {
		PowerSplit s = w == 1 ? end.split : apply_reallocation(start.split, ccw_move(w * d1, w * d2));
		RateQuadruple q = w == 1 ? end.rates : strategy_rates(c, s, st);
		double a = start.rates.r1() - q.r1(), b = q.r2() - start.rates.r2();
		rep.omega.push_back(w);
		rep.dr1.push_back(a);
		rep.dr2.push_back(b);
		rep.r1.push_back(q.r1());
		rep.r2.push_back(q.r2());
		rep.gamma.push_back(std::hypot(a, b));
		rep.upsilon.push_back(a > 0 ? b / a : NAN);
	}
	size_t n = rep.omega.size();
	for (size_t i = 1; i < n; ++i) {
		if (rep.gamma[i] < rep.gamma[i - 1] - tol)
			++rep.gamma_violations;
		if (rep.omega[i - 1] > 0 && rep.upsilon[i] > rep.upsilon[i - 1] + tol)
			++rep.upsilon_violations;
	}
	for (size_t h = 0; h < n; ++h) {
		if (rep.omega[h] == 0)
			continue;
		for (size_t i = 0; i < n; ++i) {
			if (rep.omega[i] == 0)
				continue;
			if (rep.upsilon[i] >= rep.upsilon[h] - tol && rep.gamma[i] > rep.gamma[h] + tol)
				++rep.program_violations[0];
			if (rep.dr1[i] <= rep.dr1[h] + tol && rep.dr2[i] > rep.dr2[h] + tol)
				++rep.program_violations[1];
			if (rep.dr2[i] >= rep.dr2[h] - tol && rep.dr1[i] < rep.dr1[h] - tol)
				++rep.program_violations[2];
			if (rep.r1[i] >= rep.r1[h] - tol && rep.r2[i] > rep.r2[h] + tol)
				++rep.program_violations[3];
			if (rep.r2[i] >= rep.r2[h] - tol && rep.r1[i] > rep.r1[h] + tol)
				++rep.program_violations[4];
		}
	}
	// the boundary point for a scaled move beats time sharing with the end point
	double g1 = std::hypot(start.rates.r1() - end.rates.r1(), end.rates.r2() - start.rates.r2());
	double u1 = (end.rates.r2() - start.rates.r2()) / (start.rates.r1() - end.rates.r1());
	for (size_t i = 0; i < n; ++i) {
		if (rep.omega[i] == 0 || rep.omega[i] == 1)
			continue;
		if (rep.upsilon[i] < u1 - tol || rep.gamma[i] < rep.omega[i] * g1 - tol)
			++rep.timeshare_violations;
	}
	auto own = try_step_metrics(start.rates, end.rates);
	if (n && rep.omega.back() == 1 && own)
		rep.identity_at_one = rep.gamma.back() == own->gamma && rep.upsilon.back() == own->upsilon;
	return rep;
}

} // namespace giclab
