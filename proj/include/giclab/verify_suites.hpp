#pragma once

// Verification suites shared by the CLI and the acceptance binary. Every
// suite draws from a fixed seed so reruns are byte-identical.

#include "check_report.hpp"
#include "converse_checks.hpp"
#include "mc_oracle.hpp"
#include "timeshare_envelope.hpp"

#include <cstdio>
#include <random>

namespace giclab {

inline std::string fmt(const char* f, auto... v)
{
	char buf[256];
	std::snprintf(buf, sizeof buf, f, v...);
	return buf;
}

inline std::string describe(const ChannelParams& c)
{
	return fmt("a=%.4g b=%.4g P1=%.4g P2=%.4g", c.a, c.b, c.p1, c.p2);
}

inline std::string describe(const PowerSplit& s)
{
	return fmt("split=(%.4g,%.4g,%.4g,%.4g)", s.pu1, s.pv1, s.pu2, s.pv2);
}

// a, b ~ U(0.05, 0.95); P1, P2 log-uniform on [0.5, 10]
template <class Rng>
ChannelParams random_weak_instance(Rng& rng)
{
	std::uniform_real_distribution<double> u(0, 1);
	ChannelParams c;
	c.a = 0.05 + 0.9 * u(rng);
	c.b = 0.05 + 0.9 * u(rng);
	c.p1 = 0.5 * std::pow(20.0, u(rng));
	c.p2 = 0.5 * std::pow(20.0, u(rng));
	return c;
}

inline const ChannelParams reference_channel{0.25, 0.25, 1, 1};

// The first reallocation step of the reference trace: 0.05 moved from U2 to V2.
inline std::pair<BoundarySample, BoundarySample> reference_step(const ChannelParams& c = reference_channel)
{
	auto tr = trace_incremental(c, 1, {0.05});
	if (tr.samples.size() < 2)
		throw PreconditionError("reference step unavailable");
	return {tr.samples[0], tr.samples[1]};
}

inline SuiteReport corner_suite(const ChannelParams& c = reference_channel)
{
	SuiteReport rep{"corner", {}, {}};
	auto k = corner_max_r1(c);
	double r1 = cap(c.p1, 1), r2 = cap(c.b * c.p2, c.p1 + 1);
	rep.add("corner R1", describe(c), std::abs(k.rates.r1() - r1), 0, k.rates.r1() == r1);
	rep.add("corner R2", describe(c), std::abs(k.rates.r2() - r2), 1e-12, std::abs(k.rates.r2() - r2) <= 1e-12);
	auto via = strategy_rates(c, k.split, CodingStrategy::corner_start);
	double d = std::max(std::abs(via.r1() - r1), std::abs(via.r2() - r2));
	rep.add("corner via strategy", describe(c), d, 1e-12, d <= 1e-12);
	rep.summary = fmt("R1=%.15g R2=%.15g", k.rates.r1(), k.rates.r2());
	return rep;
}

struct ReductionSuiteOptions {
	int instances = 25;
	int splits = 1000;
	std::uint64_t seed = 11;
};

inline SuiteReport reduction_suite(ReductionSuiteOptions o = {})
{
	SuiteReport rep{"reduction", {}, {}};
	std::mt19937_64 rng(o.seed);
	std::uniform_real_distribution<double> u(0, 1);
	double worst_gap = 0, worst_point = -INFINITY, worst_identity = 0;
	int gap_fail = 0, point_fail = 0;
	for (int i = 0; i < o.instances; ++i) {
		auto c = random_weak_instance(rng);
		for (int k = 1; k <= 9; ++k) {
			double mu = 0.1 * k;
			auto red = [&](const std::array<double, 2>& t) {
				return reduced_region_value(c, PowerSplit::from_fractions(c, t[0], t[1]), mu).objective;
			};
			auto full = [&](const std::array<double, 2>& t) {
				return solve_hk_lp(build_hk_constraints(c, PowerSplit::from_fractions(c, t[0], t[1])), mu).objective;
			};
			auto a = maximize_box<2>(red, {0, 0}, {1, 1});
			auto b = maximize_box<2>(full, {0, 0}, {1, 1});
			double gap = std::abs(b.value - a.value);
			worst_gap = std::max(worst_gap, gap);
			if (gap > 1e-6) {
				++gap_fail;
				rep.add("max-over-splits gap", describe(c) + fmt(" mu=%.1f", mu), gap, 1e-6, false);
			}
		}
		for (int j = 0; j < o.splits / o.instances; ++j) {
			auto s = PowerSplit::from_fractions(c, u(rng), u(rng));
			double mu = 0.1 + 0.8 * u(rng);
			auto r = verify_reduction_chain(c, s, mu);
			double d = r.reduced_value - r.full_value;
			worst_point = std::max(worst_point, d);
			if (d > 1e-9)
				++point_fail;
			for (auto& ch : r.checks)
				if (ch.name != "reduced <= full")
					worst_identity = std::max(worst_identity, ch.holds ? 0.0 : std::abs(ch.lhs - ch.rhs));
		}
	}
	rep.add("max-over-splits gap (all)", fmt("%d instances x 9 mu", o.instances), worst_gap, 1e-6, gap_fail == 0);
	rep.add("reduced - full pointwise", fmt("%d splits", o.splits), worst_point, 1e-9, point_fail == 0);
	rep.add("dropped constraints implied", fmt("%d splits", o.splits), worst_identity, 1e-12, worst_identity == 0);
	rep.summary = fmt("max gap %.3g bits (%d of %d fail), pointwise max %.3g", worst_gap, gap_fail, o.instances * 9,
		worst_point);
	return rep;
}

struct MonotonicitySuiteOptions {
	int random_instances = 4;
	int steps = 40;
	std::uint64_t seed = 3;
};

inline SuiteReport monotonicity_suite(MonotonicitySuiteOptions o = {})
{
	SuiteReport rep{"monotonicity", {}, {}};
	std::mt19937_64 rng(o.seed);
	std::vector<ChannelParams> inst{reference_channel};
	for (int i = 0; i < o.random_instances; ++i)
		inst.push_back(random_weak_instance(rng));
	int checked = 0;
	for (auto& c : inst) {
		// equal R1 losses spanning the corner down to the equal-weight optimum
		double r1_end = optimize_split(c, 0.999).rates.r1();
		double dr1 = (corner_max_r1(c).rates.r1() - r1_end) / o.steps;
		if (!(dr1 > 0))
			continue;
		auto tr = trace_equal_steps(c, dr1, 4 * o.steps);
		auto starts = tr.segment_starts;
		starts.push_back(tr.samples.size() - 1);
		for (size_t k = 0; k + 1 < starts.size(); ++k) {
			std::vector<BoundarySample> seg(tr.samples.begin() + starts[k], tr.samples.begin() + starts[k + 1] + 1);
			if (seg.size() < 21)
				continue;
			auto m = check_monotonicity(seg);
			++checked;
			rep.add("segment " + std::to_string(k), describe(c) + fmt(" steps=%d", m.steps),
				std::max(m.worst_upsilon, m.worst_gamma), 1e-9, m.ok());
		}
	}
	rep.summary = fmt("%d segments with >= 20 steps", checked);
	if (checked == 0)
		rep.add("segments checked", "", 0, 1, false);
	return rep;
}

inline SuiteReport theorem10_suite(int points = 64, const ChannelParams& c = reference_channel)
{
	SuiteReport rep{"scaled_moves", {}, {}};
	auto [start, end] = reference_step(c);
	std::vector<double> w(points);
	for (int i = 0; i < points; ++i)
		w[i] = double(i) / (points - 1);
	auto r = verify_theorem10(c, start, end, w, 1e-10);
	rep.add("Gamma non-decreasing", describe(c), r.gamma_violations, 0, r.gamma_violations == 0);
	rep.add("Upsilon non-increasing", describe(c), r.upsilon_violations, 0, r.upsilon_violations == 0);
	int prog = 0;
	for (int p : r.program_violations)
		prog += p;
	rep.add("constrained programs", describe(c), prog, 0, prog == 0);
	rep.add("beats time sharing", describe(c), r.timeshare_violations, 0, r.timeshare_violations == 0);
	rep.add("omega=1 reproduces the step", describe(c), !r.identity_at_one, 0, r.identity_at_one);
	rep.summary = fmt("%d-point omega grid, %d violations", points, r.violations());
	return rep;
}

// Which functionals a variational suite covers.
enum class VariationalSuite { entropy, mutual_info, rates, all };

inline VariationalSuite parse_variational_suite(const std::string& s)
{
	if (s == "entropy")
		return VariationalSuite::entropy;
	if (s == "mi" || s == "mutual_info")
		return VariationalSuite::mutual_info;
	if (s == "rates")
		return VariationalSuite::rates;
	if (s == "all")
		return VariationalSuite::all;
	throw PreconditionError("unknown variational suite: " + s);
}

struct VariationalOptions {
	int n = 2048;
	double sigmas = 10;
	double eps = 1e-3;
	int perturbations = 50;
	std::uint64_t seed = 5;
	double threshold = 1e-3;
};

// First variations at Gaussian cores, at the end split of the reference
// step and at a generic split, under moment-preserving perturbations.
inline SuiteReport stationarity_suite(VariationalSuite which = VariationalSuite::all, VariationalOptions o = {},
	const ChannelParams& c = reference_channel)
{
	SuiteReport rep{"stationarity", {}, {}};
	auto [start, end] = reference_step(c);
	std::mt19937_64 rng(o.seed);
	double worst = 0;
	int total = 0;
	bool want_h = which == VariationalSuite::entropy || which == VariationalSuite::all;
	bool want_mi = which == VariationalSuite::mutual_info || which == VariationalSuite::all;
	bool want_r = which == VariationalSuite::rates || which == VariationalSuite::all;
	for (auto split : {end.split, PowerSplit::from_fractions(c, 0.3, 0.4)}) {
		auto st = CodingStrategy::sd_at_y2;
		Grid g = variational_grid(c, split, o.n, o.sigmas);
		auto cores = gaussian_cores(g, split);
		CompoundEngine eng(c, cores);
		double clipped = 0;
		for (auto rx : {Receiver::Y1, Receiver::Y2})
			for (unsigned b = 0; b < 16; ++b)
				clipped = std::max(clipped, entropy_audit(eng.compound(rx, MessageSet::from_bits(b)), g.dx()).clipped);
		rep.add("clipped entropy contribution", describe(split), clipped, 1e-9, clipped < 1e-9);
		RateWiring wiring;
		strategy_rates(c, split, st, &wiring);
		std::vector<MiTerm> terms;
		for (auto* e : {&wiring.ru1, &wiring.rv1, &wiring.ru2, &wiring.rv2})
			for (auto& [k, t] : e->terms)
				if (std::none_of(terms.begin(), terms.end(),
						[&](const MiTerm& u) { return u.str() == t.str(); }))
					terms.push_back(t);
		for (int m = 0; m < 4; ++m) {
			if (!(cores[m].variance() > 0))
				continue;
			std::vector<std::pair<std::string, FunctionalSpec>> specs;
			if (want_h)
				specs.push_back({"entropy", entropy_functional(m)});
			if (want_mi)
				for (auto& t : terms)
					specs.push_back({t.str(), mi_functional(t)});
			if (want_r)
				for (auto k : {Functional::Upsilon, Functional::DeltaR1, Functional::DeltaR2})
					specs.push_back({functional_name(k), rate_functional(k, c, start.rates, split, st)});
			std::vector<Perturbation> hs;
			for (int i = 0; i < o.perturbations; ++i)
				hs.push_back(random_perturbation(cores[m], rng));
			for (auto& [name, spec] : specs) {
				double mx = 0;
				int rich_fail = 0;
				for (auto& h : hs) {
					auto fv = first_variation(spec, eng, m, h, o.eps);
					mx = std::max(mx, std::abs(fv.derivative));
					rich_fail += !fv.richardson_ok;
					++total;
				}
				worst = std::max(worst, mx);
				rep.add(fmt("first variation %s wrt %s", name.c_str(), msg_name(m)), describe(split), mx, o.threshold,
					mx < o.threshold && rich_fail == 0);
				if (rich_fail)
					rep.add(fmt("richardson %s wrt %s", name.c_str(), msg_name(m)), describe(split), rich_fail, 0,
						false);
			}
		}
	}
	rep.summary = fmt("%d evaluations, max |dF| = %.3g nats", total, worst);
	return rep;
}

inline double inverse_fisher_term(const GridDensity& f, const Perturbation& h)
{
	double s = 0;
	for (int i = 0; i < f.grid().n; ++i)
		if (f[i] > 0)
			s += h.h[i] * h.h[i] / f[i];
	return -s * f.grid().dx();
}

// Entropy second variation against -int h^2 / f; Upsilon and the (dR1, dR2)
// pair must not be flat along any tested perturbation.
inline SuiteReport second_variation_suite(int perturbations = 20, VariationalOptions o = {},
	const ChannelParams& c = reference_channel)
{
	o.perturbations = perturbations;
	SuiteReport rep{"second_variation", {}, {}};
	auto [start, end] = reference_step(c);
	auto split = end.split;
	auto st = CodingStrategy::sd_at_y2;
	Grid g = variational_grid(c, split, o.n, o.sigmas);
	auto cores = gaussian_cores(g, split);
	CompoundEngine eng(c, cores);
	auto ups = rate_functional(Functional::Upsilon, c, start.rates, split, st);
	auto d1 = rate_functional(Functional::DeltaR1, c, start.rates, split, st);
	auto d2 = rate_functional(Functional::DeltaR2, c, start.rates, split, st);
	std::mt19937_64 rng(o.seed + 1);
	double min_u = INFINITY, min_p = INFINITY, worst_rel = 0;
	for (int m = 0; m < 4; ++m) {
		if (!(cores[m].variance() > 0))
			continue;
		double rel = 0, mu_ = INFINITY, mp = INFINITY, max_h = -INFINITY;
		for (int i = 0; i < o.perturbations; ++i) {
			auto h = random_perturbation(cores[m], rng);
			auto e = second_variation(entropy_functional(m), eng, m, h, o.eps);
			double ref = inverse_fisher_term(cores[m], h);
			max_h = std::max(max_h, e.estimate);
			rel = std::max(rel, std::abs(e.estimate - ref) / std::abs(ref));
			mu_ = std::min(mu_, std::abs(second_variation(ups, eng, m, h, o.eps).analytic));
			double a = std::abs(second_variation(d1, eng, m, h, o.eps).analytic);
			double b = std::abs(second_variation(d2, eng, m, h, o.eps).analytic);
			mp = std::min(mp, std::max(a, b));
		}
		std::string core = msg_name(m);
		rep.add("entropy second variation < 0 wrt " + core, describe(split), max_h, 0, max_h < 0);
		rep.add("entropy second variation vs -int h^2/f wrt " + core, describe(split), rel, 0.05, rel <= 0.05);
		rep.add("|Upsilon second variation| wrt " + core, describe(split), mu_, 1e-6, mu_ > 1e-6);
		rep.add("|(dR1, dR2) second variation| wrt " + core, describe(split), mp, 1e-6, mp > 1e-6);
		min_u = std::min(min_u, mu_);
		min_p = std::min(min_p, mp);
		worst_rel = std::max(worst_rel, rel);
	}
	rep.summary = fmt("entropy rel err %.3g, min |Upsilon''| %.3g, min |dR''| %.3g", worst_rel, min_u, min_p);
	return rep;
}

struct TwoPhaseSuiteOptions {
	int instances = 10;
	int resolution = 32;
	std::uint64_t seed = 7;
};

inline SuiteReport two_phase_suite(TwoPhaseSuiteOptions o = {})
{
	SuiteReport rep{"two_phase", {}, {}};
	std::mt19937_64 rng(o.seed);
	std::uniform_real_distribution<double> u(0, 1);
	double worst = -INFINITY;
	for (int i = 0; i < o.instances; ++i) {
		auto c = random_weak_instance(rng);
		double mu = 0.1 + 0.8 * u(rng);
		auto r = three_phase_check(c, mu, o.resolution);
		worst = std::max(worst, r.improvement);
		rep.add("three-phase improvement", describe(c) + fmt(" mu=%.4g", mu), r.improvement, 1e-6,
			r.improvement <= 1e-6);
	}
	rep.summary = fmt("max improvement %.3g bits over %d instances", worst, o.instances);
	return rep;
}

inline MiTerm random_term(std::mt19937_64& rng)
{
	std::uniform_int_distribution<int> rx(0, 1), pick(1, 15), cover(0, 15);
	MessageSet sig = MessageSet::from_bits(unsigned(pick(rng)));
	MessageSet giv = MessageSet::from_bits(unsigned(cover(rng))) & ~sig;
	return {rx(rng) ? Receiver::Y2 : Receiver::Y1, sig, giv};
}

struct OracleOptions {
	int instances = 100;
	std::size_t samples = 1000000;
	std::uint64_t seed = 13;
	GridSpec grid{};
};

inline SuiteReport oracle_suite(OracleOptions o = {})
{
	SuiteReport rep{"oracle", {}, {}};
	std::mt19937_64 rng(o.seed);
	std::uniform_real_distribution<double> u(0, 1);
	auto shapes = law_family(LawKind::Gaussian);
	double worst_grid = 0, worst_mc = 0;
	int fail_grid = 0, fail_mc = 0;
	for (int i = 0; i < o.instances; ++i) {
		auto c = random_weak_instance(rng);
		auto s = PowerSplit::from_fractions(c, u(rng), u(rng));
		auto t = random_term(rng);
		double exact = gaussian_mi(c, s, t.rx, t.signal, t.given);
		auto laws = laws_at(shapes, s);
		auto gm = grid_mi(c, s, laws, t.rx, t.signal, t.given, o.grid);
		auto mm = mc_mi(c, s, laws, t.rx, t.signal, t.given, o.samples, o.seed, std::uint64_t(i));
		double eg = std::abs(gm.value - exact), em = std::abs(mm.value - exact);
		double tol_mc = std::max(3 * mm.uncertainty, 1e-2);
		worst_grid = std::max(worst_grid, eg);
		worst_mc = std::max(worst_mc, em / tol_mc);
		std::string inst = describe(c) + " " + describe(s) + " " + t.str();
		if (eg > 1e-4) {
			++fail_grid;
			rep.add("grid_mi error", inst, eg, 1e-4, false);
		}
		if (em > tol_mc) {
			++fail_mc;
			rep.add("mc_mi error", inst, em, tol_mc, false);
		}
	}
	rep.add("grid_mi max error", fmt("%d instances", o.instances), worst_grid, 1e-4, fail_grid == 0);
	rep.add("mc_mi max error / tolerance", fmt("%d instances", o.instances), worst_mc, 1, fail_mc == 0);
	rep.summary = fmt("grid max err %.3g bits, mc max err/tol %.3g", worst_grid, worst_mc);
	return rep;
}

struct ProbeSuiteOptions {
	std::vector<double> mu_grid{0.25, 0.5, 0.75};
	int split_resolution = 9;
	GridSpec grid{};
	double tol = 2e-3;
	bool gaussian_self_test = true;
};

inline SuiteReport probe_suite(std::vector<LawKind> laws, ProbeSuiteOptions o = {},
	const ChannelParams& c = reference_channel)
{
	SuiteReport rep{"probe", {}, {}};
	if (o.gaussian_self_test) {
		auto g = non_gaussian_probe(c, o.mu_grid, law_family(LawKind::Gaussian), o.split_resolution, o.grid, o.tol);
		double floor = 0;
		for (auto& p : g.points)
			floor = std::max(floor, std::abs(p.gap));
		rep.add("gaussian self-test |gap|", describe(c), floor, o.tol, floor <= o.tol);
	}
	std::string s;
	for (auto k : laws) {
		auto r = non_gaussian_probe(c, o.mu_grid, law_family(k), o.split_resolution, o.grid, o.tol);
		for (auto& p : r.points)
			rep.add(fmt("%s gap", law_name(k)), describe(c) + fmt(" mu=%.4g", p.mu), p.gap, o.tol,
				!p.unresolved && p.gap <= o.tol);
		s += fmt("%s%s max gap %.3g", s.empty() ? "" : "; ", law_name(k), r.max_gap);
	}
	rep.summary = s;
	return rep;
}

struct StructureOptions {
	int instances = 100;
	std::uint64_t seed = 17;
};

inline SuiteReport successive_decoding_suite(StructureOptions o = {})
{
	SuiteReport rep{"successive_decoding", {}, {}};
	std::mt19937_64 rng(o.seed);
	std::uniform_real_distribution<double> u(0, 1);
	int fails = 0;
	double worst_chain = 0;
	for (int i = 0; i < o.instances; ++i) {
		auto c = random_weak_instance(rng);
		auto s = PowerSplit::from_fractions(c, u(rng), u(rng));
		for (double mu : {0.3, 0.7}) {
			auto r = verify_successive_decoding_theorem(c, s, mu);
			if (!r.holds) {
				++fails;
				rep.add("successive decoding pattern", describe(c) + " " + describe(s) + fmt(" mu=%.1f", mu), 0, 1,
					false);
			}
		}
		for (auto rx : {Receiver::Y1, Receiver::Y2})
			worst_chain = std::max(worst_chain, chain_identity(c, s, rx).gap());
	}
	rep.add("successive decoding pattern", fmt("%d instances x 2 mu", o.instances), fails, 0, fails == 0);
	rep.add("chain identity", fmt("%d instances x 2 receivers", o.instances), worst_chain, 1e-12, worst_chain <= 1e-12);
	rep.summary = fmt("%d pattern failures, identity gap %.3g", fails, worst_chain);
	return rep;
}

struct ConverseOptions {
	int instances = 1000;
	std::uint64_t seed = 19;
};

// Inequalities of the converse system must hold for every split; the
// prescribed equalities are counted, not enforced.
inline SuiteReport converse_suite(ConverseOptions o = {})
{
	SuiteReport rep{"converse", {}, {}};
	std::mt19937_64 rng(o.seed);
	std::uniform_real_distribution<double> u(0, 1);
	int viol = 0, eq_fail = 0;
	for (int i = 0; i < o.instances; ++i) {
		auto c = random_weak_instance(rng);
		auto s = PowerSplit::from_fractions(c, u(rng), u(rng));
		for (auto st : {CodingStrategy::sd_at_y2, CodingStrategy::mirror}) {
			auto r = converse_rate_check(c, s, st);
			for (auto& q : r.inequalities)
				if (!q.holds) {
					++viol;
					rep.add(q.label, describe(c) + " " + describe(s), q.lhs - q.rhs, 0, false);
				}
			eq_fail += !r.equalities_hold();
		}
	}
	rep.add("converse inequalities", fmt("%d instances x 2 strategies", o.instances), viol, 0, viol == 0);
	auto corner = converse_rate_check(reference_channel, corner_max_r1(reference_channel).split);
	int held = 0;
	for (auto& q : corner.equalities)
		held += q.holds;
	rep.summary = fmt("%d inequality violations; equalities short on %d of %d; corner equalities %d of %zu", viol,
		eq_fail, 2 * o.instances, held, corner.equalities.size());
	return rep;
}

} // namespace giclab
