#pragma once

#include "gaussian_rates.hpp"
#include "simplex.hpp"

#include <array>
#include <string>
#include <vector>

namespace giclab {

// LP variable order is (ru1, ru2, rv1, rv2).
struct HkConstraint {
	std::array<double, 4> coef;
	double rhs;
	std::string label;
	MiTerm term;
};

struct HkConstraintSet {
	std::vector<HkConstraint> rows;
};

namespace detail {
struct HkPattern {
	std::array<double, 4> coef;
	Receiver rx;
	MessageSet signal, given;
};

inline const std::array<HkPattern, 14>& hk_patterns()
{
	const auto Y1 = Receiver::Y1, Y2 = Receiver::Y2;
	static const std::array<HkPattern, 14> p{{
		{{1, 0, 0, 0}, Y1, {U1}, {U2, V1}},
		{{1, 0, 0, 0}, Y2, {U1}, {U2, V2}},
		{{0, 1, 0, 0}, Y1, {U2}, {U1, V1}},
		{{0, 1, 0, 0}, Y2, {U2}, {U1, V2}},
		{{0, 0, 1, 0}, Y1, {V1}, {U1, U2}},
		{{0, 0, 0, 1}, Y2, {V2}, {U1, U2}},
		{{1, 1, 0, 0}, Y1, {U1, U2}, {V1}},
		{{1, 1, 0, 0}, Y2, {U1, U2}, {V2}},
		{{1, 0, 1, 0}, Y1, {U1, V1}, {U2}},
		{{0, 1, 0, 1}, Y2, {U2, V2}, {U1}},
		{{0, 1, 1, 0}, Y1, {U2, V1}, {U1}},
		{{1, 0, 0, 1}, Y2, {U1, V2}, {U2}},
		{{1, 1, 1, 0}, Y1, {U1, U2, V1}, {}},
		{{1, 1, 0, 1}, Y2, {U1, U2, V2}, {}},
	}};
	return p;
}
} // namespace detail

inline HkConstraintSet build_hk_constraints(const ChannelParams& c, const PowerSplit& s)
{
	HkConstraintSet cs;
	int k = 1;
	for (auto& p : detail::hk_patterns()) {
		MiTerm t{p.rx, p.signal, p.given};
		cs.rows.push_back({p.coef, gaussian_mi(c, s, p.rx, p.signal, p.given),
			"HK" + std::to_string(k++), t});
	}
	return cs;
}

struct LpSolution {
	RateQuadruple rates;
	double objective = 0;
	double dual_objective = 0;
	std::vector<std::string> active_set;
	LpStatus status = LpStatus::infeasible;
	bool degenerate = false;
};

namespace detail {
inline std::vector<std::string> active_labels(const std::vector<std::array<double, 4>>& coef,
	const std::vector<double>& rhs, const std::vector<std::string>& labels, const std::vector<double>& x,
	double tol = 1e-9)
{
	static const char* var[] = {"ru1>=0", "ru2>=0", "rv1>=0", "rv2>=0"};
	std::vector<std::string> act;
	for (size_t i = 0; i < coef.size(); ++i) {
		double lhs = 0;
		for (int j = 0; j < 4; ++j)
			lhs += coef[i][j] * x[j];
		if (std::abs(lhs - rhs[i]) <= tol)
			act.push_back(labels[i]);
	}
	for (int j = 0; j < 4; ++j)
		if (x[j] <= 1e-12)
			act.push_back(var[j]);
	return act;
}

// Solves max w'x over {A x <= b, x >= 0}; on a flat optimum returns the
// lexicographically smallest optimal vertex in (x0, x1, x2, x3).
inline LpSolution solve_rate_lp(const std::vector<std::array<double, 4>>& coef, const std::vector<double>& rhs,
	const std::vector<std::string>& labels, const std::array<double, 4>& w)
{
	using Mat = std::vector<std::vector<double>>;
	Mat A;
	for (auto& r : coef)
		A.push_back({r[0], r[1], r[2], r[3]});
	std::vector<double> b = rhs, c(w.begin(), w.end());
	auto res = simplex_max(A, b, c);
	LpSolution sol;
	sol.status = res.status;
	if (res.status != LpStatus::optimal)
		return sol;
	sol.objective = res.objective;
	sol.dual_objective = res.dual_objective;
	sol.degenerate = res.flat;
	std::vector<double> x = res.x;
	if (res.flat) {
		// stay on the optimal face, then minimise coordinates in order
		Mat A2 = A;
		std::vector<double> b2 = b;
		A2.push_back({-w[0], -w[1], -w[2], -w[3]});
		b2.push_back(-(res.objective - 1e-12 * std::max(1.0, std::abs(res.objective))));
		for (int k = 0; k < 4; ++k) {
			std::vector<double> ck(4, 0.0);
			ck[k] = -1;
			auto r2 = simplex_max(A2, b2, ck);
			if (r2.status != LpStatus::optimal)
				break;
			x = r2.x;
			std::vector<double> row(4, 0.0);
			row[k] = 1;
			A2.push_back(row);
			b2.push_back(x[k] + 1e-13);
		}
		sol.objective = w[0] * x[0] + w[1] * x[1] + w[2] * x[2] + w[3] * x[3];
	}
	sol.rates = {x[0], x[2], x[1], x[3]};
	sol.active_set = active_labels(coef, rhs, labels, x);
	return sol;
}
} // namespace detail

inline LpSolution solve_hk_lp(const HkConstraintSet& cs, double mu)
{
	if (!(mu > 0))
		throw PreconditionError("mu must be positive");
	std::vector<std::array<double, 4>> coef;
	std::vector<double> rhs;
	std::vector<std::string> labels;
	for (auto& r : cs.rows) {
		if (!std::isfinite(r.rhs))
			throw PreconditionError("non-finite constraint bound");
		coef.push_back(r.coef);
		rhs.push_back(r.rhs);
		labels.push_back(r.label);
	}
	return detail::solve_rate_lp(coef, rhs, labels, {1, mu, 1, mu});
}

struct ReducedValue {
	double objective;
	RateQuadruple rates;
};

inline ReducedValue reduced_region_value(const ChannelParams& c, const PowerSplit& s, double mu)
{
	RateQuadruple r = strategy_rates(c, s, strategy_for_mu(mu));
	return {r.weighted(mu), r};
}

struct ImplicationCheck {
	std::string name;
	double lhs, rhs;
	bool holds;
};

struct ReductionReport {
	std::vector<ImplicationCheck> checks;
	double reduced_value = 0, full_value = 0;
	bool all_hold() const
	{
		for (auto& c : checks)
			if (!c.holds)
				return false;
		return true;
	}
};

// Each dropped constraint of the full system is implied by the reduced one
// either through conditioning (bound <= bound) or through a chain-rule identity.
inline ReductionReport verify_reduction_chain(const ChannelParams& c, const PowerSplit& s, double mu,
	double tol = 1e-12)
{
	const auto Y1 = Receiver::Y1, Y2 = Receiver::Y2;
	auto I = [&](Receiver rx, MessageSet sig, MessageSet giv) { return gaussian_mi(c, s, rx, sig, giv); };
	ReductionReport rep;
	auto le = [&](std::string n, double l, double r) { rep.checks.push_back({n, l, r, l <= r + tol}); };
	auto eq = [&](std::string n, double l, double r) {
		rep.checks.push_back({n, l, r, std::abs(l - r) <= tol});
	};
	le("I(U1;Y1|U2) <= I(U1;Y1|U2,V1)", I(Y1, {U1}, {U2}), I(Y1, {U1}, {U2, V1}));
	le("I(U1;Y2|U2) <= I(U1;Y2|U2,V2)", I(Y2, {U1}, {U2}), I(Y2, {U1}, {U2, V2}));
	le("I(U2;Y1|U1) <= I(U2;Y1|U1,V1)", I(Y1, {U2}, {U1}), I(Y1, {U2}, {U1, V1}));
	le("I(U2;Y2|U1) <= I(U2;Y2|U1,V2)", I(Y2, {U2}, {U1}), I(Y2, {U2}, {U1, V2}));
	le("I(U1,U2;Y1) <= I(U1,U2;Y1|V1)", I(Y1, {U1, U2}, {}), I(Y1, {U1, U2}, {V1}));
	le("I(U1,U2;Y2) <= I(U1,U2;Y2|V2)", I(Y2, {U1, U2}, {}), I(Y2, {U1, U2}, {V2}));
	double pv1 = I(Y1, {V1}, {U1, U2}), pv2 = I(Y2, {V2}, {U1, U2});
	eq("I(U1,V1;Y1|U2) = I(U1;Y1|U2) + I(V1;Y1|U1,U2)", I(Y1, {U1, V1}, {U2}), I(Y1, {U1}, {U2}) + pv1);
	eq("I(U2,V2;Y2|U1) = I(U2;Y2|U1) + I(V2;Y2|U1,U2)", I(Y2, {U2, V2}, {U1}), I(Y2, {U2}, {U1}) + pv2);
	eq("I(U2,V1;Y1|U1) = I(U2;Y1|U1) + I(V1;Y1|U1,U2)", I(Y1, {U2, V1}, {U1}), I(Y1, {U2}, {U1}) + pv1);
	eq("I(U1,V2;Y2|U2) = I(U1;Y2|U2) + I(V2;Y2|U1,U2)", I(Y2, {U1, V2}, {U2}), I(Y2, {U1}, {U2}) + pv2);
	eq("I(U1,U2,V1;Y1) = I(U1,U2;Y1) + I(V1;Y1|U1,U2)", I(Y1, {U1, U2, V1}, {}), I(Y1, {U1, U2}, {}) + pv1);
	eq("I(U1,U2,V2;Y2) = I(U1,U2;Y2) + I(V2;Y2|U1,U2)", I(Y2, {U1, U2, V2}, {}), I(Y2, {U1, U2}, {}) + pv2);
	rep.reduced_value = reduced_region_value(c, s, mu).objective;
	rep.full_value = solve_hk_lp(build_hk_constraints(c, s), mu).objective;
	rep.checks.push_back({"reduced <= full", rep.reduced_value, rep.full_value,
		rep.reduced_value <= rep.full_value + 1e-9});
	return rep;
}

} // namespace giclab
