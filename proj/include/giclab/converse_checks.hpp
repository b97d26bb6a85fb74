#pragma once

#include "hk_lp.hpp"

#include <algorithm>
#include <cmath>

namespace giclab {

// Eight bounds that hold for any code-books and any decoding of the public
// messages. Coefficients over (ru1, ru2, rv1, rv2).
struct RateBound {
	std::array<double, 4> coef;
	double rhs;
	std::string label;
	MiTerm term;
};

struct PublicRateLp {
	std::vector<RateBound> rows;
};

inline PublicRateLp build_public_rate_lp(const ChannelParams& c, const PowerSplit& s)
{
	const auto Y1 = Receiver::Y1, Y2 = Receiver::Y2;
	struct Row {
		std::array<double, 4> coef;
		const char* var;
		MiTerm t;
	};
	const Row rows[] = {
		{{0, 0, 1, 0}, "rv1", {Y1, {V1}, {U1, U2}}},
		{{0, 0, 0, 1}, "rv2", {Y2, {V2}, {U1, U2}}},
		{{1, 0, 0, 0}, "ru1", {Y1, {U1}, {U2}}},
		{{1, 0, 0, 0}, "ru1", {Y2, {U1}, {U2}}},
		{{0, 1, 0, 0}, "ru2", {Y1, {U2}, {U1}}},
		{{0, 1, 0, 0}, "ru2", {Y2, {U2}, {U1}}},
		{{1, 1, 0, 0}, "ru1+ru2", {Y1, {U1, U2}, {}}},
		{{1, 1, 0, 0}, "ru1+ru2", {Y2, {U1, U2}, {}}},
	};
	PublicRateLp lp;
	for (auto& r : rows)
		lp.rows.push_back({r.coef, gaussian_mi(c, s, r.t.rx, r.t.signal, r.t.given),
			std::string(r.var) + "<=" + r.t.str(), r.t});
	return lp;
}

struct SuccessiveDecodingReport {
	LpSolution lp;
	std::vector<std::string> active_individual; // active single public-rate bounds
	bool both_joint_active = false;
	// slack of the favoured single bound at each receiver whose joint bound
	// is active: ru1 side for mu < 1, ru2 side for mu > 1; NaN otherwise
	std::array<double, 2> kappa{NAN, NAN};
	bool holds = false; // a single public-rate bound is active or some kappa is zero
	std::string decoding_order; // implied by the first active single bound
};

// Max of ru1 + rv1 + mu (ru2 + rv2) over the eight bounds; the optimum
// must put a single public-rate bound with equality, i.e. one receiver
// decodes the public messages successively.
inline SuccessiveDecodingReport verify_successive_decoding_theorem(const ChannelParams& c, const PowerSplit& s,
	double mu)
{
	s.validate(c);
	if (!(mu > 0) || mu == 1)
		throw PreconditionError("mu must be positive and different from 1");
	auto lp = build_public_rate_lp(c, s);
	std::vector<std::array<double, 4>> coef;
	std::vector<double> rhs;
	std::vector<std::string> labels;
	for (auto& r : lp.rows) {
		coef.push_back(r.coef);
		rhs.push_back(r.rhs);
		labels.push_back(r.label);
	}
	SuccessiveDecodingReport rep;
	rep.lp = detail::solve_rate_lp(coef, rhs, labels, {1, mu, 1, mu});
	auto active = [&](int i) {
		return std::find(rep.lp.active_set.begin(), rep.lp.active_set.end(), lp.rows[i].label) !=
			rep.lp.active_set.end();
	};
	// rows 2..5 are the single public-rate bounds
	static const char* order[] = {"U2 then U1 at Y1", "U2 then U1 at Y2", "U1 then U2 at Y1", "U1 then U2 at Y2"};
	// the bounds favoured by the mu regime are listed first
	const int rows_lo[] = {2, 3, 4, 5}, rows_hi[] = {4, 5, 2, 3};
	for (int i : mu < 1 ? rows_lo : rows_hi)
		if (active(i)) {
			if (rep.active_individual.empty())
				rep.decoding_order = order[i - 2];
			rep.active_individual.push_back(lp.rows[i].label);
		}
	rep.both_joint_active = active(6) && active(7);
	const auto& r = rep.lp.rates;
	bool kappa_zero = false;
	for (int k = 0; k < 2; ++k)
		if (active(6 + k)) {
			int row = mu < 1 ? 2 + k : 4 + k;
			rep.kappa[k] = lp.rows[row].rhs - (mu < 1 ? r.ru1 : r.ru2);
			kappa_zero = kappa_zero || std::abs(rep.kappa[k]) <= 1e-9;
		}
	rep.holds = !rep.active_individual.empty() || kappa_zero;
	return rep;
}

// I(U1;Y2|U2) - I(U1;Y2) against I(U2;Y2|U1) - I(U2;Y2).
struct ChainIdentity {
	double e = 0, f = 0;
	double gap() const { return std::abs(e - f); }
};

inline ChainIdentity chain_identity(const ChannelParams& c, const PowerSplit& s, Receiver rx = Receiver::Y2)
{
	auto mi = [&](MessageSet a, MessageSet g) { return gaussian_mi(c, s, rx, a, g); };
	return {mi({U1}, {U2}) - mi({U1}, {}), mi({U2}, {U1}) - mi({U2}, {})};
}

struct ConverseItem {
	std::string label;
	double lhs = 0, rhs = 0;
	bool holds = false;
};

struct ConverseReport {
	RateQuadruple rates;
	std::vector<ConverseItem> inequalities; // must all hold
	std::vector<ConverseItem> equalities;   // reported
	bool inequalities_hold() const
	{
		for (auto& i : inequalities)
			if (!i.holds)
				return false;
		return true;
	}
	bool equalities_hold() const
	{
		for (auto& i : equalities)
			if (!i.holds)
				return false;
		return true;
	}
};

// Checks the strategy's rate quadruple against the single-letter converse
// system (public messages decoded successively at Y2, U2 first; the mirror
// strategy uses the system with users and receivers swapped).
inline ConverseReport converse_rate_check(const ChannelParams& c, const PowerSplit& s,
	CodingStrategy st = CodingStrategy::sd_at_y2, double tol = 1e-12)
{
	s.validate(c);
	ConverseReport rep;
	rep.rates = strategy_rates(c, s, st);
	bool mirror = st == CodingStrategy::mirror;
	Receiver ra = mirror ? Receiver::Y1 : Receiver::Y2, rb = mirror ? Receiver::Y2 : Receiver::Y1;
	Msg first = mirror ? U1 : U2, second = mirror ? U2 : U1;
	auto mi = [&](Receiver rx, MessageSet a, MessageSet g) { return gaussian_mi(c, s, rx, a, g); };
	auto& r = rep.rates;
	double r_second = mirror ? r.ru2 : r.ru1, r_first = mirror ? r.ru1 : r.ru2;
	double i_second = mi(ra, {second}, {first});
	double i_first = mi(ra, {first}, {});
	double joint_b = mi(rb, {U1, U2}, {});
	double iv1 = mi(Receiver::Y1, {V1}, {U1, U2}), iv2 = mi(Receiver::Y2, {V2}, {U1, U2});
	std::string A = mirror ? "Y1" : "Y2", B = mirror ? "Y2" : "Y1";
	std::string S = msg_name(second), F = msg_name(first);
	struct Row {
		std::string label;
		double lhs, rhs;
	};
	std::vector<Row> rows = {
		{"r" + S + " = I(" + S + ";" + A + "|" + F + ")", r_second, i_second},
		{"r" + F + " = I(" + F + ";" + A + ")", r_first, i_first},
		{"rU1+rU2 = I(U1,U2;" + B + ")", r.ru1 + r.ru2, joint_b},
		{"rU1+rU2 = I(" + F + ";" + A + ")+I(" + S + ";" + A + "|" + F + ")", r.ru1 + r.ru2, i_first + i_second},
		{"rV1 = I(V1;Y1|U1,U2)", r.rv1, iv1},
		{"rV2 = I(V2;Y2|U1,U2)", r.rv2, iv2},
		{"R1 = rU1 + rV1 bound", r.r1(), (mirror ? i_first : i_second) + iv1},
		{"R2 = rU2 + rV2 bound", r.r2(), (mirror ? i_second : i_first) + iv2},
	};
	for (std::size_t i = 0; i < rows.size(); ++i) {
		auto& row = rows[i];
		double t = tol * std::max(1.0, std::abs(row.rhs));
		rep.inequalities.push_back({row.label, row.lhs, row.rhs, row.lhs <= row.rhs + t});
		// equalities prescribed for the public and private rates
		if (i < 6)
			rep.equalities.push_back({row.label, row.lhs, row.rhs, std::abs(row.lhs - row.rhs) <= t});
	}
	return rep;
}

} // namespace giclab
