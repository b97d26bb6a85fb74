#pragma once

#include "channel_model.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

namespace giclab {

struct OverlappingSets : Error { using Error::Error; };

enum class Receiver { Y1, Y2 };
enum Msg : int { U1 = 0, V1 = 1, U2 = 2, V2 = 3 };

inline const char* msg_name(int m)
{
	static const char* n[] = {"U1", "V1", "U2", "V2"};
	return n[m];
}

struct MessageSet {
	std::uint8_t bits = 0;

	constexpr MessageSet() = default;
	constexpr MessageSet(std::initializer_list<Msg> ms)
	{
		for (Msg m : ms)
			bits |= std::uint8_t(1u << m);
	}
	static constexpr MessageSet from_bits(unsigned b)
	{
		MessageSet s;
		s.bits = std::uint8_t(b & 15u);
		return s;
	}
	static constexpr MessageSet all() { return from_bits(15); }

	constexpr bool has(int m) const { return bits >> m & 1u; }
	constexpr bool empty() const { return bits == 0; }
	constexpr MessageSet operator|(MessageSet o) const { return from_bits(bits | o.bits); }
	constexpr MessageSet operator&(MessageSet o) const { return from_bits(bits & o.bits); }
	constexpr MessageSet operator~() const { return from_bits(~bits); }
	constexpr bool operator==(const MessageSet&) const = default;

	std::string str() const
	{
		std::string s;
		for (int m = 0; m < 4; ++m)
			if (has(m))
				s += (s.empty() ? "" : ",") + std::string(msg_name(m));
		return s;
	}
};

inline const char* rx_name(Receiver r) { return r == Receiver::Y1 ? "Y1" : "Y2"; }

// Power gain of message m at receiver rx.
inline double gain(const ChannelParams& c, Receiver rx, int m)
{
	bool own = (rx == Receiver::Y1) == (m == U1 || m == V1);
	if (own)
		return 1.0;
	return rx == Receiver::Y1 ? c.b : c.a;
}

// C(alpha, beta) = 0.5 log2(1 + alpha / beta)
inline double cap(double alpha, double beta)
{
	if (alpha <= 0)
		return 0.0;
	return 0.5 * std::log2(1.0 + alpha / beta);
}

constexpr double ln2 = 0.69314718055994530942;

inline double gaussian_mi(const ChannelParams& c, const PowerSplit& s, Receiver rx, MessageSet signal,
	MessageSet given)
{
	if (!(signal & given).empty())
		throw OverlappingSets("signal and conditioning sets intersect");
	if (signal.empty())
		throw PreconditionError("empty signal set");
	auto p = s.powers();
	double sig = 0, noise = 0;
	for (int m = 0; m < 4; ++m) {
		double g = gain(c, rx, m) * p[m];
		if (signal.has(m))
			sig += g;
		else if (!given.has(m))
			noise += g;
	}
	return cap(sig, noise + 1.0);
}

struct MiTerm {
	Receiver rx;
	MessageSet signal, given;

	std::string str() const
	{
		std::string s = "I(" + signal.str() + ";" + rx_name(rx);
		if (!given.empty())
			s += "|" + given.str();
		return s + ")";
	}
};

// Signed sum of MI terms; records which bound a chain rate ended up on.
struct RateExpr {
	std::vector<std::pair<double, MiTerm>> terms;

	RateExpr() = default;
	RateExpr(MiTerm t) : terms{{1.0, t}} {}

	RateExpr operator-(const RateExpr& o) const
	{
		RateExpr r = *this;
		for (auto [k, t] : o.terms)
			r.terms.push_back({-k, t});
		return r;
	}
	template <class Mi>
	double eval(Mi&& mi) const
	{
		double v = 0;
		for (auto& [k, t] : terms)
			v += k * mi(t);
		return v;
	}
};

struct RateWiring {
	RateExpr ru1, rv1, ru2, rv2;
};

enum class CodingStrategy {
	corner_start, // X1 all private, X2 all public
	sd_at_y2,     // U2 then U1 at Y2, joint (U1,U2) at Y1, user 1 public rate served first
	mirror,       // same chain with the users' priority swapped
};

inline const char* strategy_name(CodingStrategy s)
{
	switch (s) {
	case CodingStrategy::corner_start: return "corner_start";
	case CodingStrategy::sd_at_y2: return "sd_at_y2";
	case CodingStrategy::mirror: return "mirror";
	}
	return "?";
}

inline CodingStrategy strategy_for_mu(double mu)
{
	return mu <= 1 ? CodingStrategy::sd_at_y2 : CodingStrategy::mirror;
}

namespace detail {
struct Valued {
	double v;
	RateExpr e;
};
inline Valued vmin(Valued x, Valued y) { return y.v < x.v ? y : x; }
inline double vmin(double x, double y) { return y < x ? y : x; }
inline Valued vsub(const Valued& x, const Valued& y) { return {x.v - y.v, x.e - y.e}; }
inline double vsub(double x, double y) { return x - y; }
inline double val(double x) { return x; }
inline double val(const Valued& x) { return x.v; }

template <class V, class Mi>
std::array<V, 4> chain(CodingStrategy st, Mi& mi)
{
	auto term = [&](Receiver rx, MessageSet sig, MessageSet giv) {
		MiTerm t{rx, sig, giv};
		if constexpr (std::is_same_v<V, double>)
			return double(mi(t));
		else
			return Valued{mi(t), RateExpr(t)};
	};
	const auto Y1 = Receiver::Y1, Y2 = Receiver::Y2;
	V rv1 = term(Y1, {V1}, {U1, U2});
	V rv2 = term(Y2, {V2}, {U1, U2});
	if (st == CodingStrategy::corner_start)
		return {term(Y1, {U1}, {U2}), rv1, term(Y1, {U2}, {U1}), rv2};
	V a1 = vmin(term(Y1, {U1}, {U2}), term(Y2, {U1}, {U2}));
	V a2 = vmin(term(Y1, {U2}, {U1}), term(Y2, {U2}, {U1}));
	V sum = vmin(term(Y1, {U1, U2}, {}), term(Y2, {U1, U2}, {}));
	bool one_first = st == CodingStrategy::sd_at_y2;
	V first = vmin(one_first ? a1 : a2, sum);
	V second = vmin(one_first ? a2 : a1, vsub(sum, first));
	if (val(second) < 0) // only reachable through rounding
		second = vsub(second, second);
	return one_first ? std::array<V, 4>{first, rv1, second, rv2} : std::array<V, 4>{second, rv1, first, rv2};
}
} // namespace detail

// Rate structure of the chosen strategy with mutual information supplied by `mi`
// (a callable MiTerm -> bits). Public rates sit on a vertex of
//   ru1 <= min(I(U1;Y1|U2), I(U1;Y2|U2)), ru2 <= min(I(U2;Y1|U1), I(U2;Y2|U1)),
//   ru1 + ru2 <= min(I(U1,U2;Y1), I(U1,U2;Y2)),
// private rates are decoded last at their own receiver.
template <class Mi>
RateQuadruple chain_rates(CodingStrategy st, Mi&& mi, RateWiring* wiring = nullptr)
{
	if (!wiring) {
		auto r = detail::chain<double>(st, mi);
		return {r[0], r[1], r[2], r[3]};
	}
	auto r = detail::chain<detail::Valued>(st, mi);
	*wiring = {r[0].e, r[1].e, r[2].e, r[3].e};
	return {r[0].v, r[1].v, r[2].v, r[3].v};
}

inline auto gaussian_mi_fn(const ChannelParams& c, const PowerSplit& s)
{
	return [&c, &s](const MiTerm& t) { return gaussian_mi(c, s, t.rx, t.signal, t.given); };
}

inline RateQuadruple strategy_rates(const ChannelParams& c, const PowerSplit& s, CodingStrategy st,
	RateWiring* wiring = nullptr)
{
	if (st == CodingStrategy::corner_start && (s.pu1 != 0 || s.pv2 != 0))
		throw PreconditionError("corner strategy needs X1 all private and X2 all public");
	return chain_rates(st, gaussian_mi_fn(c, s), wiring);
}

struct CornerPoint {
	PowerSplit split;
	RateQuadruple rates;
};

inline CornerPoint corner_max_r1(const ChannelParams& c)
{
	PowerSplit s{0, c.p1, c.p2, 0};
	return {s, {0, cap(c.p1, 1), cap(c.b * c.p2, c.p1 + 1), 0}};
}

} // namespace giclab
