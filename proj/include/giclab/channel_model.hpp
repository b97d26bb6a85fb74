#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace giclab {

struct Error : std::runtime_error {
	using std::runtime_error::runtime_error;
};
struct PreconditionError : Error { using Error::Error; };
struct RejectedMove : Error { using Error::Error; };
struct NotCounterclockwise : Error { using Error::Error; };

// Y1 = X1 + sqrt(b) X2 + Z1, Y2 = sqrt(a) X1 + X2 + Z2, unit noise.
struct ChannelParams {
	double a = 0, b = 0, p1 = 0, p2 = 0;

	bool weak() const { return a < 1 && b < 1; }

	void validate(bool allow_strong = false) const
	{
		if (!(a >= 0 && b >= 0 && p1 >= 0 && p2 >= 0) || !std::isfinite(a + b + p1 + p2))
			throw PreconditionError("channel parameters must be finite and non-negative");
		if (!allow_strong && !weak())
			throw PreconditionError("non-weak interference (a >= 1 or b >= 1)");
	}
};

inline bool close_rel(double x, double y, double rel = 1e-12)
{
	return std::abs(x - y) <= rel * std::max({1.0, std::abs(x), std::abs(y)});
}

struct PowerSplit {
	double pu1 = 0, pv1 = 0, pu2 = 0, pv2 = 0;

	// pu1 = t1 p1, pu2 = t2 p2
	static PowerSplit from_fractions(const ChannelParams& c, double t1, double t2)
	{
		return {t1 * c.p1, c.p1 - t1 * c.p1, t2 * c.p2, c.p2 - t2 * c.p2};
	}
	double t1(const ChannelParams& c) const { return c.p1 > 0 ? pu1 / c.p1 : 0.0; }
	double t2(const ChannelParams& c) const { return c.p2 > 0 ? pu2 / c.p2 : 0.0; }

	std::array<double, 4> powers() const { return {pu1, pv1, pu2, pv2}; }

	bool valid_for(const ChannelParams& c) const
	{
		return pu1 >= 0 && pv1 >= 0 && pu2 >= 0 && pv2 >= 0 && close_rel(pu1 + pv1, c.p1) &&
			close_rel(pu2 + pv2, c.p2);
	}
	void validate(const ChannelParams& c) const
	{
		if (!valid_for(c))
			throw PreconditionError("power split does not match the budgets");
	}
	bool operator==(const PowerSplit&) const = default;
};

enum class Direction { none, toward_public, toward_private };

struct Reallocation {
	double dp1 = 0;
	Direction dir1 = Direction::none;
	double dp2 = 0;
	Direction dir2 = Direction::none;
};

namespace detail {
inline void move(double& pub, double& priv, double dp, Direction d)
{
	if (dp < 0)
		throw RejectedMove("negative reallocation magnitude");
	if (d == Direction::none || dp == 0)
		return;
	double& from = d == Direction::toward_public ? priv : pub;
	double& to = d == Direction::toward_public ? pub : priv;
	if (from - dp < 0)
		throw RejectedMove("reallocation would make a message power negative");
	// keep the per-user sum bit-identical: recompute one side from the total
	double total = pub + priv;
	from -= dp;
	to = total - from;
	for (int k = 0; k < 16 && from + to != total; ++k) {
		from = std::nextafter(from, total);
		to = total - from;
	}
}
} // namespace detail

inline PowerSplit apply_reallocation(const PowerSplit& s, const Reallocation& r)
{
	PowerSplit out = s;
	detail::move(out.pu1, out.pv1, r.dp1, r.dir1);
	detail::move(out.pu2, out.pv2, r.dp2, r.dir2);
	if (out.pu1 + out.pv1 != s.pu1 + s.pv1 || out.pu2 + out.pv2 != s.pu2 + s.pv2)
		throw RejectedMove("reallocation could not preserve the per-user sum exactly");
	return out;
}

struct RateQuadruple {
	double ru1 = 0, rv1 = 0, ru2 = 0, rv2 = 0;

	double r1() const { return ru1 + rv1; }
	double r2() const { return ru2 + rv2; }
	double weighted(double mu) const { return r1() + mu * r2(); }
};

struct StepMetrics {
	double upsilon = 0, gamma = 0, dr1 = 0, dr2 = 0;
};

inline StepMetrics step_metrics(const RateQuadruple& start, const RateQuadruple& end)
{
	StepMetrics m;
	m.dr1 = start.r1() - end.r1();
	m.dr2 = end.r2() - start.r2();
	if (!(m.dr1 > 0 && m.dr2 > 0))
		throw NotCounterclockwise("step does not decrease R1 and increase R2");
	m.upsilon = m.dr2 / m.dr1;
	m.gamma = std::hypot(m.dr1, m.dr2);
	return m;
}

inline std::optional<StepMetrics> try_step_metrics(const RateQuadruple& s, const RateQuadruple& e)
{
	if (s.r1() - e.r1() > 0 && e.r2() - s.r2() > 0)
		return step_metrics(s, e);
	return std::nullopt;
}

} // namespace giclab
