#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace giclab {

template <std::size_t N>
struct BoxOptimum {
	std::array<double, N> x{};
	double value = -INFINITY;
	long evals = 0;
};

struct ZoomOptions {
	int coarse = 17;     // points per axis in the initial scan
	int local = 9;       // points per axis in each zoom level (odd)
	double shrink = 3;   // half-width divisor per level
	double tol = 1e-8;   // stop when the half-width drops below this
	int max_levels = 200;
	int starts = 3;      // distinct coarse optima to refine
};

namespace detail {
// lexicographic ascending visit order; strict improvement keeps the earliest
// point, so flat ties resolve toward smaller coordinates
template <std::size_t N, class F>
void scan(F& f, const std::array<double, N>& lo, const std::array<double, N>& hi, int pts,
	std::vector<std::pair<double, std::array<double, N>>>* all, BoxOptimum<N>& best)
{
	std::array<int, N> idx{};
	for (;;) {
		std::array<double, N> x;
		for (std::size_t k = 0; k < N; ++k)
			x[k] = pts == 1 ? lo[k] : lo[k] + (hi[k] - lo[k]) * idx[k] / (pts - 1);
		double v = f(x);
		++best.evals;
		if (all)
			all->push_back({v, x});
		if (v > best.value) {
			best.value = v;
			best.x = x;
		}
		std::size_t k = N;
		while (k > 0) {
			--k;
			if (++idx[k] < pts)
				break;
			idx[k] = 0;
			if (k == 0)
				return;
		}
	}
}
} // namespace detail

// Maximise f over the box [lo, hi] by a coarse scan followed by shrinking
// local grids around the best few coarse points.
template <std::size_t N, class F>
BoxOptimum<N> maximize_box(F&& f, std::array<double, N> lo, std::array<double, N> hi, const ZoomOptions& o = {})
{
	BoxOptimum<N> coarse;
	std::vector<std::pair<double, std::array<double, N>>> all;
	detail::scan<N>(f, lo, hi, o.coarse, &all, coarse);
	std::stable_sort(all.begin(), all.end(), [](auto& a, auto& b) { return a.first > b.first; });

	std::array<double, N> cell;
	for (std::size_t k = 0; k < N; ++k)
		cell[k] = o.coarse > 1 ? (hi[k] - lo[k]) / (o.coarse - 1) : (hi[k] - lo[k]);

	std::vector<std::array<double, N>> starts;
	for (auto& [v, x] : all) {
		if (int(starts.size()) >= o.starts)
			break;
		bool near = false;
		for (auto& s : starts) {
			bool adj = true;
			for (std::size_t k = 0; k < N; ++k)
				adj = adj && std::abs(s[k] - x[k]) <= 1.5 * cell[k];
			near = near || adj;
		}
		if (!near)
			starts.push_back(x);
	}

	BoxOptimum<N> best = coarse;
	for (auto& s : starts) {
		BoxOptimum<N> cur;
		cur.x = s;
		cur.value = f(s);
		++best.evals;
		std::array<double, N> h = cell;
		for (int level = 0; level < o.max_levels; ++level) {
			double hmax = 0;
			std::array<double, N> l, u;
			for (std::size_t k = 0; k < N; ++k) {
				l[k] = std::max(lo[k], cur.x[k] - h[k]);
				u[k] = std::min(hi[k], cur.x[k] + h[k]);
				hmax = std::max(hmax, h[k]);
			}
			if (hmax < o.tol)
				break;
			BoxOptimum<N> loc;
			detail::scan<N>(f, l, u, o.local, nullptr, loc);
			best.evals += loc.evals;
			if (loc.value > cur.value) {
				cur.value = loc.value;
				cur.x = loc.x;
			}
			for (auto& hk : h)
				hk /= o.shrink;
		}
		bool better = cur.value > best.value;
		if (!better && cur.value == best.value)
			better = cur.x < best.x;
		if (better) {
			best.value = cur.value;
			best.x = cur.x;
		}
	}
	return best;
}

struct ScalarOptimum {
	double x = 0, value = -INFINITY;
};

// Golden-section maximisation of a unimodal f on [lo, hi].
template <class F>
ScalarOptimum golden_max(F&& f, double lo, double hi, double tol = 1e-10, int max_iter = 200)
{
	const double g = 0.5 * (std::sqrt(5.0) - 1);
	double a = lo, b = hi;
	double c = b - g * (b - a), d = a + g * (b - a);
	double fc = f(c), fd = f(d);
	for (int it = 0; it < max_iter && b - a > tol; ++it) {
		if (fc >= fd) {
			b = d;
			d = c;
			fd = fc;
			c = b - g * (b - a);
			fc = f(c);
		} else {
			a = c;
			c = d;
			fc = fd;
			d = a + g * (b - a);
			fd = f(d);
		}
	}
	ScalarOptimum r{fc >= fd ? c : d, std::max(fc, fd)};
	double fa = f(lo), fb = f(hi);
	if (fa >= r.value)
		r = {lo, fa};
	if (fb > r.value)
		r = {hi, fb};
	return r;
}

} // namespace giclab
