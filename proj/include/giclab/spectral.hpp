#pragma once

#include "channel_model.hpp"

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

namespace giclab {

struct MassLoss : Error { using Error::Error; };
struct NegativeDensity : Error { using Error::Error; };

// Symmetric grid x_i = (i - c) dx, c = (n - 1) / 2, dx = 2L / (n - 1). An even
// request is bumped to n + 1 so that x = 0 is a grid point.
struct Grid {
	double L = 10;
	int n = 2049;

	static Grid make(double half_width, int points)
	{
		if (!(half_width > 0) || points < 3)
			throw PreconditionError("grid needs L > 0 and at least 3 points");
		return {half_width, points % 2 ? points : points + 1};
	}
	int centre() const { return (n - 1) / 2; }
	double dx() const { return 2 * L / (n - 1); }
	double x(int i) const { return (i - centre()) * dx(); }
	bool operator==(const Grid&) const = default;
};

class GridDensity {
public:
	GridDensity() = default;
	GridDensity(Grid g, std::vector<double> v) : grid_(g), v_(std::move(v))
	{
		if (int(v_.size()) != g.n)
			throw PreconditionError("sample count does not match grid");
	}

	static GridDensity gaussian(Grid g, double var, double mean = 0)
	{
		if (!(var >= 0))
			throw PreconditionError("negative variance");
		std::vector<double> v(g.n, 0.0);
		if (var == 0) {
			int i = g.centre() + int(std::lround(mean / g.dx()));
			if (i < 0 || i >= g.n)
				throw PreconditionError("spike outside grid");
			v[i] = 1 / g.dx();
			return {g, v};
		}
		for (int i = 0; i < g.n; ++i) {
			double z = g.x(i) - mean;
			v[i] = std::exp(-z * z / (2 * var));
		}
		return GridDensity(g, v).normalized();
	}

	// cell averages of the uniform law on [lo, hi]
	static GridDensity uniform(Grid g, double lo, double hi)
	{
		if (!(hi > lo))
			throw PreconditionError("empty interval");
		std::vector<double> v(g.n);
		double d = g.dx();
		for (int i = 0; i < g.n; ++i) {
			double a = std::max(lo, g.x(i) - d / 2), b = std::min(hi, g.x(i) + d / 2);
			v[i] = std::max(0.0, b - a) / d / (hi - lo);
		}
		return {g, v};
	}

	const Grid& grid() const { return grid_; }
	const std::vector<double>& values() const { return v_; }
	double operator[](int i) const { return v_[i]; }

	double moment(int k) const
	{
		double s = 0;
		for (int i = 0; i < grid_.n; ++i)
			s += std::pow(grid_.x(i), k) * v_[i];
		return s * grid_.dx();
	}
	double mass() const { return moment(0); }
	double mean() const { return moment(1) / mass(); }
	double second_moment() const { return moment(2) / mass(); }
	double variance() const
	{
		double m = mean();
		return second_moment() - m * m;
	}

	GridDensity normalized() const
	{
		double m = mass();
		if (!(m > 0))
			throw PreconditionError("density has no mass");
		auto v = v_;
		for (double& x : v)
			x /= m;
		return {grid_, v};
	}

	// density of f + eps h
	GridDensity perturbed(const std::vector<double>& h, double eps) const
	{
		auto v = v_;
		for (int i = 0; i < grid_.n; ++i) {
			v[i] += eps * h[i];
			if (v[i] < 0)
				throw NegativeDensity("f + eps h is negative");
		}
		return {grid_, v};
	}

private:
	Grid grid_;
	std::vector<double> v_;
};

namespace detail {
using cplx = std::complex<double>;

struct FftPlans {
	fftw_plan fwd, inv;
};

// one r2c/c2r pair per size; planning is serialised, execution is reentrant
inline FftPlans fft_plans(int m)
{
	static std::mutex mu;
	static std::map<int, FftPlans> cache;
	std::lock_guard<std::mutex> g(mu);
	auto it = cache.find(m);
	if (it != cache.end())
		return it->second;
	double* r = fftw_alloc_real(m);
	fftw_complex* c = fftw_alloc_complex(m / 2 + 1);
	FftPlans p{fftw_plan_dft_r2c_1d(m, r, c, FFTW_ESTIMATE), fftw_plan_dft_c2r_1d(m, c, r, FFTW_ESTIMATE)};
	fftw_free(r);
	fftw_free(c);
	cache[m] = p;
	return p;
}

struct RealBuf {
	double* p;
	explicit RealBuf(int m) : p(fftw_alloc_real(m)) {}
	~RealBuf() { fftw_free(p); }
	RealBuf(const RealBuf&) = delete;
	RealBuf& operator=(const RealBuf&) = delete;
};
struct CplxBuf {
	fftw_complex* p;
	explicit CplxBuf(int m) : p(fftw_alloc_complex(m)) {}
	~CplxBuf() { fftw_free(p); }
	CplxBuf(const CplxBuf&) = delete;
	CplxBuf& operator=(const CplxBuf&) = delete;
};

inline std::pair<fftw_plan, fftw_plan> complex_plans(int m)
{
	static std::mutex mu;
	static std::map<int, std::pair<fftw_plan, fftw_plan>> cache;
	std::lock_guard<std::mutex> g(mu);
	auto it = cache.find(m);
	if (it != cache.end())
		return it->second;
	CplxBuf a(m), b(m);
	std::pair<fftw_plan, fftw_plan> p{fftw_plan_dft_1d(m, a.p, b.p, FFTW_FORWARD, FFTW_ESTIMATE),
		fftw_plan_dft_1d(m, a.p, b.p, FFTW_BACKWARD, FFTW_ESTIMATE)};
	cache[m] = p;
	return p;
}

// a (*) b over Z_m, m = a.size() = b.size()
inline std::vector<cplx> cyclic_convolution(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
	int m = int(a.size());
	auto [fwd, inv] = complex_plans(m);
	CplxBuf x(m), y(m), fx(m), fy(m);
	for (int i = 0; i < m; ++i) {
		x.p[i][0] = a[i].real();
		x.p[i][1] = a[i].imag();
		y.p[i][0] = b[i].real();
		y.p[i][1] = b[i].imag();
	}
	fftw_execute_dft(fwd, x.p, fx.p);
	fftw_execute_dft(fwd, y.p, fy.p);
	for (int i = 0; i < m; ++i) {
		double re = fx.p[i][0] * fy.p[i][0] - fx.p[i][1] * fy.p[i][1];
		double im = fx.p[i][0] * fy.p[i][1] + fx.p[i][1] * fy.p[i][0];
		fx.p[i][0] = re;
		fx.p[i][1] = im;
	}
	fftw_execute_dft(inv, fx.p, x.p);
	std::vector<cplx> r(m);
	for (int i = 0; i < m; ++i)
		r[i] = cplx(x.p[i][0], x.p[i][1]) / double(m);
	return r;
}
} // namespace detail

// Spectral samples of grid densities, zero padded to `size()` points so the
// padded window spans [-2L, 2L). A product of K spectra transforms back to the
// K-fold linear convolution; only compound mass beyond 3L could alias.
class Spectrum {
public:
	using cplx = detail::cplx;

	explicit Spectrum(const Grid& g) : grid_(g)
	{
		m_ = 1;
		while (m_ < 2 * (g.n - 1))
			m_ *= 2;
	}
	int size() const { return m_; }
	int bins() const { return m_ / 2 + 1; }
	const Grid& grid() const { return grid_; }

	// transform of samples v of a density on the grid
	std::vector<cplx> forward(const std::vector<double>& v) const
	{
		auto plans = detail::fft_plans(m_);
		detail::RealBuf in(m_);
		detail::CplxBuf out(bins());
		std::fill(in.p, in.p + m_, 0.0);
		std::copy(v.begin(), v.end(), in.p);
		fftw_execute_dft_r2c(plans.fwd, in.p, out.p);
		std::vector<cplx> s(bins());
		for (int k = 0; k < bins(); ++k)
			s[k] = {out.p[k][0], out.p[k][1]};
		return s;
	}

	// Transform of the density of sqrt(gain) X, X ~ v, using the band-limited
	// interpolant of the samples (exact for densities resolved by the grid).
	std::vector<cplx> forward_scaled(const std::vector<double>& v, double gain) const
	{
		if (gain == 1)
			return forward(v);
		if (!(gain > 0))
			throw PreconditionError("gain must be positive");
		double s = std::sqrt(gain);
		int c = grid_.centre();
		// cells below 1e-20 of the peak carry no resolvable mass
		double cut = 1e-20 * *std::max_element(v.begin(), v.end(), [](double a, double b) {
			return std::abs(a) < std::abs(b);
		});
		cut = std::abs(cut);
		int lo = 0, hi = grid_.n - 1;
		while (lo < hi && std::abs(v[lo]) <= cut)
			++lo;
		while (hi > lo && std::abs(v[hi]) <= cut)
			--hi;
		// chirp-z: sum_j g_j e^{-i beta k j}, beta = 2 pi s / M, g_j = v[lo + j]
		int nb = bins(), np = hi - lo + 1;
		int p = 1;
		while (p < nb + np - 1)
			p *= 2;
		auto chirp = [&](long long k) {
			long double ph = std::numbers::pi_v<long double> * s * (long double)(k * k) / m_;
			return cplx(double(std::cos(ph)), double(-std::sin(ph))); // e^{-i beta k^2 / 2}
		};
		std::vector<cplx> A(p), B(p);
		for (int j = 0; j < np; ++j)
			A[j] = v[lo + j] * chirp(j);
		for (int m = 0; m < nb; ++m)
			B[m] = std::conj(chirp(m));
		for (int m = 1; m < np; ++m)
			B[p - m] = std::conj(chirp(m));
		auto C = detail::cyclic_convolution(A, B);
		std::vector<cplx> acc(nb);
		for (int k = 0; k < nb; ++k) {
			if (s * 2 * std::numbers::pi * k / m_ > std::numbers::pi) // outside the band of the samples
				continue;
			double sh = -s * 2 * std::numbers::pi * double(k) * (lo - c) / m_;
			acc[k] = C[k] * chirp(k) * cplx(std::cos(sh), std::sin(sh));
		}
		for (int k = 0; k < nb; ++k)
			acc[k] *= std::polar(1.0, -2 * std::numbers::pi * double((long long)k * c % m_) / m_);
		return acc;
	}

	struct Inverse {
		std::vector<double> values; // on the grid
		double mass_outside = 0;    // of the padded result beyond [-L, L]
	};

	// K-fold product back to grid samples of the convolution density
	Inverse inverse(const std::vector<cplx>& prod, int factors) const
	{
		auto plans = detail::fft_plans(m_);
		detail::CplxBuf in(bins());
		detail::RealBuf out(m_);
		for (int k = 0; k < bins(); ++k) {
			in.p[k][0] = prod[k].real();
			in.p[k][1] = prod[k].imag();
		}
		fftw_execute_dft_c2r(plans.inv, in.p, out.p);
		double scale = std::pow(grid_.dx(), factors - 1) / m_;
		int off = (factors - 1) * grid_.centre();
		Inverse r;
		r.values.resize(grid_.n);
		double total = 0, kept = 0;
		for (int j = 0; j < m_; ++j)
			total += out.p[j];
		for (int i = 0; i < grid_.n; ++i) {
			r.values[i] = out.p[(i + off) % m_] * scale;
			kept += r.values[i];
		}
		r.mass_outside = (total * scale - kept) * grid_.dx();
		return r;
	}

private:
	Grid grid_;
	int m_;
};

struct Convolution {
	GridDensity density;
	double lost_mass = 0; // input mass product minus retained mass; not renormalised
};

inline Convolution convolve(const GridDensity& f, const GridDensity& g, double max_loss = 1e-6)
{
	if (!(f.grid() == g.grid()))
		throw PreconditionError("grid mismatch");
	Spectrum sp(f.grid());
	auto a = sp.forward(f.values()), b = sp.forward(g.values());
	for (int k = 0; k < sp.bins(); ++k)
		a[k] *= b[k];
	auto r = sp.inverse(a, 2);
	double lost = f.mass() * g.mass() - GridDensity(f.grid(), r.values).mass();
	if (std::abs(lost) > max_loss)
		throw MassLoss("convolution lost " + std::to_string(lost) + " of its mass at the grid edge");
	return {GridDensity(f.grid(), std::move(r.values)), lost};
}

constexpr double density_floor = 1e-300;

struct EntropyAudit {
	double nats = 0;
	double clipped = 0; // |contribution| of cells below the floor, negative round-off included
};

inline EntropyAudit entropy_audit(const std::vector<double>& v, double dx)
{
	EntropyAudit a;
	for (double p : v) {
		if (p > density_floor)
			a.nats -= p * std::log(p);
		else if (p != 0)
			a.clipped += std::abs(p) * -std::log(density_floor);
	}
	a.nats *= dx;
	a.clipped *= dx;
	return a;
}

// -sum f ln f dx in nats
inline double differential_entropy(const GridDensity& f)
{
	return entropy_audit(f.values(), f.grid().dx()).nats;
}

inline double gaussian_entropy_nats(double var)
{
	return 0.5 * std::log(2 * std::numbers::pi * std::numbers::e * var);
}

// Density of sqrt(gain) X on the same grid.
inline GridDensity scale_density(const GridDensity& f, double gain)
{
	Spectrum sp(f.grid());
	auto r = sp.inverse(sp.forward_scaled(f.values(), gain), 1);
	return {f.grid(), r.values};
}

} // namespace giclab
