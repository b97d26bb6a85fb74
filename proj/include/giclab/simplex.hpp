#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace giclab {

enum class LpStatus { optimal, infeasible, unbounded };

template <class T>
struct LpResult {
	LpStatus status = LpStatus::infeasible;
	std::vector<T> x; // primal
	std::vector<T> y; // duals of the rows
	T objective = 0;
	T dual_objective = 0;
	bool flat = false; // some nonbasic direction leaves the objective unchanged
};

// Dense tableau simplex, max c'x s.t. Ax <= b, x >= 0.
// Two phases (artificial column when some b < 0), Bland's rule in both.
template <class T = double>
class Simplex {
public:
	using Vec = std::vector<T>;
	using Mat = std::vector<Vec>;

	T eps = T(1e-12);

	Simplex(const Mat& A, const Vec& b, const Vec& c)
		: m_(int(b.size())), n_(int(c.size())), N_(n_ + 1), B_(m_), D_(m_ + 2, Vec(n_ + 2)), b_(b)
	{
		for (int i = 0; i < m_; ++i)
			for (int j = 0; j < n_; ++j)
				D_[i][j] = A[i][j];
		for (int i = 0; i < m_; ++i) {
			B_[i] = n_ + i;
			D_[i][n_] = -1;
			D_[i][n_ + 1] = b[i];
		}
		for (int j = 0; j < n_; ++j) {
			N_[j] = j;
			D_[m_][j] = -c[j];
		}
		N_[n_] = -1;
		D_[m_ + 1][n_] = 1;
	}

	LpResult<T> solve()
	{
		LpResult<T> res;
		int r = 0;
		for (int i = 1; i < m_; ++i)
			if (D_[i][n_ + 1] < D_[r][n_ + 1])
				r = i;
		if (m_ > 0 && D_[r][n_ + 1] < -eps) {
			pivot(r, n_);
			if (!run(2) || D_[m_ + 1][n_ + 1] < -eps) {
				res.status = LpStatus::infeasible;
				return res;
			}
			for (int i = 0; i < m_; ++i)
				if (B_[i] == -1) {
					int s = -1;
					for (int j = 0; j <= n_; ++j)
						if (N_[j] != -1 && std::abs(D_[i][j]) > eps && (s == -1 || N_[j] < N_[s]))
							s = j;
					if (s >= 0)
						pivot(i, s);
				}
		}
		bool bounded = run(1);
		res.x.assign(n_, T(0));
		for (int i = 0; i < m_; ++i)
			if (B_[i] >= 0 && B_[i] < n_)
				res.x[B_[i]] = D_[i][n_ + 1];
		if (!bounded) {
			res.status = LpStatus::unbounded;
			res.objective = std::numeric_limits<T>::infinity();
			return res;
		}
		res.status = LpStatus::optimal;
		res.objective = D_[m_][n_ + 1];
		res.y.assign(m_, T(0));
		for (int j = 0; j <= n_; ++j)
			if (N_[j] >= n_)
				res.y[N_[j] - n_] = D_[m_][j];
		for (int i = 0; i < m_; ++i)
			res.dual_objective += b_[i] * res.y[i];
		res.flat = has_flat_direction();
		return res;
	}

private:
	int m_, n_;
	std::vector<int> N_, B_;
	Mat D_;
	Vec b_;

	void pivot(int r, int s)
	{
		T inv = 1 / D_[r][s];
		for (int i = 0; i < m_ + 2; ++i)
			if (i != r && std::abs(D_[i][s]) > 0) {
				T f = D_[i][s] * inv;
				for (int j = 0; j < n_ + 2; ++j)
					D_[i][j] -= D_[r][j] * f;
				D_[i][s] = D_[r][s] * f;
			}
		for (int j = 0; j < n_ + 2; ++j)
			if (j != s)
				D_[r][j] *= inv;
		for (int i = 0; i < m_ + 2; ++i)
			if (i != r)
				D_[i][s] *= -inv;
		D_[r][s] = inv;
		std::swap(B_[r], N_[s]);
	}

	bool run(int phase)
	{
		int x = m_ + phase - 1;
		for (;;) {
			// Bland: lowest-labelled improving column
			int s = -1;
			for (int j = 0; j <= n_; ++j) {
				if (N_[j] == -phase || D_[x][j] >= -eps)
					continue;
				if (s == -1 || N_[j] < N_[s])
					s = j;
			}
			if (s == -1)
				return true;
			int r = -1;
			for (int i = 0; i < m_; ++i) {
				if (D_[i][s] <= eps)
					continue;
				if (r == -1)
					r = i;
				else {
					T lhs = D_[i][n_ + 1] * D_[r][s], rhs = D_[r][n_ + 1] * D_[i][s];
					if (lhs < rhs || (lhs == rhs && B_[i] < B_[r]))
						r = i;
				}
			}
			if (r == -1)
				return false;
			pivot(r, s);
		}
	}

	bool has_flat_direction() const
	{
		const T tol = T(1e-10);
		for (int j = 0; j <= n_; ++j) {
			if (N_[j] == -1 || std::abs(D_[m_][j]) > tol)
				continue;
			T step = std::numeric_limits<T>::infinity();
			for (int i = 0; i < m_; ++i)
				if (D_[i][j] > eps)
					step = std::min(step, D_[i][n_ + 1] / D_[i][j]);
			if (step > tol)
				return true;
		}
		return false;
	}
};

template <class T>
LpResult<T> simplex_max(const std::vector<std::vector<T>>& A, const std::vector<T>& b,
	const std::vector<T>& c)
{
	return Simplex<T>(A, b, c).solve();
}

} // namespace giclab
