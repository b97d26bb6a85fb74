#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace giclab {

// GICLAB_THREADS caps the worker count; default is the hardware concurrency.
inline unsigned worker_count()
{
	unsigned hw = std::max(1u, std::thread::hardware_concurrency());
	if (const char* e = std::getenv("GICLAB_THREADS")) {
		int v = std::atoi(e);
		if (v > 0)
			return unsigned(v);
	}
	return hw;
}

// Runs fn(i) for i in [0, n). Results must be written to per-index slots so
// the output does not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, F&& fn)
{
	unsigned w = unsigned(std::min<std::size_t>(worker_count(), n));
	if (w <= 1) {
		for (std::size_t i = 0; i < n; ++i)
			fn(i);
		return;
	}
	std::atomic<std::size_t> next{0};
	std::exception_ptr err;
	std::mutex m;
	auto work = [&] {
		for (;;) {
			std::size_t i = next++;
			if (i >= n)
				return;
			try {
				fn(i);
			} catch (...) {
				std::lock_guard<std::mutex> g(m);
				if (!err)
					err = std::current_exception();
			}
		}
	};
	std::vector<std::thread> ts;
	for (unsigned t = 0; t < w; ++t)
		ts.emplace_back(work);
	for (auto& t : ts)
		t.join();
	if (err)
		std::rethrow_exception(err);
}

} // namespace giclab
