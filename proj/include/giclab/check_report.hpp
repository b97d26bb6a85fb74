#pragma once

#include <string>
#include <vector>

namespace giclab {

struct CheckRow {
	std::string name, instance;
	double measured = 0, threshold = 0;
	bool pass = false;
};

struct SuiteReport {
	std::string name;
	std::vector<CheckRow> rows;
	std::string summary;

	void add(std::string n, std::string inst, double measured, double threshold, bool pass)
	{
		rows.push_back({std::move(n), std::move(inst), measured, threshold, pass});
	}
	bool pass() const
	{
		for (auto& r : rows)
			if (!r.pass)
				return false;
		return !rows.empty();
	}
	int failures() const
	{
		int k = 0;
		for (auto& r : rows)
			k += !r.pass;
		return k;
	}
};

} // namespace giclab
