#pragma once

#include "verify_suites.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <variant>

namespace giclab {

struct UsageError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

enum ExitCode : int { exit_ok = 0, exit_precondition = 1, exit_verification = 2, exit_usage = 64 };

// "start:stop:count", or a single value
inline std::vector<double> parse_mu_grid(const std::string& spec)
{
	std::vector<std::string> parts;
	std::stringstream ss(spec);
	for (std::string p; std::getline(ss, p, ':');)
		parts.push_back(p);
	auto num = [&](const std::string& x) {
		std::size_t used = 0;
		double v = 0;
		try {
			v = std::stod(x, &used);
		} catch (const std::exception&) {
			used = 0;
		}
		if (used != x.size() || x.empty())
			throw UsageError("bad mu grid: " + spec);
		return v;
	};
	if (parts.size() == 1)
		return {num(parts[0])};
	if (parts.size() != 3)
		throw UsageError("mu grid must be start:stop:count");
	double a = num(parts[0]), b = num(parts[1]), k = num(parts[2]);
	if (k < 1 || k != std::floor(k))
		throw UsageError("mu grid count must be a positive integer");
	int n = int(k);
	if (n == 1)
		return {a};
	std::vector<double> g(n);
	for (int i = 0; i < n; ++i)
		g[i] = i == n - 1 ? b : a + (b - a) * i / (n - 1);
	return g;
}

struct RunConfig {
	double a = 0.25, b = 0.25, p1 = 1, p2 = 1;
	bool allow_strong = false;
	std::string mu = "0.05:0.95:19";
	int grid_n = 2048;
	double grid_sigmas = 10;
	double eps = 1e-3;
	int perturbations = 50;
	std::size_t samples = 1000000;
	int instances = 100;
	std::uint64_t seed = 1;
	double tol = 2e-3;
	int resolution = 17;
	int steps = 40;
	double dp = 0.05;
	std::string suite = "all";
	std::string law = "all";
	std::string out = ".";
	bool plot = false;

	ChannelParams channel() const { return {a, b, p1, p2}; }

	void validate() const
	{
		try {
			channel().validate(allow_strong);
		} catch (const PreconditionError& e) {
			if (channel().weak() || allow_strong)
				throw;
			throw PreconditionError(std::string(e.what()) + "; general mode requires --allow-strong");
		}
		if (!(tol > 0 && eps > 0 && grid_sigmas > 0 && dp > 0))
			throw PreconditionError("tolerances and step sizes must be positive");
		if (grid_n < 16 || perturbations < 1 || instances < 1 || steps < 1 || resolution < 2)
			throw PreconditionError("counts out of range");
	}
};

namespace detail {
template <class F>
void for_each_field(RunConfig& c, F&& f)
{
	f("a", c.a);
	f("b", c.b);
	f("p1", c.p1);
	f("p2", c.p2);
	f("allow_strong", c.allow_strong);
	f("mu", c.mu);
	f("grid_n", c.grid_n);
	f("grid_sigmas", c.grid_sigmas);
	f("eps", c.eps);
	f("perturbations", c.perturbations);
	f("samples", c.samples);
	f("instances", c.instances);
	f("seed", c.seed);
	f("tol", c.tol);
	f("resolution", c.resolution);
	f("steps", c.steps);
	f("dp", c.dp);
	f("suite", c.suite);
	f("law", c.law);
	f("out", c.out);
	f("plot", c.plot);
}

inline std::string trim(const std::string& s)
{
	auto b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
	return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

template <class T>
void parse_value(const std::string& key, const std::string& v, T& out)
{
	std::istringstream is(v);
	if constexpr (std::is_same_v<T, bool>) {
		if (v == "true" || v == "1")
			out = true;
		else if (v == "false" || v == "0")
			out = false;
		else
			throw UsageError("bad boolean for " + key + ": " + v);
		return;
	} else if constexpr (std::is_same_v<T, std::string>) {
		out = v;
		return;
	} else {
		T x{};
		is >> x;
		if (is.fail() || !is.eof())
			throw UsageError("bad value for " + key + ": " + v);
		out = x;
	}
}

template <class T>
std::string format_value(const T& v)
{
	if constexpr (std::is_same_v<T, bool>)
		return v ? "true" : "false";
	else if constexpr (std::is_same_v<T, std::string>)
		return v;
	else if constexpr (std::is_floating_point_v<T>)
		return fmt("%.17g", v);
	else
		return std::to_string(v);
}
} // namespace detail

// key = value lines, # comments
inline RunConfig parse_config(const std::string& text, RunConfig base = {})
{
	std::istringstream is(text);
	int lineno = 0;
	for (std::string line; std::getline(is, line);) {
		++lineno;
		if (auto h = line.find('#'); h != std::string::npos)
			line.erase(h);
		line = detail::trim(line);
		if (line.empty())
			continue;
		auto eq = line.find('=');
		if (eq == std::string::npos)
			throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
		std::string k = detail::trim(line.substr(0, eq)), v = detail::trim(line.substr(eq + 1));
		bool known = false;
		detail::for_each_field(base, [&](const char* name, auto& field) {
			if (k == name) {
				detail::parse_value(k, v, field);
				known = true;
			}
		});
		if (!known)
			throw UsageError("config line " + std::to_string(lineno) + ": unknown key " + k);
	}
	return base;
}

inline std::string serialize_config(RunConfig c)
{
	std::string s;
	detail::for_each_field(c, [&](const char* name, auto& field) {
		s += std::string(name) + " = " + detail::format_value(field) + "\n";
	});
	return s;
}

inline bool operator==(RunConfig x, RunConfig y) { return serialize_config(x) == serialize_config(y); }

// Writes to a temporary sibling, then renames over the target.
inline void atomic_write(const std::filesystem::path& path, const std::string& content)
{
	namespace fs = std::filesystem;
	if (path.has_parent_path())
		fs::create_directories(path.parent_path());
	fs::path tmp = path;
	tmp += ".tmp";
	{
		std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
		if (!f)
			throw IoError("cannot open " + tmp.string());
		f << content;
		f.flush();
		if (!f) {
			f.close();
			fs::remove(tmp);
			throw IoError("write failed: " + tmp.string());
		}
	}
	std::error_code ec;
	fs::rename(tmp, path, ec);
	if (ec) {
		fs::remove(tmp);
		throw IoError("rename failed: " + path.string() + ": " + ec.message());
	}
}

using Cell = std::variant<std::monostate, double, std::string>;

inline std::string csv_quote(const std::string& s)
{
	if (s.find_first_of(",\"\n") == std::string::npos)
		return s;
	std::string q = "\"";
	for (char ch : s)
		q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
	return q + "\"";
}

struct CsvTable {
	std::vector<std::string> header;
	std::vector<std::vector<Cell>> rows;

	CsvTable() = default;
	CsvTable(std::vector<std::string> h) : header(std::move(h)) {}

	void add(std::vector<Cell> r)
	{
		if (r.size() != header.size())
			throw PreconditionError("row has " + std::to_string(r.size()) + " cells, header has " +
				std::to_string(header.size()));
		rows.push_back(std::move(r));
	}

	std::string str() const
	{
		std::string s = "# schema=1\n";
		auto line = [&](auto& cells, auto cell) {
			for (std::size_t i = 0; i < cells.size(); ++i)
				s += (i ? "," : "") + cell(cells[i]);
			s += "\n";
		};
		line(header, [](const std::string& h) { return h; });
		for (auto& r : rows)
			line(r, [](const Cell& c) -> std::string {
				if (auto d = std::get_if<double>(&c))
					return fmt("%.12g", *d);
				if (auto t = std::get_if<std::string>(&c))
					return csv_quote(*t);
				return "";
			});
		return s;
	}
};

inline CsvTable suite_table(const std::vector<SuiteReport>& reps)
{
	CsvTable t{{"name", "instance", "measured", "threshold", "pass"}};
	for (auto& r : reps)
		for (auto& row : r.rows)
			t.add({r.name + ": " + row.name, row.instance, row.measured, row.threshold,
				std::string(row.pass ? "true" : "false")});
	return t;
}

struct Polyline {
	std::string name, color;
	std::vector<std::array<double, 2>> pts;

	Polyline(std::string n, std::string c) : name(std::move(n)), color(std::move(c)) {}
};

// Static (R1, R2) plot with axis ticks.
inline std::string region_svg(const std::vector<Polyline>& lines, const std::string& title = "")
{
	const double W = 640, H = 480, ml = 60, mr = 20, mt = 30, mb = 50;
	double xmax = 0, ymax = 0;
	for (auto& l : lines)
		for (auto& p : l.pts) {
			xmax = std::max(xmax, p[0]);
			ymax = std::max(ymax, p[1]);
		}
	auto nice = [](double v) {
		if (!(v > 0))
			return 1.0;
		double e = std::pow(10, std::floor(std::log10(v)));
		for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
			if (m * e >= v)
				return m * e;
		return 10 * e;
	};
	xmax = nice(xmax * 1.02);
	ymax = nice(ymax * 1.02);
	auto X = [&](double x) { return ml + (W - ml - mr) * x / xmax; };
	auto Y = [&](double y) { return H - mb - (H - mt - mb) * y / ymax; };
	std::string s = fmt("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" font-family=\"sans-serif\" "
						 "font-size=\"12\">\n",
		W, H);
	s += fmt("<rect width=\"%g\" height=\"%g\" fill=\"white\"/>\n", W, H);
	s += fmt("<text x=\"%g\" y=\"18\" text-anchor=\"middle\">%s</text>\n", W / 2, title.c_str());
	s += fmt("<path d=\"M%g %gV%gH%g\" stroke=\"black\" fill=\"none\"/>\n", ml, double(mt), H - mb, W - mr);
	for (int i = 0; i <= 5; ++i) {
		double xv = xmax * i / 5, yv = ymax * i / 5;
		s += fmt("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>", X(xv), H - mb, X(xv), H - mb + 5);
		s += fmt("<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%.3g</text>\n", X(xv), H - mb + 18, xv);
		s += fmt("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>", ml - 5, Y(yv), ml, Y(yv));
		s += fmt("<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%.3g</text>\n", ml - 8, Y(yv) + 4, yv);
	}
	s += fmt("<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">R1 (bits)</text>\n", (W + ml) / 2, H - 12);
	s += fmt("<text x=\"14\" y=\"%g\" text-anchor=\"middle\" transform=\"rotate(-90 14 %g)\">R2 (bits)</text>\n",
		H / 2, H / 2);
	double ly = mt + 10;
	for (auto& l : lines) {
		std::string d;
		for (auto& p : l.pts)
			d += fmt("%s%.2f,%.2f", d.empty() ? "" : " ", X(p[0]), Y(p[1]));
		s += "<polyline fill=\"none\" stroke=\"" + l.color + "\" stroke-width=\"1.5\" points=\"" + d + "\"/>\n";
		s += fmt("<text x=\"%g\" y=\"%g\" fill=\"%s\" text-anchor=\"end\">%s</text>\n", W - mr - 5, ly,
			l.color.c_str(), l.name.c_str());
		ly += 16;
	}
	return s + "</svg>\n";
}

namespace detail {
inline std::vector<Cell> sample_row(const ChannelParams& c, const BoundarySample& s)
{
	auto& r = s.rates;
	Cell up, ga;
	if (s.metrics) {
		up = s.metrics->upsilon;
		ga = s.metrics->gamma;
	}
	return {s.mu, s.split.t1(c), s.split.t2(c), s.split.pu1, s.split.pv1, s.split.pu2, s.split.pv2, r.ru1, r.rv1,
		r.ru2, r.rv2, r.r1(), r.r2(), up, ga, std::string(strategy_name(s.strategy))};
}

inline CsvTable boundary_table() {
	return {{"mu", "t1", "t2", "pu1", "pv1", "pu2", "pv2", "ru1", "rv1", "ru2", "rv2", "r1", "r2", "upsilon",
		"gamma", "strategy"}};
}

inline std::vector<LawKind> parse_laws(const std::string& s)
{
	if (s == "all")
		return {LawKind::Uniform, LawKind::Laplace, LawKind::Bimodal};
	for (auto k : {LawKind::Gaussian, LawKind::Uniform, LawKind::Laplace, LawKind::Bimodal})
		if (s == law_name(k))
			return {k};
	throw UsageError("unknown law: " + s);
}
} // namespace detail

// Command pipelines; each returns the exit code and writes into cfg.out.
struct Commands {
	RunConfig cfg;
	std::ostream& out;

	std::filesystem::path file(const std::string& name) const { return std::filesystem::path(cfg.out) / name; }

	void write(const std::string& name, const std::string& content)
	{
		atomic_write(file(name), content);
		out << "wrote " << file(name).string() << "\n";
	}

	int finish(const std::vector<SuiteReport>& reps, const std::string& name)
	{
		write(name, suite_table(reps).str());
		bool ok = true;
		for (auto& r : reps) {
			out << (r.pass() ? "PASS " : "FAIL ") << r.name << ": " << r.summary << "\n";
			ok = ok && r.pass();
		}
		return ok ? exit_ok : exit_verification;
	}

	int region()
	{
		auto c = cfg.channel();
		CsvTable t{{"mu", "t1", "t2", "ru1", "rv1", "ru2", "rv2", "r1", "r2", "objective", "reduced_objective"}};
		Polyline full{"HK LP", "black"}, red{"reduced", "crimson"};
		for (double mu : parse_mu_grid(cfg.mu)) {
			auto f = [&](const std::array<double, 2>& x) {
				return solve_hk_lp(build_hk_constraints(c, PowerSplit::from_fractions(c, x[0], x[1])), mu).objective;
			};
			auto best = maximize_box<2>(f, {0, 0}, {1, 1}, split_zoom(cfg.resolution));
			auto sol = solve_hk_lp(build_hk_constraints(c, PowerSplit::from_fractions(c, best.x[0], best.x[1])), mu);
			auto r = sol.rates;
			auto so = optimize_split(c, mu, cfg.resolution);
			t.add({mu, best.x[0], best.x[1], r.ru1, r.rv1, r.ru2, r.rv2, r.r1(), r.r2(), sol.objective, so.objective});
			full.pts.push_back({r.r1(), r.r2()});
			red.pts.push_back({so.rates.r1(), so.rates.r2()});
		}
		write("region.csv", t.str());
		if (cfg.plot)
			write("region.svg", region_svg({full, red}, describe(c)));
		return exit_ok;
	}

	int trace()
	{
		auto c = cfg.channel();
		auto sweep = sweep_boundary(c, parse_mu_grid(cfg.mu), std::max(cfg.resolution, 16));
		auto t = detail::boundary_table();
		Polyline p{"boundary", "black"}, q{"incremental trace", "steelblue"};
		for (auto& s : sweep) {
			t.add(detail::sample_row(c, s));
			p.pts.push_back({s.rates.r1(), s.rates.r2()});
		}
		write("boundary.csv", t.str());
		auto tr = trace_incremental(c, cfg.steps, {cfg.dp});
		auto t2 = detail::boundary_table();
		for (auto& s : tr.samples) {
			t2.add(detail::sample_row(c, s));
			q.pts.push_back({s.rates.r1(), s.rates.r2()});
		}
		write("trace.csv", t2.str());
		if (cfg.plot)
			write("boundary.svg", region_svg({p, q}, describe(c)));
		return exit_ok;
	}

	int envelope()
	{
		auto c = cfg.channel();
		auto grid = parse_mu_grid(cfg.mu);
		auto env = envelope_sweep(c, grid);
		CsvTable t{{"mu", "omega", "phase2_user", "r1", "r2", "objective"}};
		Polyline e{"envelope", "crimson"}, b{"single phase", "black"};
		for (auto& p : env) {
			t.add({p.mu, p.omega, double(p.phase2_user), p.r1, p.r2, p.objective});
			e.pts.push_back({p.r1, p.r2});
		}
		write("envelope.csv", t.str());
		if (cfg.plot) {
			for (auto& s : sweep_boundary(c, grid, std::max(cfg.resolution, 16)))
				b.pts.push_back({s.rates.r1(), s.rates.r2()});
			write("envelope.svg", region_svg({b, e}, describe(c)));
		}
		return exit_ok;
	}

	VariationalOptions variational_options() const
	{
		VariationalOptions o;
		o.n = cfg.grid_n;
		o.sigmas = cfg.grid_sigmas;
		o.eps = cfg.eps;
		o.perturbations = cfg.perturbations;
		o.seed = cfg.seed;
		return o;
	}

	int verify(const std::string& what)
	{
		auto c = cfg.channel();
		if (what == "variational") {
			if (cfg.suite == "second")
				return finish({second_variation_suite(cfg.perturbations, variational_options(), c)},
					"verify_variational.csv");
			return finish({stationarity_suite(parse_variational_suite(cfg.suite), variational_options(), c)},
				"verify_variational.csv");
		}
		if (what == "reduction") {
			ReductionSuiteOptions o;
			o.seed = cfg.seed;
			return finish({reduction_suite(o)}, "verify_reduction.csv");
		}
		if (what == "converse") {
			ConverseOptions o;
			o.seed = cfg.seed;
			StructureOptions s;
			s.seed = cfg.seed;
			return finish({converse_suite(o), successive_decoding_suite(s)}, "verify_converse.csv");
		}
		if (what == "theorem10")
			return finish({theorem10_suite(64, c), monotonicity_suite()}, "verify_theorem10.csv");
		throw UsageError("unknown verify target: " + what);
	}

	int probe()
	{
		auto c = cfg.channel();
		CsvTable t{{"law", "mu", "t1", "t2", "law_objective", "gaussian_objective", "gap", "unresolved"}};
		bool ok = true;
		GridSpec gs{cfg.grid_n, cfg.grid_sigmas};
		for (auto k : detail::parse_laws(cfg.law)) {
			auto r = non_gaussian_probe(c, parse_mu_grid(cfg.mu), law_family(k), 9, gs, cfg.tol);
			for (auto& p : r.points)
				t.add({std::string(law_name(k)), p.mu, p.t1, p.t2, p.law_objective, p.gaussian_objective, p.gap,
					std::string(p.unresolved ? "true" : "false")});
			out << law_name(k) << ": max gap " << fmt("%.3g", r.max_gap) << " bits"
				<< (r.any_unresolved ? ", UNRESOLVED" : "") << "\n";
			ok = ok && !r.any_unresolved;
		}
		write("probe.csv", t.str());
		return ok ? exit_ok : exit_verification;
	}

	int mc_check()
	{
		OracleOptions o;
		o.instances = cfg.instances;
		o.samples = cfg.samples;
		o.seed = cfg.seed;
		o.grid = {cfg.grid_n, cfg.grid_sigmas};
		return finish({oracle_suite(o)}, "mc_check.csv");
	}
};

inline void add_run_options(CLI::App* app, RunConfig& c)
{
	app->add_option("--a", c.a, "cross gain at receiver 2");
	app->add_option("--b", c.b, "cross gain at receiver 1");
	app->add_option("--p1", c.p1, "power budget of user 1");
	app->add_option("--p2", c.p2, "power budget of user 2");
	app->add_flag("--allow-strong", c.allow_strong, "accept a >= 1 or b >= 1");
	app->add_option("--mu", c.mu, "weight grid start:stop:count");
	app->add_option("--grid-n", c.grid_n, "density grid points");
	app->add_option("--grid-sigmas", c.grid_sigmas, "grid half-width in compound standard deviations");
	app->add_option("--eps", c.eps, "finite-difference step");
	app->add_option("--perturbations", c.perturbations, "perturbations per functional and core");
	app->add_option("--samples", c.samples, "Monte Carlo samples");
	app->add_option("--instances", c.instances, "random instances");
	app->add_option("--seed", c.seed, "random seed");
	app->add_option("--tol", c.tol, "probe tolerance (bits)");
	app->add_option("--resolution", c.resolution, "split grid points per axis");
	app->add_option("--steps", c.steps, "incremental trace steps");
	app->add_option("--dp", c.dp, "incremental trace power step");
	app->add_option("--suite", c.suite, "variational suite: entropy, mi, rates, all, second");
	app->add_option("--law", c.law, "probe law: uniform, laplace, bimodal, gaussian, all");
	app->add_option("--out", c.out, "output directory");
	app->add_flag("--plot", c.plot, "also write an SVG plot");
}

inline int run_command(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
	RunConfig cfg;
	try {
		// a config file seeds the defaults; flags given on the command line override it
		for (int i = 1; i + 1 < argc; ++i)
			if (std::string(argv[i]) == "--config") {
				std::ifstream f(argv[i + 1]);
				if (!f)
					throw UsageError(std::string("cannot read config ") + argv[i + 1]);
				std::stringstream ss;
				ss << f.rdbuf();
				cfg = parse_config(ss.str(), cfg);
			}
		CLI::App app{"Gaussian interference channel rate-region toolkit"};
		app.require_subcommand(1);
		std::string config_path;
		auto with_opts = [&](CLI::App* s) {
			add_run_options(s, cfg);
			s->add_option("--config", config_path, "key = value file (flags override)");
			return s;
		};
		auto region = with_opts(app.add_subcommand("region", "HK LP sweep over mu"));
		auto trace = with_opts(app.add_subcommand("trace", "boundary sweep and incremental trace"));
		auto envelope = with_opts(app.add_subcommand("envelope", "time-sharing envelope"));
		auto verify = app.add_subcommand("verify", "verification suites");
		verify->require_subcommand(1);
		std::map<CLI::App*, std::string> targets;
		for (auto t : {"variational", "reduction", "converse", "theorem10"})
			targets[with_opts(verify->add_subcommand(t))] = t;
		auto probe = app.add_subcommand("probe", "non-Gaussian probe");
		probe->require_subcommand(1);
		auto ng = with_opts(probe->add_subcommand("non-gaussian", "law gaps against the Gaussian boundary"));
		auto mc = with_opts(app.add_subcommand("mc-check", "grid and Monte Carlo MI against closed forms"));
		try {
			app.parse(argc, argv);
		} catch (const CLI::CallForHelp&) {
			out << app.help();
			return exit_ok;
		} catch (const CLI::CallForAllHelp&) {
			out << app.help("", CLI::AppFormatMode::All);
			return exit_ok;
		} catch (const CLI::ParseError& e) {
			err << "usage error: " << e.what() << "\n";
			return exit_usage;
		}
		cfg.validate();
		Commands cmd{cfg, out};
		if (region->parsed())
			return cmd.region();
		if (trace->parsed())
			return cmd.trace();
		if (envelope->parsed())
			return cmd.envelope();
		for (auto& [sub, name] : targets)
			if (sub->parsed())
				return cmd.verify(name);
		if (ng->parsed())
			return cmd.probe();
		if (mc->parsed())
			return cmd.mc_check();
		err << "usage error: no command\n";
		return exit_usage;
	} catch (const UsageError& e) {
		err << "usage error: " << e.what() << "\n";
		return exit_usage;
	} catch (const PreconditionError& e) {
		err << "error: " << e.what() << "\n";
		return exit_precondition;
	} catch (const std::exception& e) {
		err << "error: " << e.what() << "\n";
		return exit_precondition;
	}
}

} // namespace giclab
