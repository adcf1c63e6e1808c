// Command-line front end: run inequality checks, divergence sweeps, and
// equality-margin scans; emit CSV/JSON reports and gnuplot data files.
//
// Exit codes: 0 all selected checks pass, 1 at least one check failed,
// 2 configuration error (bad grammar, unsatisfiable preconditions, missing
// inputs).

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "santalo/body.hpp"
#include "santalo/counterexample.hpp"
#include "santalo/endomorphism.hpp"
#include "santalo/grid_function.hpp"
#include "santalo/inequalities.hpp"
#include "santalo/logconcave.hpp"
#include "santalo/report_io.hpp"
#include "santalo/sphere.hpp"
#include "santalo/zonal.hpp"

namespace {

using namespace santalo;
using nlohmann::json;

struct Options {
    int dim = 3;
    std::string id;
    std::string endo;
    std::string mu;
    std::string body;
    std::string f;
    std::string c_list;
    std::uint64_t seed = 1;
    int grid = 0;     // 0: per-command default
    double tol = 0.0; // 0: per-kind default
    int jobs = 1;
    std::string out = ".";
    bool strict = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream is(s);
    while (std::getline(is, tok, sep)) out.push_back(tok);
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const std::string& tok : split(s, ',')) {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("bad number in list: " + tok);
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty number list");
    return out;
}

/* "key=value" tail of a spec segment, e.g. "c=0.5" -> 0.5. */
double tail_value(const std::string& seg, const std::string& key) {
    if (seg.rfind(key + "=", 0) == 0) return std::stod(seg.substr(key.size() + 1));
    return std::stod(seg);  // bare number accepted too
}

json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open json file: " + path);
    json j;
    is >> j;
    return j;
}

// ---------------------------------------------------------------------------
// spec-string and JSON loaders for bodies, measures, endomorphisms, functions
// ---------------------------------------------------------------------------

Body body_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const int dim = j.at("dim").get<int>();
    const json params = j.value("params", json::object());
    if (kind == "ball") return ball(dim, params.value("radius", 1.0));
    if (kind == "cube") return cube(dim);
    if (kind == "simplex") return simplex(dim);
    if (kind == "ellipsoid") {
        Vec axes;
        for (double a : params.at("axes")) axes.push_back(a);
        return ellipsoid(axes);
    }
    if (kind == "polytope") {
        std::vector<Vec> verts;
        for (const auto& row : params.at("vertices")) {
            Vec v;
            for (double x : row) v.push_back(x);
            verts.push_back(std::move(v));
        }
        return make_polytope(dim, std::move(verts));
    }
    if (kind == "Kc") return kc_body(params.at("c").get<double>());
    if (kind == "Lc") return lc_body(params.at("c").get<double>(), dim);
    throw std::invalid_argument("unknown body kind: " + kind);
}

Body body_from_spec(const std::string& spec, int dim, std::uint64_t seed) {
    const auto segs = split(spec, ':');
    const std::string& kind = segs[0];
    if (kind == "file") {
        if (segs.size() < 2) throw std::invalid_argument("file body needs a path");
        return body_from_json(load_json(spec.substr(5)));
    }
    if (kind == "ball") return ball(dim, segs.size() > 1 ? tail_value(segs[1], "r") : 1.0);
    if (kind == "cube") return cube(dim);
    if (kind == "simplex") return simplex(dim);
    if (kind == "segment") return segment(dim);
    if (kind == "ellipsoid") {
        if (segs.size() < 2) throw std::invalid_argument("ellipsoid needs axes, e.g. ellipsoid:2,1,0.5");
        Vec axes = parse_double_list(segs[1]);
        if (static_cast<int>(axes.size()) != dim)
            throw std::invalid_argument("ellipsoid axes must match --dim");
        return ellipsoid(axes);
    }
    if (kind == "Kc") {
        if (dim != 2) throw std::invalid_argument("Kc is a planar body (--dim 2)");
        return kc_body(segs.size() > 1 ? tail_value(segs[1], "c") : 1.0);
    }
    if (kind == "Lc") return lc_body(segs.size() > 1 ? tail_value(segs[1], "c") : 1.0, dim);
    if (kind == "random-polytope") {
        const int k = segs.size() > 1 ? static_cast<int>(tail_value(segs[1], "k")) : 12;
        return random_polytope(dim, k, seed);
    }
    throw std::invalid_argument("unknown body spec: " + spec);
}

ZonalMeasure measure_from_json(const json& j, int dim) {
    ZonalMeasure mu;
    const json density = j.value("density", json{{"kind", "none"}});
    const std::string kind = density.value("kind", "none");
    if (kind == "named") {
        const std::string name = density.at("name").get<std::string>();
        if (name == "sigma") mu = sigma_measure(dim);
        else throw std::invalid_argument("unknown named density: " + name);
    } else if (kind == "table") {
        std::vector<double> nodes, values;
        for (double t : density.at("nodes")) nodes.push_back(t);
        for (double v : density.at("values")) values.push_back(v);
        if (nodes.size() != values.size() || nodes.size() < 2)
            throw std::invalid_argument("density table needs matching nodes/values");
        mu = from_density(
            j.value("dim", dim),
            [nodes, values](double t) {
                auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
                if (it == nodes.begin()) return values.front();
                if (it == nodes.end()) return values.back();
                const std::size_t hi = static_cast<std::size_t>(it - nodes.begin());
                const double w = (t - nodes[hi - 1]) / (nodes[hi] - nodes[hi - 1]);
                return (1.0 - w) * values[hi - 1] + w * values[hi];
            },
            true);
    } else if (kind != "none") {
        throw std::invalid_argument("unknown density kind: " + kind);
    }
    if (j.contains("atoms"))
        for (const auto& a : j.at("atoms"))
            mu.atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
    mu.signed_ok = true;
    mu.label = "file";
    if (mu.dim == 0) mu.dim = j.value("dim", 0);
    return mu;
}

ZonalMeasure measure_from_spec(const std::string& spec, int dim) {
    const auto star = spec.find('*');
    if (star != std::string::npos)
        return scaled(measure_from_spec(spec.substr(star + 1), dim), std::stod(spec.substr(0, star)));
    if (spec == "sigma") return sigma_measure(dim);
    if (spec == "nu" || spec == "delta") return nu_measure();
    if (spec == "equator") return equator_measure();
    if (spec == "j" || spec == "J") return j_generating_measure(dim);
    if (spec.rfind("file:", 0) == 0) return measure_from_json(load_json(spec.substr(5)), dim);
    throw std::invalid_argument("unknown measure spec: " + spec);
}

MinkowskiEndo endo_from_spec(const std::string& spec, int dim) {
    if (spec.rfind("file:", 0) == 0) {
        MinkowskiEndo e;
        e.mu = measure_from_json(load_json(spec.substr(5)), dim);
        e.dim = dim;
        e.label = spec;
        require_centered(e.mu, dim);
        return e;
    }
    return make_named_endo(spec, dim);
}

LogConcaveFn fn_from_spec(const std::string& spec, int dim, int nodes) {
    const auto segs = split(spec, ':');
    const std::string& kind = segs[0];
    if (kind == "gaussian") {
        double a = 1.0;
        Vec center(static_cast<std::size_t>(dim), 0.0);
        Vec axes(static_cast<std::size_t>(dim), 1.0);
        for (std::size_t i = 1; i < segs.size(); ++i) {
            for (const std::string& part : split(segs[i], ';')) {
                if (part.rfind("a=", 0) == 0) a = std::stod(part.substr(2));
                else if (part.rfind("center=", 0) == 0) center = parse_double_list(part.substr(7));
                else if (part.rfind("axes=", 0) == 0) axes = parse_double_list(part.substr(5));
                else throw std::invalid_argument("unknown gaussian parameter: " + part);
            }
        }
        if (static_cast<int>(center.size()) != dim || static_cast<int>(axes.size()) != dim)
            throw std::invalid_argument("gaussian center/axes must match --dim");
        return gaussian_fn(dim, a, center, axes, 8.0, nodes);
    }
    if (kind == "indicator") {
        if (segs.size() < 2) throw std::invalid_argument("indicator needs a body spec");
        const std::string body_spec = spec.substr(spec.find(':') + 1);
        return indicator_fn(body_from_spec(body_spec, dim, 1), 4.0, nodes);
    }
    if (kind == "norm-p") {
        // norm-p:<body spec>:p=<exponent>
        const auto p_pos = spec.rfind(":p=");
        if (segs.size() < 3 || p_pos == std::string::npos)
            throw std::invalid_argument("norm-p needs a body spec and p=, e.g. norm-p:ball:p=3");
        const double p = std::stod(spec.substr(p_pos + 3));
        const std::string body_spec = spec.substr(spec.find(':') + 1, p_pos - spec.find(':') - 1);
        return norm_power_fn(body_from_spec(body_spec, dim, 1), p, 6.0, nodes);
    }
    if (kind == "file") {
        if (segs.size() < 2) throw std::invalid_argument("file function needs a path");
        return logconcave_from_grid(read_grid_csv(spec.substr(5)), "file");
    }
    throw std::invalid_argument("unknown function spec: " + spec);
}

// ---------------------------------------------------------------------------
// check selection and the worker pool
// ---------------------------------------------------------------------------

const std::vector<CheckId>& geometric_ids() {
    static const std::vector<CheckId> ids = {CheckId::BS,   CheckId::URYSOHN,   CheckId::DIFFBODY,
                                             CheckId::PI1,  CheckId::THM1,      CheckId::THM2_LEFT,
                                             CheckId::THM2_RIGHT};
    return ids;
}

const std::vector<CheckId>& functional_ids() {
    static const std::vector<CheckId> ids = {CheckId::FBS_EVEN,     CheckId::FBS_GENERAL,
                                             CheckId::THM4,         CheckId::CHAIN_LEFT,
                                             CheckId::CHAIN_RIGHT,  CheckId::FUNC_URYSOHN,
                                             CheckId::SHANNON_URYSOHN};
    return ids;
}

std::vector<CheckId> ids_from_string(const std::string& s, bool geometric) {
    const std::vector<CheckId>& universe = geometric ? geometric_ids() : functional_ids();
    if (s.empty() || s == "all") return universe;
    std::vector<CheckId> out;
    for (const std::string& tok : split(s, ',')) {
        if (tok == "thm2") {
            out.push_back(CheckId::THM2_LEFT);
            out.push_back(CheckId::THM2_RIGHT);
            continue;
        }
        if (tok == "chain") {
            out.push_back(CheckId::CHAIN_LEFT);
            out.push_back(CheckId::CHAIN_RIGHT);
            continue;
        }
        out.push_back(parse_check_id(tok));
    }
    for (CheckId id : out)
        if (std::find(universe.begin(), universe.end(), id) == universe.end())
            throw std::invalid_argument(std::string("check id '") + check_id_name(id) +
                                        "' does not belong to this verify mode");
    return out;
}

/*
 * Runs the tasks on `jobs` workers.  Results land in submission order, so
 * output files are deterministic regardless of scheduling; exceptions are
 * rethrown on the main thread (first submission order).
 */
std::vector<InequalityReport> run_pool(
    const std::vector<std::function<InequalityReport()>>& tasks, int jobs) {
    std::vector<InequalityReport> results(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                results[i] = tasks[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int thread_count = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
    if (thread_count == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(thread_count));
        for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

int finish_run(const Options& o, const std::vector<InequalityReport>& reports,
               const std::string& stem) {
    const std::filesystem::path dir(o.out);
    std::filesystem::create_directories(dir);
    write_reports_csv(dir / (stem + ".csv"), reports);
    write_reports_json(dir / (stem + ".json"), reports);
    write_reports_csv(std::cout, reports);
    bool all_pass = true;
    for (const InequalityReport& r : reports) {
        const bool ok = o.strict ? r.pass && r.rel_margin >= 0.0 : r.pass;
        all_pass = all_pass && ok;
    }
    std::cerr << (all_pass ? "PASS" : "FAIL") << " (" << reports.size() << " checks, "
              << (o.strict ? "strict" : "tolerance") << " mode)\n";
    return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_verify(const Options& o, const std::string& mode) {
    const bool geometric = mode == "geometric";
    if (!geometric && mode != "functional")
        throw std::invalid_argument("verify mode must be geometric or functional");
    const std::vector<CheckId> ids = ids_from_string(o.id, geometric);
    std::vector<std::function<InequalityReport()>> tasks;

    if (geometric) {
        const Body k = body_from_spec(o.body.empty() ? "ball" : o.body, o.dim, o.seed);
        const int res = o.grid > 0 ? o.grid : (o.dim == 2 ? 512 : 96);
        const SphereQuadrature quad = build_quadrature(o.dim, res);
        std::optional<MinkowskiEndo> endo;
        if (!o.endo.empty()) endo = endo_from_spec(o.endo, o.dim);
        GeometricOptions gopt;
        if (o.tol > 0.0) gopt.tol_rel = o.tol;
        gopt.seed = o.seed;
        for (CheckId id : ids)
            tasks.emplace_back([id, k, endo, quad, gopt]() {
                return check_geometric(id, k, endo, quad, gopt);
            });
    } else {
        const int nodes = o.grid > 0 ? o.grid : 161;
        LogConcaveFn f = fn_from_spec(o.f.empty() ? "gaussian" : o.f, o.dim, nodes);
        support_eval(f);  // warm the conjugate cache once, before any sharing
        std::optional<ZonalMeasure> mu;
        if (!o.mu.empty()) mu = measure_from_spec(o.mu, o.dim);
        FunctionalOptions fopt;
        fopt.tol_rel = o.tol;
        fopt.seed = o.seed;
        for (CheckId id : ids)
            tasks.emplace_back([id, f, mu, fopt]() mutable {
                return check_functional(id, f, mu, fopt);
            });
    }
    const std::vector<InequalityReport> reports = run_pool(tasks, o.jobs);
    return finish_run(o, reports, "verify_" + mode);
}

int cmd_counterexample(const Options& o) {
    if (o.c_list.empty())
        throw std::invalid_argument("counterexample needs --c with a comma-separated list");
    const std::vector<double> cs = parse_double_list(o.c_list);
    DivergenceOptions opt;
    if (o.grid > 0) opt.resolution = o.grid;
    opt.seed = o.seed;
    const std::vector<DivergenceRow> rows = divergence_sweep(o.dim, cs, opt);
    const std::filesystem::path dir(o.out);
    std::filesystem::create_directories(dir);
    const std::string stem = "counterexample_n" + std::to_string(o.dim);
    write_divergence_csv(dir / (stem + ".csv"), rows);
    write_divergence_plot(dir / (stem + ".dat"), rows);
    write_divergence_csv(std::cout, rows);
    return 0;
}

int cmd_sweep(const Options& o) {
    if (o.id.empty()) throw std::invalid_argument("sweep needs --id");
    if (o.c_list.empty()) throw std::invalid_argument("sweep needs --c with the parameter list");
    const std::vector<CheckId> ids = ids_from_string(o.id, true);
    if (ids.size() != 1) throw std::invalid_argument("sweep runs one check id at a time");
    const CheckId id = ids[0];
    const std::vector<double> params = parse_double_list(o.c_list);
    const int res = o.grid > 0 ? o.grid : (o.dim == 2 ? 512 : 96);
    const SphereQuadrature quad = build_quadrature(o.dim, res);
    std::optional<MinkowskiEndo> endo;
    if (!o.endo.empty()) endo = endo_from_spec(o.endo, o.dim);
    GeometricOptions gopt;
    if (o.tol > 0.0) gopt.tol_rel = o.tol;
    gopt.seed = o.seed;

    const std::string family = o.body.empty() ? "ellipsoid" : o.body;
    auto member = [&](double p) -> Body {
        if (family == "ellipsoid") {
            Vec axes(static_cast<std::size_t>(o.dim), 1.0);
            axes.front() = p;
            axes.back() = 1.0 / p;
            Body e = ellipsoid(axes);
            e.label = "ellipsoid(ratio=" + std::to_string(p) + ")";
            return e;
        }
        if (family == "Kc") return kc_body(p);
        if (family == "Lc") return lc_body(p, o.dim);
        throw std::invalid_argument("sweep family must be ellipsoid, Kc, or Lc");
    };
    auto runner = [&](double p) { return check_geometric(id, member(p), endo, quad, gopt); };
    const std::vector<InequalityReport> reports = equality_margin_scan(runner, params);
    return finish_run(o, reports, std::string("sweep_") + check_id_name(id));
}

int cmd_report(const Options& o) {
    const std::filesystem::path dir(o.out);
    if (!std::filesystem::is_directory(dir))
        throw std::invalid_argument("report needs an existing --out directory");
    std::vector<InequalityReport> merged;
    json sources = json::array();
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const std::filesystem::path& p : files) {
        std::ifstream is(p);
        std::string header;
        if (!std::getline(is, header) || header != report_csv_header()) continue;
        is.close();
        const std::vector<InequalityReport> rows = read_reports_csv(p);
        merged.insert(merged.end(), rows.begin(), rows.end());
        sources.push_back(json{{"file", p.filename().string()}, {"hash", file_content_hash(p)}});
    }
    if (sources.empty())
        throw std::invalid_argument("report found no result files in " + dir.string());

    const std::vector<IdSummary> by_id = summarize_reports(merged);
    int passed = 0;
    for (const InequalityReport& r : merged) passed += r.pass ? 1 : 0;
    const json summary = {{"sources", sources},
                          {"total", merged.size()},
                          {"passed", passed},
                          {"by_id", summary_to_json(by_id)}};
    write_reports_csv(dir / "report_merged.csv", merged);
    {
        std::ofstream os(dir / "report_summary.json");
        os << summary.dump(2) << '\n';
    }
    {
        std::ofstream os(dir / "report_margins.dat");
        os << "# id rel_margin\n";
        for (const InequalityReport& r : merged) os << r.id << ' ' << r.rel_margin << '\n';
    }
    std::cout << summary.dump(2) << '\n';
    if (o.strict)
        for (const InequalityReport& r : merged)
            if (!r.pass) return 1;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Support-function and log-concave inequality toolkit"};
    app.fallthrough();
    app.set_config("--config", "", "key=value config file; command-line flags take precedence");

    Options o;
    if (const char* env = std::getenv("OUTPUT_DIR")) o.out = env;

    app.add_option("--dim", o.dim, "ambient dimension")->capture_default_str();
    app.add_option("--id", o.id, "check id, comma list, or 'all'");
    app.add_option("--endo", o.endo, "endomorphism: sigma|delta|pi1|equator|J|k*name|file:<json>");
    app.add_option("--mu", o.mu, "zonal measure: sigma|nu|equator|j|k*name|file:<json>");
    app.add_option("--body", o.body,
                   "body: ball|cube|simplex|segment|ellipsoid:a1,..|Kc:c=|Lc:c=|random-polytope[:k=]|file:<json>");
    app.add_option("--f", o.f,
                   "function: gaussian[:a=;center=..;axes=..]|indicator:<body>|norm-p:<body>:p=|file:<grid csv>");
    app.add_option("--c", o.c_list, "comma-separated parameter list");
    app.add_option("--seed", o.seed, "random seed recorded in reports")->capture_default_str();
    app.add_option("--grid", o.grid, "sphere resolution / grid nodes per axis (0 = default)");
    app.add_option("--tol", o.tol, "relative tolerance override (0 = per-kind default)");
    app.add_option("--jobs", o.jobs, "worker threads for independent checks")->capture_default_str();
    app.add_option("--out", o.out, "output directory (default: OUTPUT_DIR env or '.')")
        ->capture_default_str();
    app.add_flag("--strict", o.strict, "require non-negative margins, not just within tolerance");

    std::string verify_mode;
    CLI::App* verify = app.add_subcommand("verify", "evaluate inequality checks");
    verify->add_option("mode", verify_mode, "geometric or functional")->required();
    CLI::App* counter = app.add_subcommand("counterexample", "divergence sweep of the flattening family");
    CLI::App* report = app.add_subcommand("report", "merge result files in --out into a summary");
    CLI::App* sweep = app.add_subcommand("sweep", "equality-margin scan over a parametrized family");
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (verify->parsed()) return cmd_verify(o, verify_mode);
        if (counter->parsed()) return cmd_counterexample(o);
        if (report->parsed()) return cmd_report(o);
        if (sweep->parsed()) return cmd_sweep(o);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
