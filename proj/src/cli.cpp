#include "pointprob/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pointprob/errors.hpp"
#include "pointprob/estimator.hpp"
#include "pointprob/model.hpp"
#include "pointprob/monotone.hpp"
#include "pointprob/oracle.hpp"
#include "pointprob/tilting.hpp"

namespace pointprob {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// JSON output
// ---------------------------------------------------------------------------

// All doubles are printed with %.17g so that reading them back yields the
// exact bit pattern; non-finite values become null.
std::string jnum(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string jstr(const std::string& s) {
    std::string out = "\"";
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
    return out;
}

std::string jbool(bool b) { return b ? "true" : "false"; }

std::string jint_opt(const std::optional<long long>& v) {
    return v ? std::to_string(*v) : "null";
}

void emit_estimate_core(std::ostream& o, const EstimateResult& r) {
    o << "\"estimate\":" << jnum(r.estimate) << ",\"error_term\":" << jnum(r.error_term)
      << ",\"t\":" << jnum(r.t) << ",\"tau\":" << jnum(r.tau)
      << ",\"epsilon\":" << (r.epsilon ? jnum(*r.epsilon) : "null")
      << ",\"flags\":{\"sigma_large_enough\":" << jbool(r.flags.sigma_large_enough)
      << ",\"tau_small_enough\":" << jbool(r.flags.tau_small_enough)
      << ",\"epsilon_le_pi\":" << jbool(r.flags.epsilon_le_pi) << "}";
}

// ---------------------------------------------------------------------------
// Model file parsing
// ---------------------------------------------------------------------------

json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

double require_number(const json& obj, const std::string& addr, const std::string& name) {
    if (!obj.contains(name) || !obj[name].is_number())
        throw ParseError(addr + "." + name + ": expected a number");
    return obj[name].get<double>();
}

DistributionSpec parse_dist(const json& v, const std::string& addr) {
    if (!v.contains("family") || !v["family"].is_string())
        throw ParseError(addr + ".family: expected a string");
    const std::string family = v["family"].get<std::string>();
    if (!v.contains("params") || !v["params"].is_object())
        throw ParseError(addr + ".params: expected an object");
    const json& params = v["params"];
    const std::string paddr = addr + ".params";

    if (family == "bernoulli") return Bernoulli(require_number(params, paddr, "p"));
    if (family == "geometric") return Geometric(require_number(params, paddr, "p"));
    if (family == "poisson") return Poisson(require_number(params, paddr, "rate"));
    if (family == "finite") {
        if (!params.contains("atoms") || !params["atoms"].is_array() ||
            params["atoms"].empty())
            throw ParseError(paddr + ".atoms: expected a non-empty array");
        std::vector<FiniteAtom> atoms;
        std::size_t i = 0;
        for (const json& a : params["atoms"]) {
            const std::string aaddr = paddr + ".atoms[" + std::to_string(i++) + "]";
            if (!a.is_object()) throw ParseError(aaddr + ": expected an object");
            if (!a.contains("value") || !a["value"].is_number_integer())
                throw ParseError(aaddr + ".value: expected an integer");
            atoms.push_back({a["value"].get<long long>(),
                             require_number(a, aaddr, "weight")});
        }
        return Finite(std::move(atoms));
    }
    throw ParseError(addr + ".family: unknown family \"" + family + "\"");
}

SumModel parse_model(const json& j, const std::string& where, std::string* label_out) {
    if (!j.is_object()) throw ParseError(where + ": expected an object at the top level");
    if (j.contains("label")) {
        if (!j["label"].is_string()) throw ParseError("label: expected a string");
        if (label_out) *label_out = j["label"].get<std::string>();
    }
    if (!j.contains("variables") || !j["variables"].is_array() || j["variables"].empty())
        throw ParseError("variables: expected a non-empty array");

    std::vector<Component> comps;
    std::size_t i = 0;
    for (const json& v : j["variables"]) {
        const std::string addr = "variables[" + std::to_string(i++) + "]";
        if (!v.is_object()) throw ParseError(addr + ": expected an object");
        long long count = 1;
        if (v.contains("count")) {
            if (!v["count"].is_number_integer())
                throw ParseError(addr + ".count: expected an integer");
            count = v["count"].get<long long>();
        }
        comps.push_back({parse_dist(v, addr), count});
    }
    return SumModel(std::move(comps));
}

SumModel load_model(const std::string& path, std::string* label_out) {
    return parse_model(parse_json_file(path), path, label_out);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int run_summarize(const std::string& path, std::ostream& out) {
    std::string label;
    const SumModel m = load_model(path, &label);
    const MomentSummary s = summarize(m);
    const EssentialBounds b = essential_bounds(m);
    const MgfInterval dom = mgf_domain_intersection(m);

    out << "{\"label\":" << (label.empty() ? "null" : jstr(label))
        << ",\"size\":" << m.size() << ",\"mu\":" << jnum(s.mu)
        << ",\"sigma_sq\":" << jnum(s.sigma_sq) << ",\"sigma\":" << jnum(s.sigma())
        << ",\"eta\":" << jnum(s.eta) << ",\"tau\":" << (s.tau ? jnum(*s.tau) : "null")
        << ",\"support\":{\"lower\":" << jint_opt(b.lower)
        << ",\"upper\":" << jint_opt(b.upper) << "}"
        << ",\"mgf\":{\"lo\":" << jnum(dom.lo) << ",\"hi\":" << jnum(dom.hi) << "}}\n";
    return 0;
}

struct EstimateArgs {
    std::string path;
    long long n = 0;
    std::string method = "gaussian";
    double eps = 1e-9;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 12345;
    std::size_t quad = 0;
};

int run_estimate(const EstimateArgs& a, std::ostream& out) {
    const SumModel m = load_model(a.path, nullptr);
    if (a.method == "gaussian") {
        const EstimateResult r = gaussian_point_estimate(m, a.n);
        out << "{\"method\":\"gaussian\",\"n\":" << a.n << ",";
        emit_estimate_core(out, r);
        out << "}\n";
    } else if (a.method == "tilted") {
        const TailEstimate te = tail_point_estimate(m, a.n);
        out << "{\"method\":\"tilted\",\"n\":" << a.n << ",";
        emit_estimate_core(out, te.result);
        out << ",\"theta\":" << jnum(te.solution.theta)
            << ",\"rate\":" << jnum(rate_function(te.solution))
            << ",\"residual\":" << jnum(te.solution.residual) << "}\n";
    } else if (a.method == "exact") {
        const Pmf p = exact_pmf(m, a.eps);
        out << "{\"method\":\"exact\",\"n\":" << a.n << ",\"prob\":" << jnum(p.at(a.n))
            << ",\"tail_defect\":" << jnum(p.tail_defect) << ",\"eps\":" << jnum(a.eps)
            << "}\n";
    } else if (a.method == "invert") {
        const InversionDetail d = inversion_prob_detail(m, a.n, a.quad);
        out << "{\"method\":\"invert\",\"n\":" << a.n << ",\"prob\":" << jnum(d.prob)
            << ",\"imag_residual\":" << jnum(d.imag_residual)
            << ",\"quad_points\":" << d.quad_points << "}\n";
    } else {  // mc; the option is IsMember-checked, so this is exhaustive
        const McEstimate e = mc_estimate(m, a.n, a.samples, a.seed);
        out << "{\"method\":\"mc\",\"n\":" << a.n << ",\"estimate\":" << jnum(e.estimate)
            << ",\"std_error\":" << jnum(e.std_error) << ",\"samples\":" << a.samples
            << ",\"seed\":" << a.seed << "}\n";
    }
    return 0;
}

struct MonotoneArgs {
    std::string path;
    std::size_t grid = 4096;
    double tol = 1e-12;
    bool strong = false;
    std::size_t theta_samples = 7;
};

int run_monotone(const MonotoneArgs& a, std::ostream& out) {
    const SumModel m = load_model(a.path, nullptr);
    if (!a.strong) {
        const MonotoneReport r = check_monotone(m, a.grid, a.tol);
        out << "{\"strong\":false,\"is_monotone\":" << jbool(r.is_monotone)
            << ",\"worst_increase\":" << jnum(r.worst_increase)
            << ",\"worst_location\":" << jnum(r.worst_location)
            << ",\"grid_size\":" << r.grid_size << ",\"tolerance\":" << jnum(r.tolerance)
            << "}\n";
        return r.is_monotone ? 0 : 5;
    }
    const StrongMonotoneReport r = check_strong_monotone(m, a.theta_samples, a.grid, a.tol);
    out << "{\"strong\":true,\"all_monotone\":" << jbool(r.all_monotone) << ",\"entries\":[";
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
        const StrongMonotoneEntry& e = r.entries[i];
        out << (i ? "," : "") << "{\"theta\":" << jnum(e.theta)
            << ",\"is_monotone\":" << jbool(e.report.is_monotone)
            << ",\"worst_increase\":" << jnum(e.report.worst_increase)
            << ",\"worst_location\":" << jnum(e.report.worst_location) << "}";
    }
    out << "],\"grid_size\":" << a.grid << ",\"tolerance\":" << jnum(a.tol) << "}\n";
    return r.all_monotone ? 0 : 5;
}

int run_boundary(const std::string& path, const std::string& side, std::ostream& out) {
    const SumModel m = load_model(path, nullptr);
    const Boundary b = (side == "lower") ? Boundary::lower : Boundary::upper;
    const double prob = boundary_point_prob(m, b);
    const EssentialBounds bounds = essential_bounds(m);
    const std::optional<long long> point = (b == Boundary::lower) ? bounds.lower : bounds.upper;
    out << "{\"side\":" << jstr(side) << ",\"point\":" << jint_opt(point)
        << ",\"prob\":" << jnum(prob) << "}\n";
    return 0;
}

// ---------------------------------------------------------------------------
// Calibration sweep
// ---------------------------------------------------------------------------

struct CalTask {
    std::string name;
    SumModel model;
};

struct CalResult {
    std::string rows;
    double max_ratio = 0.0;
};

CalResult calibrate_one(const CalTask& task, double eps, double t_max) {
    const Pmf exact = exact_pmf(task.model, eps);
    const MomentSummary s = summarize(task.model);
    const double sigma = s.sigma();

    long long lo = static_cast<long long>(std::ceil(s.mu - t_max * sigma));
    long long hi = static_cast<long long>(std::floor(s.mu + t_max * sigma));
    lo = std::max(lo, exact.lo());
    hi = std::min(hi, exact.hi());

    CalResult out;
    std::ostringstream rows;
    for (long long n = lo; n <= hi; ++n) {
        const EstimateResult r = gaussian_point_estimate(task.model, n);
        const double ex = exact.at(n);
        const double abs_error = std::fabs(ex - r.estimate);
        const double ratio = abs_error / r.error_term;
        out.max_ratio = std::max(out.max_ratio, ratio);
        rows << task.name << '\t' << n << '\t' << jnum(r.t) << '\t' << jnum(ex) << '\t'
             << jnum(r.estimate) << '\t' << jnum(abs_error) << '\t' << jnum(r.error_term)
             << '\t' << jnum(ratio) << '\n';
    }
    out.rows = rows.str();
    return out;
}

std::size_t thread_count_from_env() {
    const char* env = std::getenv("POINTPROB_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
        throw ValidationError("POINTPROB_THREADS must be a positive integer");
    return static_cast<std::size_t>(v);
}

int run_calibrate(const std::string& config_path, const std::string& out_path,
                  std::ostream& out) {
    const json cfg = parse_json_file(config_path);
    if (!cfg.is_object()) throw ParseError(config_path + ": expected an object");

    double eps = 1e-11;
    if (cfg.contains("eps")) eps = require_number(cfg, "config", "eps");
    double t_max = 3.0;
    if (cfg.contains("t_max")) t_max = require_number(cfg, "config", "t_max");
    if (!(t_max > 0.0) || !std::isfinite(t_max))
        throw ValidationError("t_max must be positive and finite");

    std::vector<CalTask> tasks;
    if (cfg.contains("binomial_sweep")) {
        const json& bs = cfg["binomial_sweep"];
        if (!bs.is_object()) throw ParseError("binomial_sweep: expected an object");
        const double p = bs.contains("p") ? require_number(bs, "binomial_sweep", "p") : 0.5;
        if (!bs.contains("sizes") || !bs["sizes"].is_array() || bs["sizes"].empty())
            throw ParseError("binomial_sweep.sizes: expected a non-empty array");
        for (const json& sz : bs["sizes"]) {
            if (!sz.is_number_integer())
                throw ParseError("binomial_sweep.sizes: expected integers");
            const long long k = sz.get<long long>();
            tasks.push_back({"binomial-" + std::to_string(k),
                             SumModel({{Bernoulli(p), k}})});
        }
    }
    if (cfg.contains("random_mixed")) {
        const json& rm = cfg["random_mixed"];
        if (!rm.is_object()) throw ParseError("random_mixed: expected an object");
        const auto count =
            static_cast<long long>(require_number(rm, "random_mixed", "models"));
        const auto min_size =
            static_cast<long long>(require_number(rm, "random_mixed", "min_size"));
        const auto max_size =
            static_cast<long long>(require_number(rm, "random_mixed", "max_size"));
        std::uint64_t seed = 7;
        if (rm.contains("seed")) seed = static_cast<std::uint64_t>(
            require_number(rm, "random_mixed", "seed"));
        if (count < 1) throw ValidationError("random_mixed.models must be at least 1");
        if (min_size < 3 || max_size < min_size)
            throw ValidationError("random_mixed sizes must satisfy 3 <= min_size <= max_size");

        // Balanced three-family mixes; same shape the acceptance sweep uses.
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<long long> size_dist(min_size, max_size);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (long long i = 0; i < count; ++i) {
            const long long k = size_dist(rng);
            const long long kb = k / 3, kg = k / 3, kp = k - kb - kg;
            const double pb = 0.1 + 0.8 * u(rng);
            const double pg = 0.1 + 0.5 * u(rng);
            const double lam = 0.3 + 2.7 * u(rng);
            tasks.push_back({"mixed-" + std::to_string(i),
                             SumModel({{Bernoulli(pb), kb},
                                       {Geometric(pg), kg},
                                       {Poisson(lam), kp}})});
        }
    }
    if (tasks.empty())
        throw ValidationError("calibrate config needs binomial_sweep or random_mixed");

    std::vector<CalResult> results(tasks.size());
    std::vector<std::exception_ptr> failures(tasks.size());
    const std::size_t threads = std::min(thread_count_from_env(), tasks.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i)
            results[i] = calibrate_one(tasks[i], eps, t_max);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                try {
                    results[i] = calibrate_one(tasks[i], eps, t_max);
                } catch (...) {
                    failures[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
        for (const std::exception_ptr& e : failures)
            if (e) std::rethrow_exception(e);
    }

    std::ofstream file;
    std::ostream* dst = &out;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw ParseError("cannot open " + out_path + " for writing");
        dst = &file;
    }
    *dst << "model\tn\tt\texact\testimate\tabs_error\terror_term\tratio\n";
    double max_ratio = 0.0;
    for (const CalResult& r : results) {
        *dst << r.rows;
        max_ratio = std::max(max_ratio, r.max_ratio);
    }
    *dst << "max_ratio\t" << jnum(max_ratio) << '\n';
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"point probabilities for sums of independent integer variables"};
    app.require_subcommand(1);

    std::string sum_path;
    CLI::App* sum = app.add_subcommand("summarize", "print moment aggregates of a model");
    sum->add_option("model", sum_path, "model JSON file")->required();

    EstimateArgs est;
    CLI::App* est_cmd = app.add_subcommand("estimate", "estimate Pr[X = n]");
    est_cmd->add_option("model", est.path, "model JSON file")->required();
    est_cmd->add_option("-n,--point", est.n, "integer point to estimate at")->required();
    est_cmd->add_option("--method", est.method, "gaussian|tilted|exact|invert|mc")
        ->check(CLI::IsMember({"gaussian", "tilted", "exact", "invert", "mc"}));
    est_cmd->add_option("--eps", est.eps, "truncation budget for --method exact");
    est_cmd->add_option("--samples", est.samples, "sample count for --method mc");
    est_cmd->add_option("--seed", est.seed, "rng seed for --method mc");
    est_cmd->add_option("--quad", est.quad, "quadrature points for --method invert (0 = auto)");

    MonotoneArgs mono;
    CLI::App* mono_cmd = app.add_subcommand("monotone", "check transform monotonicity");
    mono_cmd->add_option("model", mono.path, "model JSON file")->required();
    mono_cmd->add_option("--grid", mono.grid, "grid points over [0, pi]");
    mono_cmd->add_option("--tol", mono.tol, "allowed rise before reporting a violation");
    mono_cmd->add_flag("--strong", mono.strong, "also sweep exponential tilts");
    mono_cmd->add_option("--theta-samples", mono.theta_samples,
                         "tilt samples for --strong");

    std::string bnd_path;
    std::string bnd_side = "lower";
    CLI::App* bnd_cmd = app.add_subcommand("boundary", "exact end point probability");
    bnd_cmd->add_option("model", bnd_path, "model JSON file")->required();
    bnd_cmd->add_option("--side", bnd_side, "lower|upper")
        ->check(CLI::IsMember({"lower", "upper"}));

    std::string cal_config;
    std::string cal_out;
    CLI::App* cal_cmd =
        app.add_subcommand("calibrate", "sweep estimate error against the exact pmf");
    cal_cmd->add_option("config", cal_config, "calibration config JSON file")->required();
    cal_cmd->add_option("--out", cal_out, "write the TSV report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.get_name() << ": " << e.what() << "\n";
        return 2;
    }

    try {
        if (sum->parsed()) return run_summarize(sum_path, out);
        if (est_cmd->parsed()) return run_estimate(est, out);
        if (mono_cmd->parsed()) return run_monotone(mono, out);
        if (bnd_cmd->parsed()) return run_boundary(bnd_path, bnd_side, out);
        return run_calibrate(cal_config, cal_out, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const ResourceLimit& e) {
        err << "error: " << e.what() << "\n";
        return 6;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace pointprob
