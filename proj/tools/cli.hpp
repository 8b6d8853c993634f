/*
   Copyright 2026 The champagne authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// Command-line front end. `run` takes the arguments after the program name
// so tests can drive it in-process.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "champagne/bounds.hpp"
#include "champagne/config.hpp"
#include "champagne/io.hpp"
#include "champagne/kernel.hpp"
#include "champagne/sim.hpp"

#ifndef CHAMPAGNE_VERSION
#define CHAMPAGNE_VERSION "0.1.0"
#endif

namespace champagne::cli {

inline constexpr const char* kToolVersion = CHAMPAGNE_VERSION;

enum ExitCode : int {
    kOk = 0,
    kError = 1,
    kCertificationFailed = 2,
    kAvoidable = 3,
    kInconclusive = 4,
    kInvalidEstimate = 5,
    kNotReproduced = 6,
};

/// 64-bit FNV-1a, used to fingerprint outputs in manifests.
inline std::string digest(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

inline double to_number(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw FormatError("not a number: \"" + s + "\"");
    }
    if (pos != s.size()) throw FormatError("not a number: \"" + s + "\"");
    return v;
}

inline std::vector<double> to_point(const std::string& s) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) out.push_back(to_number(part));
    return out;
}

inline bool is_key_value(const std::string& s) {
    return s.find('=') != std::string::npos && s.rfind("--", 0) != 0;
}

/// Folds `--riesz alpha=2 d=3`, `--geostable ...` and `--process name k=v ...`
/// into single option values.
inline std::vector<std::string> fold_inline_specs(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--riesz" || a == "--geostable") {
            json j = {{"family", a == "--riesz" ? "riesz" : "geometric_stable"}};
            while (i + 1 < args.size() && is_key_value(args[i + 1])) {
                const auto kv = split(args[++i], '=');
                if (kv.size() != 2) throw FormatError("bad key=value \"" + args[i] + "\"");
                j[kv[0]] = to_number(kv[1]);
            }
            out.push_back("--kernel");
            out.push_back(j.dump());
        } else if (a == "--process") {
            std::string spec;
            if (i + 1 < args.size()) spec = args[++i];
            while (i + 1 < args.size() && is_key_value(args[i + 1])) spec += " " + args[++i];
            out.push_back("--process");
            out.push_back(spec);
        } else {
            out.push_back(a);
        }
    }
    return out;
}

/// riesz:ALPHA:D, geostable:ALPHA:DELTA:D:R0:R1, JSON text, or a JSON file.
inline Kernel parse_kernel(const std::string& spec) {
    if (spec.rfind("riesz:", 0) == 0) {
        const auto p = split(spec, ':');
        if (p.size() != 3) throw FormatError("expected riesz:ALPHA:D");
        return kernel_from_json({{"family", "riesz"}, {"alpha", to_number(p[1])}, {"d", to_number(p[2])}});
    }
    if (spec.rfind("geostable:", 0) == 0) {
        const auto p = split(spec, ':');
        if (p.size() != 6) throw FormatError("expected geostable:ALPHA:DELTA:D:R0:R1");
        return kernel_from_json({{"family", "geometric_stable"}, {"alpha", to_number(p[1])}, {"delta", to_number(p[2])},
                                 {"d", to_number(p[3])}, {"r0", to_number(p[4])}, {"r1", to_number(p[5])}});
    }
    return kernel_from_json(parse_json(read_text_or_file(spec)));
}

/// "brownian d=3" or "stable alpha=1 d=2".
inline ProcessSpec parse_process(const std::string& spec) {
    const auto words = split(spec, ' ');
    if (words.empty() || words[0].empty()) throw FormatError("missing process kind");
    double alpha = 2.0;
    int d = 0;
    for (std::size_t i = 1; i < words.size(); ++i) {
        if (words[i].empty()) continue;
        const auto kv = split(words[i], '=');
        if (kv.size() != 2) throw FormatError("bad process parameter \"" + words[i] + "\"");
        if (kv[0] == "d") {
            const double v = to_number(kv[1]);
            if (v != std::floor(v)) throw FormatError("d must be an integer");
            d = static_cast<int>(v);
        } else if (kv[0] == "alpha") {
            alpha = to_number(kv[1]);
        } else {
            throw FormatError("unknown process parameter \"" + kv[0] + "\"");
        }
    }
    if (d == 0) throw FormatError("process needs d=...");
    if (words[0] == "brownian") return ProcessSpec::brownian(d);
    if (words[0] == "stable") return ProcessSpec::stable(alpha, d);
    throw FormatError("unknown process \"" + words[0] + "\"");
}

inline std::uint64_t to_count(double v, const char* what) {
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) throw FormatError(std::string(what) + " must be a whole number");
    return static_cast<std::uint64_t>(v);
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot write \"" + path + "\"");
    f << text;
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open \"" + path + "\"");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace detail

struct Options {
    std::string kernel_spec;
    std::string config_spec;
    std::string process_spec;
    std::string action;
    std::string out_path;
    std::string csv_path;
    std::string manifest_path;
    std::string x0;
    std::vector<std::string> probes;
    std::string extents;
    double outer = 1e4;
    double outer_factor = 3.0;
    double trials = 0;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::optional<double> tol;
    std::string method = "exact";
    double dt = 1e-3;
    std::uint64_t max_steps = kMaxSteps;
    std::optional<double> shell_rho;
    std::optional<double> r_min, r_max;
    std::size_t n = 64;
    double K = 2.0;
    std::optional<double> r;
    double dist = 0.0;
    double eps = 0.25;
    std::optional<double> rho, rho_lo, rho_hi;
};

struct Outcome {
    int code = kOk;
    std::string stdout_text;           ///< primary JSON document
    std::vector<std::string> files;    ///< files written
    json inputs = json::object();      ///< resolved parameters
};

namespace detail {

inline Kernel require_kernel(const Options& o) {
    if (o.kernel_spec.empty()) throw FormatError("a kernel is required (--kernel, --riesz or --geostable)");
    return parse_kernel(o.kernel_spec);
}

inline void emit(Outcome& res, const Options& o, const json& doc) {
    res.stdout_text = doc.dump(2) + "\n";
    if (!o.out_path.empty()) {
        write_file(o.out_path, res.stdout_text);
        res.files.push_back(o.out_path);
    }
}

inline Outcome cmd_kernel(const Options& o) {
    Outcome res;
    const Kernel k = require_kernel(o);
    res.inputs["kernel"] = to_json(k);
    const std::string action = o.action.empty() ? "certify" : o.action;
    res.inputs["action"] = action;
    const double t = std::max(k.r0(), k.r1());
    const double lo = o.r_min.value_or(t > 0.0 ? 1.01 * t : 1e-3);
    const double hi = o.r_max.value_or(1e3 * std::max(1.0, t));
    res.inputs["r_min"] = lo;
    res.inputs["r_max"] = hi;
    res.inputs["n"] = o.n;
    json doc = {{"kernel", to_json(k)}};
    if (action == "certify") {
        const auto cert = certify(k, lo, hi, o.n);
        doc["certificate"] = to_json(cert);
    } else if (action == "verify-ld") {
        const auto ld = verify_ld(k, lo, hi, o.n);
        doc["verify_ld"] = to_json(ld);
        if (!ld.holds) res.code = kCertificationFailed;
    } else if (action == "verify-ud") {
        res.inputs["K"] = o.K;
        const auto ud = verify_ud(k, o.K, lo, hi, o.n);
        doc["verify_ud"] = to_json(ud);
        if (!ud.holds) res.code = kCertificationFailed;
    } else if (action == "eval" || action == "ld-ratio") {
        if (!o.r) throw FormatError(action + " needs --r");
        res.inputs["r"] = *o.r;
        doc[action == "eval" ? "g" : "ld_ratio"] = action == "eval" ? eval(k, *o.r) : ld_ratio(k, *o.r);
    } else if (action == "ball-average") {
        if (!o.r) throw FormatError("ball-average needs --r");
        res.inputs["r"] = *o.r;
        res.inputs["dist"] = o.dist;
        doc["ball_average_potential"] = ball_average_potential(k, o.dist, *o.r);
    } else {
        throw FormatError("unknown kernel action \"" + action + "\"");
    }
    emit(res, o, doc);
    return res;
}

inline Outcome cmd_classify(const Options& o) {
    Outcome res;
    const Kernel k = require_kernel(o);
    if (o.config_spec.empty()) throw FormatError("classify needs --config");
    const json cj = parse_json(read_text_or_file(o.config_spec));
    res.inputs = {{"kernel", to_json(k)}, {"config", cj}};
    const BallConfig cfg = config_from_json(cj);
    const Verdict v = classify(cfg, k);
    emit(res, o, to_json(v));
    switch (v.label()) {
        case VerdictLabel::Unavoidable: res.code = kOk; break;
        case VerdictLabel::Avoidable: res.code = kAvoidable; break;
        case VerdictLabel::Inconclusive: res.code = kInconclusive; break;
    }
    return res;
}

inline SimOptions sim_options(const Options& o) {
    SimOptions s;
    s.tol = o.tol;
    s.threads = o.threads;
    if (o.method == "exact")
        s.method = SimMethod::Exact;
    else if (o.method == "increment")
        s.method = SimMethod::IncrementStepping;
    else
        throw FormatError("unknown method \"" + o.method + "\" (exact or increment)");
    s.dt = o.dt;
    s.max_steps = o.max_steps;
    return s;
}

inline Outcome cmd_simulate(const Options& o, std::uint64_t seed) {
    Outcome res;
    if (o.process_spec.empty()) throw FormatError("simulate needs --process");
    const ProcessSpec proc = parse_process(o.process_spec);
    const std::uint64_t trials = to_count(o.trials, "--trials");
    require(trials >= 100, "simulate: need at least 100 trials");
    const SimOptions opts = sim_options(o);
    res.inputs = {{"process", proc.name()}, {"d", proc.d}, {"alpha", proc.alpha}, {"trials", trials},
                  {"seed", seed},           {"outer", o.outer}, {"method", o.method}};
    if (o.tol) res.inputs["tol"] = *o.tol;
    const Kernel kernel = o.kernel_spec.empty() ? Kernel::riesz(proc.alpha, proc.d) : parse_kernel(o.kernel_spec);
    bool valid = true;
    json doc;
    std::optional<ProbeReport> report;
    if (!o.extents.empty()) {
        if (o.config_spec.empty()) throw FormatError("--extents needs a generator --config");
        const json cj = parse_json(read_text_or_file(o.config_spec));
        res.inputs["config"] = cj;
        const auto gen = generator_from_json(cj);
        if (!gen) throw FormatError("--extents needs a config with a lattice generator");
        require(gen->d == proc.d, "simulate: config dimension does not match the process");
        const auto x0 = o.x0.empty() ? std::vector<double>(proc.d, 0.0) : to_point(o.x0);
        res.inputs["extents"] = o.extents;
        res.inputs["outer_factor"] = o.outer_factor;
        res.inputs["x0"] = x0;
        report = extent_sweep(proc, kernel, gen->spacing, gen->profile, to_point(o.extents), x0, o.outer_factor,
                              trials, seed, opts);
    } else if (!o.probes.empty()) {
        if (o.config_spec.empty()) throw FormatError("--probe needs --config");
        const json cj = parse_json(read_text_or_file(o.config_spec));
        res.inputs["config"] = cj;
        const BallConfig cfg = config_from_json(cj);
        std::vector<std::vector<double>> probes;
        for (const auto& p : o.probes) probes.push_back(to_point(p));
        res.inputs["probes"] = probes;
        report = verdict_probe(proc, cfg, kernel, probes, o.outer, trials, seed, opts);
    } else {
        if (o.x0.empty()) throw FormatError("simulate needs --x0, --probe or --extents");
        const auto x0 = to_point(o.x0);
        res.inputs["x0"] = x0;
        HittingEstimate est;
        if (o.shell_rho) {
            res.inputs["shell_rho"] = *o.shell_rho;
            est = estimate_hitting(proc, shell_target(proc.d, *o.shell_rho), x0, o.outer, trials, seed, opts);
        } else {
            if (o.config_spec.empty()) throw FormatError("simulate needs --config or --shell");
            const json cj = parse_json(read_text_or_file(o.config_spec));
            res.inputs["config"] = cj;
            const BallConfig cfg = config_from_json(cj);
            require(cfg.dim() == proc.d, "simulate: config dimension does not match the process");
            est = estimate_hitting(proc, cfg, x0, o.outer, trials, seed, opts);
        }
        valid = est.valid;
        doc = to_json(est);
    }
    if (report) {
        for (const auto& row : report->rows) valid = valid && row.estimate.valid;
        doc = to_json(*report);
        if (!o.csv_path.empty()) {
            write_file(o.csv_path, probe_csv(*report));
            res.files.push_back(o.csv_path);
        }
    }
    emit(res, o, doc);
    if (!valid) res.code = kInvalidEstimate;
    return res;
}

inline Outcome cmd_bounds(const Options& o) {
    Outcome res;
    const Kernel k = require_kernel(o);
    const std::string action = o.action.empty() ? "cap" : o.action;
    res.inputs = {{"kernel", to_json(k)}, {"action", action}};
    if (action == "shell") require(o.eps > 0.0 && o.eps <= 0.25, "bounds shell: eps must lie in (0, 1/4]");
    const KernelCertificate cert = certify(k);
    RhoRange range = default_rho_range(k);
    if (o.rho_lo) range.lo = *o.rho_lo;
    if (o.rho_hi) range.hi = *o.rho_hi;
    json doc = {{"kernel", to_json(k)}, {"certificate", to_json(cert)}};
    if (action == "cap") {
        if (!o.r) throw FormatError("bounds cap needs --r");
        res.inputs["r"] = *o.r;
        doc["capacity"] = to_json(capacity_bounds(k, cert, *o.r));
    } else if (action == "reduced") {
        if (!o.r) throw FormatError("bounds reduced needs --r");
        res.inputs["r"] = *o.r;
        res.inputs["dist"] = o.dist;
        doc["reduced_function"] = to_json(reduced_function_bounds(k, cert, *o.r, o.dist));
    } else if (action == "hame") {
        const double r = o.r.value_or(range.lo);
        res.inputs["r"] = r;
        res.inputs["rho_range"] = {range.lo, range.hi};
        doc["hame"] = to_json(hame_constants(k, cert, r, range));
    } else if (action == "shell" || action == "shell-bound") {
        res.inputs["eps"] = o.eps;
        res.inputs["rho_range"] = {range.lo, range.hi};
        const ShellConstants sc = shell_constants(k, cert, o.eps, range);
        doc["shell"] = to_json(sc);
        if (action == "shell-bound") {
            if (!o.rho) throw FormatError("bounds shell-bound needs --rho");
            if (o.config_spec.empty()) throw FormatError("bounds shell-bound needs --config");
            const json cj = parse_json(read_text_or_file(o.config_spec));
            res.inputs["config"] = cj;
            res.inputs["rho"] = *o.rho;
            doc["shell_bound"] = to_json(shell_lower_bound(sc, k, *o.rho, config_from_json(cj)));
        }
    } else {
        throw FormatError("unknown bounds action \"" + action + "\"");
    }
    emit(res, o, doc);
    return res;
}

}  // namespace detail

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

namespace detail {

/// Replays a manifest's argv with outputs redirected and compares digests.
inline Outcome cmd_report(const Options& o, std::ostream& err) {
    Outcome res;
    if (o.manifest_path.empty()) throw FormatError("report needs --manifest");
    const json m = parse_json(read_file(o.manifest_path));
    res.inputs = {{"manifest", o.manifest_path}};
    std::vector<std::string> argv = champagne::detail::field(m, "argv").get<std::vector<std::string>>();
    const auto dir = std::filesystem::temp_directory_path() /
                     ("champagne-replay-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    std::filesystem::create_directories(dir);
    std::vector<std::pair<std::string, std::string>> redirected;  // original, replay
    for (std::size_t i = 0; i + 1 < argv.size(); ++i) {
        if (argv[i] == "--out" || argv[i] == "--csv" || argv[i] == "--manifest") {
            const std::string replay = (dir / (std::to_string(i) + "_" + std::filesystem::path(argv[i + 1]).filename().string())).string();
            if (argv[i] != "--manifest") redirected.emplace_back(argv[i + 1], replay);
            argv[i + 1] = replay;
        }
    }
    bool has_manifest = false;
    for (const auto& a : argv) has_manifest = has_manifest || a == "--manifest";
    if (!has_manifest) {
        argv.push_back("--manifest");
        argv.push_back((dir / "replay.manifest.json").string());
    }
    std::ostringstream replay_out, replay_err;
    const int code = run(argv, replay_out, replay_err);
    json mismatches = json::array();
    if (code != champagne::detail::field(m, "exit_code").get<int>())
        mismatches.push_back("exit code " + std::to_string(code) + " differs from recorded " +
                             std::to_string(m.at("exit_code").get<int>()));
    if (digest(replay_out.str()) != champagne::detail::field(m, "stdout_digest").get<std::string>()) mismatches.push_back("stdout differs");
    const json& outputs = champagne::detail::field(m, "outputs");
    for (const auto& [orig, replay] : redirected) {
        std::string recorded;
        for (const auto& e : outputs)
            if (e.at("path").get<std::string>() == orig) recorded = e.at("digest").get<std::string>();
        std::string now;
        try {
            now = digest(read_file(replay));
        } catch (const FormatError&) {
            now = "missing";
        }
        if (recorded != now) mismatches.push_back("output " + orig + " differs");
    }
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
    if (!replay_err.str().empty()) err << replay_err.str();
    const bool ok = mismatches.empty();
    json doc = {{"manifest", o.manifest_path}, {"command", m.value("command", "")}, {"reproduced", ok},
                {"mismatches", mismatches}};
    res.stdout_text = doc.dump(2) + "\n";
    if (!o.out_path.empty()) {
        write_file(o.out_path, res.stdout_text);
        res.files.push_back(o.out_path);
    }
    res.code = ok ? kOk : kNotReproduced;
    return res;
}

inline std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace detail

/// Runs one command; `args` excludes the program name. Every run writes one
/// manifest (--manifest, else next to --out, else ./champagne.manifest.json).
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    Options o;
    CLI::App app{"Avoidability of unions of balls: kernels, classification, bounds, simulation"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1, 1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", o.out_path, "Write the JSON result to this file");
        sub->add_option("--manifest", o.manifest_path, "Manifest path");
    };
    auto add_kernel = [&](CLI::App* sub) {
        sub->add_option("--kernel", o.kernel_spec,
                        "Kernel: riesz:ALPHA:D, geostable:ALPHA:DELTA:D:R0:R1, JSON text or file "
                        "(also --riesz k=v..., --geostable k=v...)");
    };

    auto* kernel = app.add_subcommand("kernel", "Certify or inspect a kernel");
    add_common(kernel);
    add_kernel(kernel);
    kernel->add_option("action", o.action, "certify | verify-ld | verify-ud | eval | ld-ratio | ball-average");
    kernel->add_option("--rmin", o.r_min, "Smallest grid radius");
    kernel->add_option("--rmax", o.r_max, "Largest grid radius");
    kernel->add_option("--n", o.n, "Grid size");
    kernel->add_option("--K", o.K, "Scale for verify-ud");
    kernel->add_option("--r", o.r, "Radius");
    kernel->add_option("--dist", o.dist, "Distance from the ball centre");

    auto* classify_cmd = app.add_subcommand("classify", "Classify a ball configuration");
    add_common(classify_cmd);
    add_kernel(classify_cmd);
    classify_cmd->add_option("--config", o.config_spec, "Config JSON text or file");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo hitting probabilities");
    add_common(simulate);
    add_kernel(simulate);
    simulate->add_option("--process", o.process_spec, "brownian d=D | stable alpha=A d=D");
    simulate->add_option("--config", o.config_spec, "Config JSON text or file");
    simulate->add_option("--shell", o.shell_rho, "Target the closed shell rho <= |x| <= 3 rho");
    simulate->add_option("--x0", o.x0, "Start point, comma separated");
    simulate->add_option("--probe", o.probes, "Probe start point (repeatable)");
    simulate->add_option("--extents", o.extents, "Lattice extents for a sweep, comma separated");
    simulate->add_option("--outer-factor", o.outer_factor, "Outer radius per unit extent in a sweep");
    simulate->add_option("--outer", o.outer, "Outer radius M");
    simulate->add_option("--trials", o.trials, "Number of trials");
    simulate->add_option("--seed", o.seed, "64-bit seed (drawn from entropy if absent)");
    simulate->add_option("--threads", o.threads, "Worker threads (default CHAMPAGNE_THREADS or all cores)");
    simulate->add_option("--tol", o.tol, "Absorption tolerance");
    simulate->add_option("--method", o.method, "exact | increment");
    simulate->add_option("--dt", o.dt, "Time step for the increment method");
    simulate->add_option("--max-steps", o.max_steps, "Step cap per trial (timeouts beyond it)");
    simulate->add_option("--csv", o.csv_path, "Probe table as CSV");

    auto* bounds = app.add_subcommand("bounds", "Explicit bounds and constants");
    add_common(bounds);
    add_kernel(bounds);
    bounds->add_option("action", o.action, "cap | reduced | hame | shell | shell-bound");
    bounds->add_option("--r", o.r, "Ball radius");
    bounds->add_option("--dist", o.dist, "Distance from the ball centre");
    bounds->add_option("--eps", o.eps, "Shell separation scale in (0, 1/4]");
    bounds->add_option("--rho", o.rho, "Shell radius for shell-bound");
    bounds->add_option("--rho-lo", o.rho_lo, "Lower end of the rho range");
    bounds->add_option("--rho-hi", o.rho_hi, "Upper end of the rho range");
    bounds->add_option("--config", o.config_spec, "Shell configuration for shell-bound");

    auto* report = app.add_subcommand("report", "Replay a manifest and verify its outputs");
    report->add_option("--manifest", o.manifest_path, "Manifest to replay")->required();
    report->add_option("--out", o.out_path, "Write the report to this file");

    std::vector<std::string> folded;
    try {
        folded = detail::fold_inline_specs(args);
        std::vector<std::string> reversed(folded.rbegin(), folded.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    std::vector<std::string> resolved = folded;
    std::uint64_t seed = 0;
    if (command == "simulate") {
        if (o.seed) {
            seed = *o.seed;
        } else {
            seed = detail::entropy_seed();
            resolved.push_back("--seed");
            resolved.push_back(std::to_string(seed));
        }
    }

    Outcome res;
    std::string error;
    try {
        if (command == "kernel")
            res = detail::cmd_kernel(o);
        else if (command == "classify")
            res = detail::cmd_classify(o);
        else if (command == "simulate")
            res = detail::cmd_simulate(o, seed);
        else if (command == "bounds")
            res = detail::cmd_bounds(o);
        else
            res = detail::cmd_report(o, err);
    } catch (const CertificationError& e) {
        error = e.what();
        res.code = kCertificationFailed;
    } catch (const std::exception& e) {
        error = e.what();
        res.code = kError;
    }
    out << res.stdout_text;
    if (!error.empty()) err << "error: " << error << "\n";
    if (command == "report") return res.code;

    std::string manifest_path = o.manifest_path;
    if (manifest_path.empty()) manifest_path = o.out_path.empty() ? "champagne.manifest.json" : o.out_path + ".manifest.json";
    json outputs = json::array();
    for (const auto& f : res.files) {
        std::string text;
        try {
            text = detail::read_file(f);
        } catch (const FormatError&) {
        }
        outputs.push_back({{"path", f}, {"digest", digest(text)}});
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = {{"command", command},
                     {"argv", resolved},
                     {"inputs", res.inputs},
                     {"outputs", outputs},
                     {"stdout_digest", digest(res.stdout_text)},
                     {"exit_code", res.code},
                     {"seed", seed},
                     {"tool_version", kToolVersion},
                     {"wall_time", wall}};
    if (!error.empty()) manifest["error"] = error;
    try {
        detail::write_file(manifest_path, manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        if (res.code == kOk) res.code = kError;
    }
    return res.code;
}

}  // namespace champagne::cli
