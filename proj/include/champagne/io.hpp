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

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "champagne/bounds.hpp"
#include "champagne/config.hpp"
#include "champagne/kernel.hpp"
#include "champagne/profile.hpp"
#include "champagne/sim.hpp"

namespace champagne {

using json = nlohmann::json;

/// Input that fails schema checks.
class FormatError : public DomainError {
  public:
    using DomainError::DomainError;
};

namespace detail {
inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}
inline double number(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number()) throw FormatError(std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}
inline double number_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}
inline int integer(const json& j, const char* key) {
    const double v = number(j, key);
    if (v != std::floor(v) || std::abs(v) > 1e6) throw FormatError(std::string("field \"") + key + "\" must be an integer");
    return static_cast<int>(v);
}
/// JSON has no infinity; non-finite values are written as null.
inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
}  // namespace detail

/// Reads a file if `text` names one, otherwise returns it unchanged.
inline std::string read_text_or_file(const std::string& text) {
    if (!text.empty() && (text.front() == '{' || text.front() == '[')) return text;
    std::ifstream in(text);
    if (!in) throw FormatError("cannot open \"" + text + "\"");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed JSON: ") + e.what());
    }
}

//---------------------------------------------------------------------------//
// Kernels
//---------------------------------------------------------------------------//

inline Kernel kernel_from_json(const json& j) {
    const json& fam = detail::field(j, "family");
    if (!fam.is_string()) throw FormatError("field \"family\" must be a string");
    const std::string f = fam.get<std::string>();
    const int d = detail::integer(j, "d");
    if (f == "riesz") return Kernel::riesz(detail::number(j, "alpha"), d);
    if (f == "geometric_stable" || f == "geostable")
        return Kernel::geometric_stable(detail::number(j, "alpha"), detail::number(j, "delta"), d,
                                        detail::number(j, "r0"), detail::number(j, "r1"));
    if (f == "tabulated") {
        std::vector<std::pair<double, double>> samples;
        for (const auto& s : detail::field(j, "samples")) {
            if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number())
                throw FormatError("tabulated samples must be [r, g] pairs");
            samples.emplace_back(s[0].get<double>(), s[1].get<double>());
        }
        return Kernel::tabulated(d, std::move(samples), detail::number_or(j, "r0", 0.0), detail::number_or(j, "r1", 0.0));
    }
    throw FormatError("unknown kernel family \"" + f + "\"");
}

inline json to_json(const Kernel& k) {
    json j;
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, RieszFamily>) {
                j = {{"family", "riesz"}, {"alpha", f.alpha}, {"d", k.dim()}};
            } else if constexpr (std::is_same_v<T, GeometricStableFamily>) {
                j = {{"family", "geometric_stable"}, {"alpha", f.alpha}, {"delta", f.delta}, {"d", k.dim()},
                     {"r0", k.r0()}, {"r1", k.r1()}};
            } else {
                json samples = json::array();
                for (std::size_t i = 0; i < f.r.size(); ++i) samples.push_back({f.r[i], f.g[i]});
                j = {{"family", "tabulated"}, {"d", k.dim()}, {"samples", samples}, {"r0", k.r0()}, {"r1", k.r1()}};
            }
        },
        k.family());
    return j;
}

inline json to_json(const KernelCertificate& c) {
    json j = {{"C_G", c.C_G},       {"C_D", c.C_D},   {"c", c.c},         {"K", c.K},
              {"eta_ud", c.eta_ud}, {"safety", c.safety}, {"c_used", c.c_used()}, {"exact", c.exact},
              {"notes", c.notes}};
    if (!c.grid.empty()) j["grid"] = {{"r_min", c.grid.front()}, {"r_max", c.grid.back()}, {"n", c.grid.size()}};
    if (c.exact) {
        json ex = json::object();
        if (auto q = to_rational(c.C_G)) ex["C_G"] = q->str();
        if (auto q = to_rational(c.C_D)) ex["C_D"] = q->str();
        if (auto q = to_rational(c.c)) ex["c"] = q->str();
        if (auto q = to_rational(c.eta_ud)) ex["eta_ud"] = q->str();
        j["exact_rationals"] = ex;
    }
    return j;
}

inline json to_json(const LdCheck& c) {
    json j = {{"holds", c.holds}, {"C_G", detail::finite_or_null(c.C_G)}, {"argmax", c.argmax},
              {"warnings", c.warnings}};
    if (!c.grid.empty()) j["grid"] = {{"r_min", c.grid.front()}, {"r_max", c.grid.back()}, {"n", c.grid.size()}};
    if (c.extended_C) j["extended_C"] = detail::finite_or_null(*c.extended_C);
    return j;
}

inline json to_json(const UdCheck& c) { return {{"holds", c.holds}, {"eta", c.eta}, {"K", c.K}}; }

//---------------------------------------------------------------------------//
// Profiles and configurations
//---------------------------------------------------------------------------//

inline RadiusProfile profile_from_json(const json& j) {
    const json& t = detail::field(j, "type");
    if (!t.is_string()) throw FormatError("profile field \"type\" must be a string");
    const std::string type = t.get<std::string>();
    const double cap = detail::number_or(j, "cap", std::numeric_limits<double>::infinity());
    if (type == "power") return {PowerLaw{detail::number(j, "a"), detail::number(j, "beta")}, cap};
    if (type == "powerlog")
        return {PowerLog{detail::number(j, "a"), detail::number(j, "beta"), detail::number(j, "gamma")}, cap};
    if (type == "constant") return {Constant{detail::number(j, "a")}, cap};
    throw FormatError("unknown profile type \"" + type + "\"");
}

inline json to_json(const RadiusProfile& p) {
    json j;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PowerLaw>)
                j = {{"type", "power"}, {"a", s.a}, {"beta", s.beta}};
            else if constexpr (std::is_same_v<T, PowerLog>)
                j = {{"type", "powerlog"}, {"a", s.a}, {"beta", s.beta}, {"gamma", s.gamma}};
            else
                j = {{"type", "constant"}, {"a", s.a}};
        },
        p.shape());
    if (p.clipped()) j["cap"] = p.cap();
    return j;
}

/// Lattice generator parameters of a config document, if any.
struct GeneratorSpec {
    int d;
    double spacing;
    double extent;
    RadiusProfile profile;
};

inline std::optional<GeneratorSpec> generator_from_json(const json& j) {
    if (!j.contains("generator")) return std::nullopt;
    const json& g = j.at("generator");
    const json& lat = detail::field(g, "lattice");
    return GeneratorSpec{detail::integer(j, "d"), detail::number(lat, "spacing"), detail::number(lat, "extent"),
                         profile_from_json(detail::field(g, "profile"))};
}

inline BallConfig config_from_json(const json& j) {
    const int d = detail::integer(j, "d");
    if (const auto gen = generator_from_json(j)) return build_lattice_config(d, gen->spacing, gen->profile, gen->extent);
    std::vector<double> centers, radii;
    for (const auto& b : detail::field(j, "balls")) {
        if (!b.is_array() || b.size() != static_cast<std::size_t>(d + 1))
            throw FormatError("each ball must be [x_1, ..., x_d, r] with d = " + std::to_string(d));
        for (int k = 0; k < d; ++k) {
            if (!b[k].is_number()) throw FormatError("ball coordinates must be numbers");
            centers.push_back(b[k].get<double>());
        }
        if (!b[d].is_number()) throw FormatError("ball radius must be a number");
        radii.push_back(b[d].get<double>());
    }
    std::optional<RadiusProfile> profile;
    if (j.contains("profile")) profile = profile_from_json(j.at("profile"));
    std::optional<double> spacing;
    if (j.contains("lattice_spacing")) spacing = detail::number(j, "lattice_spacing");
    return BallConfig::from_balls(d, std::move(centers), std::move(radii), profile, spacing);
}

inline json to_json(const BallConfig& cfg) {
    json balls = json::array();
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        json b = json::array();
        for (int k = 0; k < cfg.dim(); ++k) b.push_back(cfg.center_data(i)[k]);
        b.push_back(cfg.radius(i));
        balls.push_back(std::move(b));
    }
    json j = {{"d", cfg.dim()}, {"balls", std::move(balls)}};
    if (cfg.profile()) j["profile"] = to_json(*cfg.profile());
    if (cfg.lattice_spacing()) j["lattice_spacing"] = *cfg.lattice_spacing();
    if (!cfg.notes().empty()) j["notes"] = cfg.notes();
    return j;
}

//---------------------------------------------------------------------------//
// Verdicts
//---------------------------------------------------------------------------//

inline json to_json(const TailExponents& t) {
    return {{"p", t.p},
            {"lambda", t.lambda},
            {"integral_divergent", t.integral_divergent()},
            {"growth_unbounded", t.growth_unbounded()},
            {"logarithmic", t.logarithmic()}};
}

inline json to_json(const Evidence& e) {
    json partial = json::array();
    for (const auto& p : e.partial_sums)
        partial.push_back({{"within", p.within}, {"S1", p.S1}, {"S2", p.S2}, {"count", p.count}});
    json shells = json::array();
    for (const auto& [r, v] : e.separation_shell_minima) shells.push_back({r, v});
    json growth = json::array();
    for (const auto& [r, v] : e.growth_samples) growth.push_back({r, detail::finite_or_null(v)});
    json j = {{"n_balls", e.n_balls},
              {"extent", e.extent},
              {"S1", e.S1},
              {"S2", e.S2},
              {"partial_sums", partial},
              {"separation_infimum", detail::finite_or_null(e.separation_infimum)},
              {"separation_shell_minima", shells},
              {"growth_samples", growth},
              {"regularly_located", e.regularly_located},
              {"thresholds_ok", e.thresholds_ok},
              {"notes", e.notes}};
    auto opt = [&](const char* key, const auto& v) {
        if (v) j[key] = *v;
    };
    opt("separation_bounded", e.separation_bounded);
    opt("integral_divergent", e.integral_divergent);
    opt("growth_unbounded", e.growth_unbounded);
    opt("sum_divergent", e.sum_divergent);
    opt("integral_to_extent", e.integral_to_extent);
    opt("fitted_beta", e.fitted_beta);
    if (e.tail) j["tail"] = to_json(*e.tail);
    return j;
}

inline json to_json(const Verdict& v) {
    return {{"label", to_string(v.label())}, {"rule", to_string(v.rule())}, {"evidence", to_json(v.evidence())}};
}

//---------------------------------------------------------------------------//
// Bounds
//---------------------------------------------------------------------------//

inline json to_json(const CapacityBounds& b) {
    return {{"lower", b.lower}, {"upper", b.upper}, {"r", b.r}, {"c_used", b.c_used}};
}

inline json to_json(const Interval& i) { return {{"lower", i.lower}, {"upper", i.upper}}; }

inline json to_json(const HameConstants& h) {
    json j = {{"eta_hame", h.eta_hame}, {"M", h.M}, {"c_used", h.c_used}};
    if (h.eta_exact) j["exact_rationals"] = {{"eta_hame", h.eta_exact->str()}};
    return j;
}

inline json to_json(const ShellConstants& s) {
    json j = {{"eps", s.eps}, {"eta_hame", s.eta_hame}, {"C", s.C}, {"delta", s.delta}, {"M", s.M}, {"c_used", s.c_used}};
    json ex = json::object();
    if (s.C_exact) ex["C"] = s.C_exact->str();
    if (s.delta_exact) ex["delta"] = s.delta_exact->str();
    if (s.eta_exact) ex["eta_hame"] = s.eta_exact->str();
    if (!ex.empty()) j["exact_rationals"] = ex;
    return j;
}

inline json to_json(const ShellBound& b) {
    return {{"value", b.value}, {"sum", b.sum}, {"valid", b.valid}, {"violations", b.violations}};
}

//---------------------------------------------------------------------------//
// Estimates
//---------------------------------------------------------------------------//

inline json to_json(const HittingEstimate& e) {
    return {{"p_hat", e.p_hat},
            {"ci", {e.ci_low, e.ci_high}},
            {"sigma", e.sigma()},
            {"trials", e.trials},
            {"hits", e.hits},
            {"exits", e.exits},
            {"timeouts", e.timeouts},
            {"seed", e.seed},
            {"valid", e.valid},
            {"truncated_lower_bound", true},
            {"params",
             {{"process", e.process}, {"method", e.method}, {"x0", e.x0}, {"outer_M", e.outer_M},
              {"tolerance", e.tolerance}}}};
}

inline json to_json(const ProbeReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"x0", row.x0}, {"extent", row.extent}, {"outer_M", row.outer_M}, {"estimate", to_json(row.estimate)}});
    json j = {{"verdict", to_string(r.verdict)}, {"rule", to_string(r.rule)}, {"rows", rows}};
    if (r.trend_ok) {
        j["trend"] = r.trend;
        j["trend_ok"] = *r.trend_ok;
    }
    return j;
}

/// One line per probe row; doubles printed with 17 significant digits.
inline std::string probe_csv(const ProbeReport& r) {
    std::string out = "x0_norm,extent,outer_M,p_hat,ci_low,ci_high,trials,hits,exits,timeouts,seed\n";
    char buf[512];
    for (const auto& row : r.rows) {
        double n = 0.0;
        for (double v : row.x0) n += v * v;
        const auto& e = row.estimate;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%llu,%llu,%llu,%llu,%llu\n", std::sqrt(n),
                      row.extent, row.outer_M, e.p_hat, e.ci_low, e.ci_high,
                      static_cast<unsigned long long>(e.trials), static_cast<unsigned long long>(e.hits),
                      static_cast<unsigned long long>(e.exits), static_cast<unsigned long long>(e.timeouts),
                      static_cast<unsigned long long>(e.seed));
        out += buf;
    }
    return out;
}

}  // namespace champagne
