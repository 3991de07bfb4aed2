#pragma once

#include "wgb/charged_bound.hpp"
#include "wgb/errors.hpp"
#include "wgb/geometry/assumptions.hpp"
#include "wgb/geometry/profile.hpp"
#include "wgb/neutral_bound.hpp"
#include "wgb/spectral/spectrum.hpp"

#include <json.hpp>

#include <set>
#include <string>
#include <vector>

namespace wgb::io {

using Json = nlohmann::json;

/// Configuration or report that does not match the expected schema. The message
/// names the offending field as a JSON pointer.
class ConfigError : public InputError {
public:
    using InputError::InputError;
};

namespace detail {

inline void reject_unknown(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
        if (!keys.count(key)) throw ConfigError(where + "/" + key + ": unknown key");
}

inline const Json& field(const Json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) throw ConfigError(where + "/" + key + ": missing required field");
    return obj.at(key);
}

inline double number(const Json& obj, const std::string& where, const char* key) {
    const Json& v = field(obj, where, key);
    if (!v.is_number()) throw ConfigError(where + "/" + key + ": expected a number");
    return v.get<double>();
}

inline double number_or(const Json& obj, const std::string& where, const char* key, double fallback) {
    return obj.contains(key) ? number(obj, where, key) : fallback;
}

inline long long integer_or(const Json& obj, const std::string& where, const char* key, long long fallback) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "/" + key + ": expected an integer");
    return v.get<long long>();
}

inline std::vector<double> numbers(const Json& obj, const std::string& where, const char* key) {
    const Json& v = field(obj, where, key);
    if (!v.is_array()) throw ConfigError(where + "/" + key + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(where + "/" + key + ": expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

/// Runs a domain constructor, re-labelling its validation errors with the config path.
template <class F>
auto located(const std::string& where, F&& make) {
    try {
        return make();
    } catch (const ConfigError&) {
        throw;
    } catch (const InputError& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Profiles

inline Json to_json(const CurvatureProfile& profile) {
    return std::visit(
        [](const auto& p) -> Json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, profiles::CosineBump>) {
                return {{"kind", "bump"}, {"gamma0", p.gamma0}, {"b", p.b}};
            } else if constexpr (std::is_same_v<P, profiles::SmoothedArc>) {
                return {{"kind", "arc"}, {"gamma0", p.gamma0}, {"plateau", {p.lo, p.hi}}, {"ramp", p.ramp}};
            } else {
                return {{"kind", "tabulated"}, {"s", p.knots()}, {"gamma", p.values()}};
            }
        },
        profile.variant());
}

inline CurvatureProfile profile_from_json(const Json& j, const std::string& where = "/waveguide/profile") {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const Json& kind = detail::field(j, where, "kind");
    if (!kind.is_string()) throw ConfigError(where + "/kind: expected a string");
    const auto k = kind.get<std::string>();
    if (k == "bump") {
        detail::reject_unknown(j, where, {"kind", "gamma0", "b"});
        const double g0 = detail::number(j, where, "gamma0"), b = detail::number(j, where, "b");
        return detail::located(where, [&] { return CurvatureProfile::cosine_bump(g0, b); });
    }
    if (k == "straight") {
        detail::reject_unknown(j, where, {"kind", "b"});
        const double b = detail::number(j, where, "b");
        return detail::located(where, [&] { return CurvatureProfile::straight(b); });
    }
    if (k == "arc") {
        detail::reject_unknown(j, where, {"kind", "gamma0", "plateau", "ramp"});
        const auto plateau = detail::numbers(j, where, "plateau");
        if (plateau.size() != 2) throw ConfigError(where + "/plateau: expected [lo, hi]");
        const double g0 = detail::number(j, where, "gamma0"), ramp = detail::number(j, where, "ramp");
        return detail::located(where, [&] { return CurvatureProfile::smoothed_arc(g0, plateau[0], plateau[1], ramp); });
    }
    if (k == "tabulated") {
        detail::reject_unknown(j, where, {"kind", "s", "gamma"});
        auto s = detail::numbers(j, where, "s");
        auto g = detail::numbers(j, where, "gamma");
        return detail::located(where, [&] { return CurvatureProfile::tabulated(std::move(s), std::move(g)); });
    }
    throw ConfigError(where + "/kind: unknown profile kind '" + k + "' (expected bump, straight, arc or tabulated)");
}

// ---------------------------------------------------------------------------
// Reports

inline const char* to_string(EmbeddingStatus s) {
    return s == EmbeddingStatus::verified_at_resolution ? "verified-at-resolution" : "skipped";
}

inline Json to_json(const AssumptionReport& r) {
    return {
        {"assumptions",
         {{"i_non_self_intersecting", r.non_self_intersecting},
          {"ii_thin", r.thin_enough},
          {"iii_regular", r.regular},
          {"iv_compact_support", r.compact_support}}},
        {"all_pass", r.all_pass()},
        {"gamma_sup", r.gamma_sup},
        {"gamma1_sup", r.gamma1_sup},
        {"gamma2_sup", r.gamma2_sup},
        {"a_gamma_sup", r.a_gamma_sup},
        {"min_clearance", std::isfinite(r.min_clearance) ? Json(r.min_clearance) : Json(nullptr)},
        {"resolution", r.resolution},
        {"embedding_check", to_string(r.embedding)},
    };
}

inline AssumptionReport assumption_report_from_json(const Json& j) {
    AssumptionReport r;
    const Json& a = j.at("assumptions");
    r.non_self_intersecting = a.at("i_non_self_intersecting").get<bool>();
    r.thin_enough = a.at("ii_thin").get<bool>();
    r.regular = a.at("iii_regular").get<bool>();
    r.compact_support = a.at("iv_compact_support").get<bool>();
    r.gamma_sup = j.at("gamma_sup").get<double>();
    r.gamma1_sup = j.at("gamma1_sup").get<double>();
    r.gamma2_sup = j.at("gamma2_sup").get<double>();
    r.a_gamma_sup = j.at("a_gamma_sup").get<double>();
    r.min_clearance = j.at("min_clearance").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                      : j.at("min_clearance").get<double>();
    r.resolution = j.at("resolution").get<double>();
    r.embedding = j.at("embedding_check").get<std::string>() == "verified-at-resolution"
                      ? EmbeddingStatus::verified_at_resolution
                      : EmbeddingStatus::skipped;
    return r;
}

inline Json to_json(const NeutralBoundReport& r) {
    Json terms = Json::array();
    for (const auto& t : r.higher_mode_terms)
        terms.push_back({{"j", t.j}, {"kappa", t.kappa}, {"integral", t.integral}, {"value", t.value}});
    return {
        {"I1", r.I1},
        {"I2", r.I2},
        {"w_sup", r.w_sup},
        {"j_max", r.j_max},
        {"higher_mode_terms", terms},
        {"delta_plus", r.delta_plus},
        {"lowest_mode_term", r.lowest_mode_term},
        {"rhs_real", r.rhs_real},
        {"n_max", r.n_max},
        {"spin", r.spin.str()},
    };
}

/// Reads the stored ingredients and re-derives the assembled bound.
inline NeutralBoundReport neutral_report_from_json(const Json& j) {
    NeutralBoundReport r;
    r.I1 = j.at("I1").get<double>();
    r.I2 = j.at("I2").get<double>();
    r.w_sup = j.at("w_sup").get<double>();
    r.j_max = j.at("j_max").get<int>();
    for (const auto& t : j.at("higher_mode_terms"))
        r.higher_mode_terms.push_back(
            {t.at("j").get<int>(), t.at("kappa").get<double>(), t.at("integral").get<double>(), t.at("value").get<double>()});
    r.delta_plus = j.at("delta_plus").get<double>();
    r.spin = Spin::parse(j.at("spin").get<std::string>());
    finalize_neutral_bound(r);
    return r;
}

inline Json to_json(const EmptinessCertificate& c) {
    return {{"N", c.N},         {"beta", c.beta},         {"lhs", c.lhs},         {"rhs", c.rhs},
            {"margin", c.margin}, {"beta_min", c.beta_min}, {"spin", c.spin.str()}, {"charge", c.charge}};
}

inline EmptinessCertificate certificate_from_json(const Json& j) {
    EmptinessCertificate c;
    c.N = j.at("N").get<long long>();
    c.beta = j.at("beta").get<double>();
    c.lhs = j.at("lhs").get<double>();
    c.rhs = j.at("rhs").get<double>();
    c.margin = j.at("margin").get<double>();
    c.beta_min = j.at("beta_min").get<double>();
    c.spin = Spin::parse(j.at("spin").get<std::string>());
    c.charge = j.at("charge").get<double>();
    return c;
}

inline Json to_json(const ChargedScanReport& r) {
    Json entries = Json::array();
    for (const auto& e : r.entries)
        entries.push_back({{"N", e.N}, {"certificate", e.certificate ? to_json(*e.certificate) : Json(nullptr)}});
    return {
        {"n_range", {r.n_lo, r.n_hi}},
        {"entries", entries},
        {"min_unbindable_N", r.min_unbindable_N ? Json(*r.min_unbindable_N) : Json(nullptr)},
        {"upward_closed", r.upward_closed},
    };
}

inline ChargedScanReport charged_report_from_json(const Json& j) {
    ChargedScanReport r;
    r.n_lo = j.at("n_range").at(0).get<long long>();
    r.n_hi = j.at("n_range").at(1).get<long long>();
    for (const auto& e : j.at("entries")) {
        ScanEntry entry;
        entry.N = e.at("N").get<long long>();
        if (!e.at("certificate").is_null()) entry.certificate = certificate_from_json(e.at("certificate"));
        r.entries.push_back(entry);
    }
    summarize_scan(r);
    return r;
}

inline Json to_json(const spectral::GridSpec& g) {
    return {{"s_trunc", g.s_trunc}, {"n_s", g.n_s}, {"n_u", g.n_u}};
}

inline Json to_json(const spectral::SpectralResult& r) {
    Json levels = Json::array();
    for (const auto& l : r.levels)
        levels.push_back({{"coarse", l.coarse}, {"fine", l.fine}, {"extrapolated", l.extrapolated}, {"error", l.error}});
    return {
        {"a", r.a},
        {"threshold", r.threshold},
        {"coarse_grid", to_json(r.coarse)},
        {"fine_grid", to_json(r.fine)},
        {"levels", levels},
        {"eigenvalues", r.eigenvalues},
        {"errors", r.errors},
        {"raw_count", r.raw_count},
        {"conservative_count", r.conservative_count},
        {"s_trunc_history", r.s_trunc_history},
    };
}

inline spectral::SpectralResult spectral_result_from_json(const Json& j) {
    spectral::SpectralResult r;
    r.a = j.at("a").get<double>();
    r.threshold = j.at("threshold").get<double>();
    auto grid = [](const Json& g) {
        return spectral::GridSpec{g.at("s_trunc").get<double>(), g.at("n_s").get<int>(), g.at("n_u").get<int>()};
    };
    r.coarse = grid(j.at("coarse_grid"));
    r.fine = grid(j.at("fine_grid"));
    // Extrapolated values, errors and counts are re-derived from the raw grid eigenvalues.
    for (const auto& l : j.at("levels"))
        r.levels.push_back(
            spectral::richardson_level(l.at("coarse").get<double>(), l.at("fine").get<double>(), r.a, r.coarse.n_u));
    spectral::summarize_levels(r);
    r.s_trunc_history = j.at("s_trunc_history").get<std::vector<double>>();
    return r;
}

} // namespace wgb::io
