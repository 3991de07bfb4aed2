#pragma once

#include "wgb/charged_bound.hpp"
#include "wgb/errors.hpp"
#include "wgb/geometry/assumptions.hpp"
#include "wgb/io/json.hpp"
#include "wgb/neutral_bound.hpp"
#include "wgb/spectral/spectrum.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace wgb::cli {

namespace fs = std::filesystem;
using io::ConfigError;
using io::Json;

enum ExitCode : int { ok = 0, config_error = 1, numerical_failure = 2 };

inline const std::vector<std::string>& all_analyses() {
    static const std::vector<std::string> names{"check", "neutral", "charged", "spectrum"};
    return names;
}

struct RunConfig {
    Json profile;
    double a = 0.0;
    SupConfig sup;
    Spin spin = Spin::half();
    std::optional<double> charge;
    std::vector<std::string> analyses = all_analyses();
    numerics::QuadratureConfig quadrature;
    AssumptionCheckConfig embedding;
    spectral::SpectrumConfig spectrum;
    BetaSearchConfig beta;
    long long n_min = 2;
    long long n_max = 50;
    int csv_samples = 2001;
    std::string output;

    Waveguide waveguide() const {
        return io::detail::located("/waveguide", [&] { return Waveguide(io::profile_from_json(profile), a, sup); });
    }
};

/// Parses and validates a configuration document. Every error names its field.
inline RunConfig parse_config(const Json& j) {
    using namespace io::detail;
    reject_unknown(j, "", {"waveguide", "particles", "analyses", "numerics", "output"});
    RunConfig c;

    const Json& wg = field(j, "", "waveguide");
    reject_unknown(wg, "/waveguide", {"profile", "a"});
    c.profile = field(wg, "/waveguide", "profile");
    c.a = number(wg, "/waveguide", "a");
    io::profile_from_json(c.profile); // validates the profile block

    if (j.contains("particles")) {
        const Json& p = j.at("particles");
        reject_unknown(p, "/particles", {"spin", "charge"});
        if (p.contains("spin")) {
            if (!p.at("spin").is_string()) throw ConfigError("/particles/spin: expected a rational string such as \"1/2\"");
            c.spin = located("/particles/spin", [&] { return Spin::parse(p.at("spin").get<std::string>()); });
        }
        if (p.contains("charge")) {
            c.charge = number(p, "/particles", "charge");
            if (!(*c.charge > 0.0)) throw ConfigError("/particles/charge: must be positive");
        }
    }

    if (j.contains("analyses")) {
        const Json& list = j.at("analyses");
        if (!list.is_array()) throw ConfigError("/analyses: expected an array of analysis names");
        c.analyses.clear();
        for (const auto& name : list) {
            if (!name.is_string()) throw ConfigError("/analyses: expected an array of analysis names");
            const auto s = name.get<std::string>();
            const auto& known = all_analyses();
            if (s == "report") { // shorthand for every analysis
                for (const auto& k : known)
                    if (std::find(c.analyses.begin(), c.analyses.end(), k) == c.analyses.end()) c.analyses.push_back(k);
                continue;
            }
            if (std::find(known.begin(), known.end(), s) == known.end())
                throw ConfigError("/analyses: unknown analysis '" + s + "'");
            if (std::find(c.analyses.begin(), c.analyses.end(), s) == c.analyses.end()) c.analyses.push_back(s);
        }
    }

    if (j.contains("numerics")) {
        const Json& n = j.at("numerics");
        reject_unknown(n, "/numerics", {"sup", "quadrature", "embedding", "spectrum", "charged", "csv"});
        if (n.contains("sup")) {
            const Json& s = n.at("sup");
            reject_unknown(s, "/numerics/sup", {"n_seed", "n_refine", "safety_factor"});
            c.sup.n_seed = static_cast<int>(integer_or(s, "/numerics/sup", "n_seed", c.sup.n_seed));
            c.sup.n_refine = static_cast<int>(integer_or(s, "/numerics/sup", "n_refine", c.sup.n_refine));
            c.sup.safety_factor = number_or(s, "/numerics/sup", "safety_factor", c.sup.safety_factor);
            if (c.sup.n_seed < 3) throw ConfigError("/numerics/sup/n_seed: must be >= 3");
            if (c.sup.safety_factor < 1.0) throw ConfigError("/numerics/sup/safety_factor: must be >= 1");
        }
        if (n.contains("quadrature")) {
            const Json& q = n.at("quadrature");
            const std::string w = "/numerics/quadrature";
            reject_unknown(q, w, {"abs_tol", "rel_tol", "max_depth", "order"});
            c.quadrature.abs_tol = number_or(q, w, "abs_tol", c.quadrature.abs_tol);
            c.quadrature.rel_tol = number_or(q, w, "rel_tol", c.quadrature.rel_tol);
            c.quadrature.max_depth = static_cast<int>(integer_or(q, w, "max_depth", c.quadrature.max_depth));
            c.quadrature.order = static_cast<int>(integer_or(q, w, "order", c.quadrature.order));
            located(w, [&] { return numerics::AdaptiveIntegrator(c.quadrature).config().order; });
        }
        if (n.contains("embedding")) {
            const Json& e = n.at("embedding");
            reject_unknown(e, "/numerics/embedding", {"resolution", "max_segments"});
            c.embedding.resolution = number_or(e, "/numerics/embedding", "resolution", c.embedding.resolution);
            c.embedding.max_segments = static_cast<std::size_t>(
                integer_or(e, "/numerics/embedding", "max_segments", static_cast<long long>(c.embedding.max_segments)));
            if (c.embedding.resolution < 0.0) throw ConfigError("/numerics/embedding/resolution: must be >= 0");
        }
        if (n.contains("spectrum")) {
            const Json& s = n.at("spectrum");
            const std::string w = "/numerics/spectrum";
            reject_unknown(s, w, {"n_s", "n_u", "s_trunc", "max_step", "decay_lengths", "max_n_s", "max_rounds", "eig_rel_tol"});
            auto& sc = c.spectrum;
            sc.n_s = static_cast<int>(integer_or(s, w, "n_s", sc.n_s));
            sc.n_u = static_cast<int>(integer_or(s, w, "n_u", sc.n_u));
            sc.s_trunc = number_or(s, w, "s_trunc", sc.s_trunc);
            sc.max_step = number_or(s, w, "max_step", sc.max_step);
            sc.decay_lengths = number_or(s, w, "decay_lengths", sc.decay_lengths);
            sc.max_n_s = static_cast<int>(integer_or(s, w, "max_n_s", sc.max_n_s));
            sc.max_rounds = static_cast<int>(integer_or(s, w, "max_rounds", sc.max_rounds));
            sc.eig.rel_tol = number_or(s, w, "eig_rel_tol", sc.eig.rel_tol);
            if (sc.n_s < 8 || sc.n_u < 8) throw ConfigError(w + ": n_s and n_u must be >= 8");
            if (sc.decay_lengths <= 0.0) throw ConfigError(w + "/decay_lengths: must be positive");
        }
        if (n.contains("charged")) {
            const Json& s = n.at("charged");
            const std::string w = "/numerics/charged";
            reject_unknown(s, w, {"n_min", "n_max", "beta_points", "beta_span", "refine"});
            c.n_min = integer_or(s, w, "n_min", c.n_min);
            c.n_max = integer_or(s, w, "n_max", c.n_max);
            c.beta.points = static_cast<int>(integer_or(s, w, "beta_points", c.beta.points));
            c.beta.span = number_or(s, w, "beta_span", c.beta.span);
            if (s.contains("refine")) {
                if (!s.at("refine").is_boolean()) throw ConfigError(w + "/refine: expected a boolean");
                c.beta.refine = s.at("refine").get<bool>();
            }
            if (c.n_min < 2 || c.n_max > 10000) throw ConfigError(w + ": N range must lie within [2, 10000]");
            if (c.beta.points < 2 || !(c.beta.span > 1.0)) throw ConfigError(w + ": need beta_points >= 2 and beta_span > 1");
        }
        if (n.contains("csv")) {
            const Json& s = n.at("csv");
            reject_unknown(s, "/numerics/csv", {"samples"});
            c.csv_samples = static_cast<int>(integer_or(s, "/numerics/csv", "samples", c.csv_samples));
            if (c.csv_samples < 2) throw ConfigError("/numerics/csv/samples: must be >= 2");
        }
    }

    if (j.contains("output")) {
        if (!j.at("output").is_string()) throw ConfigError("/output: expected a directory path");
        c.output = j.at("output").get<std::string>();
    }
    c.waveguide(); // surfaces assumption (ii) violations as configuration errors
    return c;
}

inline RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(j);
}

// ---------------------------------------------------------------------------
// Output

/// Writes through a temporary file and renames it into place.
inline void write_atomic(const fs::path& path, const std::string& contents) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string csv(const char* header, const std::vector<std::pair<double, double>>& rows) {
    std::string out = std::string(header) + "\n";
    for (const auto& [x, y] : rows) out += format_real(x) + "," + format_real(y) + "\n";
    return out;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

/// Files produced by one analysis, keyed by file name.
using Outputs = std::vector<std::pair<std::string, std::string>>;

inline unsigned worker_count() {
    const char* env = std::getenv("WGB_THREADS");
    unsigned n = 0;
    if (env && *env) {
        try {
            n = static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            throw ConfigError("WGB_THREADS: expected a nonnegative integer");
        }
    }
    return n == 0 ? std::max(1u, std::thread::hardware_concurrency()) : n;
}

inline Json run_header(const RunConfig& c, const std::string& analysis) {
    return {{"analysis", analysis}, {"waveguide", {{"profile", c.profile}, {"a", c.a}}}};
}

inline Outputs analyse_check(const RunConfig& c) {
    const Waveguide guide = c.waveguide();
    Json j = run_header(c, "check");
    j["report"] = io::to_json(check_assumptions(guide, c.embedding));
    return {{"check.json", dump(j)}};
}

inline Outputs analyse_neutral(const RunConfig& c, bool plots) {
    const Waveguide guide = c.waveguide();
    Json j = run_header(c, "neutral");
    j["report"] = io::to_json(neutral_particle_bound(guide, c.spin, c.quadrature));
    Outputs out{{"neutral.json", dump(j)}};
    if (plots) {
        const double half = 1.5 * guide.b();
        std::vector<std::pair<double, double>> w, v;
        for (int i = 0; i < c.csv_samples; ++i) {
            const double s = -half + 2.0 * half * i / (c.csv_samples - 1);
            w.emplace_back(s, w_tilde(guide, s));
            v.emplace_back(s, guide.effective_potential(s, 0.0));
        }
        out.emplace_back("w_tilde.csv", csv("s,value", w));
        out.emplace_back("potential_u0.csv", csv("s,value", v));
    }
    return out;
}

inline Outputs analyse_charged(const RunConfig& c, bool plots, unsigned threads) {
    if (!c.charge) throw ConfigError("/particles/charge: required by the charged analysis");
    const ChargedProblem problem = io::detail::located("/waveguide", [&] { return ChargedProblem(c.waveguide(), c.spin, *c.charge); });
    const ChargedScanReport report = scan_unbindable(problem, c.n_min, c.n_max, c.beta, threads);
    Json j = run_header(c, "charged");
    j["particles"] = {{"spin", c.spin.str()}, {"charge", *c.charge}};
    j["w_sup"] = problem.w_sup();
    j["beta_min"] = problem.beta_min();
    j["report"] = io::to_json(report);
    Outputs out{{"charged.json", dump(j)}};
    if (plots) {
        for (long long n = c.n_min; n <= c.n_max; ++n) {
            std::vector<std::pair<double, double>> rows;
            for (const auto& sample : margin_curve(problem, n, c.beta)) rows.emplace_back(sample.beta, sample.margin);
            out.emplace_back("margin_N" + std::to_string(n) + ".csv", csv("beta,margin", rows));
        }
    }
    return out;
}

inline Outputs analyse_spectrum(const RunConfig& c, bool plots) {
    const Waveguide guide = c.waveguide();
    const spectral::SpectralResult r = spectral::discrete_spectrum_count(guide, c.spectrum);
    Json j = run_header(c, "spectrum");
    j["report"] = io::to_json(r);
    Outputs out{{"spectrum.json", dump(j)}};
    if (plots) {
        std::string text = "index,value,error\n";
        for (std::size_t i = 0; i < r.levels.size(); ++i)
            text += std::to_string(i) + "," + format_real(r.levels[i].extrapolated) + "," + format_real(r.levels[i].error) + "\n";
        out.emplace_back("eigenvalues.csv", text);
    }
    return out;
}

inline Outputs analyse(const RunConfig& c, const std::string& name, bool plots, unsigned threads) {
    if (name == "check") return analyse_check(c);
    if (name == "neutral") return analyse_neutral(c, plots);
    if (name == "charged") return analyse_charged(c, plots, threads);
    if (name == "spectrum") return analyse_spectrum(c, plots);
    throw ConfigError("unknown analysis '" + name + "'");
}

/// Runs the named analyses, concurrently when more than one worker is allowed,
/// and writes their files in a fixed order.
inline std::vector<std::string> execute(const RunConfig& c, const std::vector<std::string>& names, bool plots,
                                        const fs::path& out_dir, unsigned threads) {
    std::vector<Outputs> results(names.size());
    if (threads <= 1 || names.size() <= 1) {
        for (std::size_t i = 0; i < names.size(); ++i) results[i] = analyse(c, names[i], plots, threads);
    } else {
        std::vector<std::future<Outputs>> jobs;
        for (const auto& name : names)
            jobs.push_back(std::async(std::launch::async, [&, name] { return analyse(c, name, plots, 1); }));
        for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = jobs[i].get();
    }
    fs::create_directories(out_dir);
    std::vector<std::string> written;
    for (const auto& outputs : results)
        for (const auto& [file, text] : outputs) {
            write_atomic(out_dir / file, text);
            written.push_back((out_dir / file).string());
        }
    return written;
}

/// Entry point: `<tool> <subcommand> --config <path> [--out <dir>]`.
/// Returns 0 on success, 1 on configuration errors and 2 on numerical failure.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Spectral bounds for particles in a curved planar Dirichlet waveguide"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    auto add = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        return sub;
    };
    add("check", "check the regularity assumptions of the waveguide");
    add("neutral", "bound on the number of bindable neutral fermions");
    add("charged", "emptiness certificates for N charged particles");
    add("spectrum", "count one-particle bound states by finite differences");
    add("report", "run the configured analyses and emit plot data");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : config_error;
    }
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        const RunConfig c = load_config(config_path);
        const fs::path dir = !out_dir.empty() ? fs::path(out_dir) : !c.output.empty() ? fs::path(c.output) : fs::path(".");
        const unsigned threads = worker_count();
        const bool report = sub == "report";
        const std::vector<std::string> names = report ? c.analyses : std::vector<std::string>{sub};
        for (const auto& file : execute(c, names, report, dir, threads)) out << file << "\n";
        return ok;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return numerical_failure;
    } catch (const InputError& e) {
        err << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const Json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return config_error;
    }
}

} // namespace wgb::cli
