// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "wgb/charged_bound.hpp"
#include "wgb/cli.hpp"
#include "wgb/geometry/assumptions.hpp"
#include "wgb/neutral_bound.hpp"
#include "wgb/numerics/lattice.hpp"
#include "wgb/numerics/quadrature.hpp"
#include "wgb/spectral/spectrum.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

using namespace wgb;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

struct Admissible {
    double gamma0, b, a;
    bool arc;
    Waveguide guide() const {
        if (arc) return Waveguide(CurvatureProfile::smoothed_arc(gamma0, -b / 2, b / 2, b / 2), a);
        return Waveguide(CurvatureProfile::cosine_bump(gamma0, b), a);
    }
    std::string label() const {
        std::ostringstream s;
        s << (arc ? "arc(" : "bump(") << gamma0 << "," << b << "),a=" << a;
        return s.str();
    }
};

const std::vector<Admissible>& family() {
    static const std::vector<Admissible> f{
        {0.1, 0.5, 0.05, false}, {0.5, 1.0, 0.1, false}, {1.0, 1.0, 0.2, false},  {2.0, 0.5, 0.4, false},
        {0.6, 2.0, 0.3, true},   {0.3, 4.0, 0.4, false}, {2.0, 1.5, 0.05, false}, {0.5, 3.0, 0.25, true},
        {0.8, 2.5, 0.15, false}, {1.2, 1.5, 0.35, false},
    };
    return f;
}

Outcome c1_constant() {
    double best = 0.0;
    const int n = 1000000;
    for (int i = 1; i < n; ++i) {
        const double x = 0.5 * i / n;
        const double q = 1.0 - 4.0 * x * x;
        best = std::max(best, 64.0 * pi * pi * x * x * q * q);
    }
    const double coeff = 18.0 * std::numbers::sqrt2 * best;
    const double lib = localization_constants().beta_coeff;
    const bool ok = std::abs(coeff - 595.5) <= 1e-3 * 595.5 && std::abs(lib - coeff) <= 1e-3 * coeff;
    return {ok, "brute " + fmt("%.4f", coeff) + ", library " + fmt("%.4f", lib)};
}

Outcome c2_majorization() {
    double worst = INFINITY;
    std::string where;
    for (const auto& f : family()) {
        const auto g = f.guide();
        if (!check_assumptions(g).all_pass()) return {false, f.label() + " is not admissible"};
        const double b = g.b(), a = g.a();
        for (int i = 0; i < 400; ++i) {
            const double s = -b + 2.0 * b * (i + 0.5) / 400.0;
            const double w = w_tilde(g, s);
            for (int k = 0; k < 40; ++k) {
                const double u = -a + 2.0 * a * k / 39.0;
                const double v = g.effective_potential(s, u);
                const double slack = w - std::abs(v);
                if (slack < worst) {
                    worst = slack;
                    where = f.label();
                }
            }
        }
    }
    return {worst >= -1e-12, "min slack " + fmt("%.3e", worst) + " at " + where};
}

Outcome c3_lattice() {
    std::vector<double> brute;
    brute.reserve(200 * 200);
    const double ks = pi / 3.0, ku = pi / 2.0;
    for (int m = 1; m <= 200; ++m)
        for (int n = 1; n <= 200; ++n) brute.push_back((ks * m) * (ks * m) + (ku * n) * (ku * n));
    std::sort(brute.begin(), brute.end());
    brute.resize(500);
    const auto lib = numerics::k_smallest_lattice(3.0, 2.0, 500);
    if (lib != brute) return {false, "lattice differs from enumeration"};

    const auto lambda = numerics::k_smallest_lattice(3.0, 2.0, 101);
    double partial = 0.0;
    for (int n = 1; n <= 100; ++n) {
        partial += lambda[n - 1];
        const double even = t_beta(3.0, 2.0, 2 * n, Spin::half());
        if (even != 2.0 * partial) return {false, "even identity fails at n=" + std::to_string(n)};
        if (t_beta(3.0, 2.0, 2 * n + 1, Spin::half()) != even + lambda[n])
            return {false, "odd identity fails at n=" + std::to_string(n)};
    }
    return {true, "500 values and 200 identities exact"};
}

Outcome c4_straight() {
    const Waveguide g(CurvatureProfile::straight(1.0), 0.5);
    spectral::GridSpec grid;
    grid.s_trunc = 2.0;
    const auto levels = spectral::richardson_levels(g, grid, 10);
    std::vector<double> exact;
    for (int m = 1; m <= 20; ++m)
        for (int n = 1; n <= 5; ++n) exact.push_back(std::pow(m * pi / 4.0, 2) + std::pow(n * pi, 2));
    std::sort(exact.begin(), exact.end());
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) worst = std::max(worst, std::abs(levels[i].extrapolated - exact[i]) / exact[i]);
    return {worst <= 1e-3, "max relative error " + fmt("%.3e", worst)};
}

Outcome c5_existence() {
    const Waveguide g(CurvatureProfile::cosine_bump(1.0, 1.0), 0.2);
    const auto r = spectral::discrete_spectrum_count(g);
    const auto& l = r.levels.front();
    const double margin = r.threshold - l.extrapolated;
    return {margin > 3.0 * l.error,
            "mu1 " + fmt("%.8f", l.extrapolated) + ", margin " + fmt("%.3e", margin) + ", error " + fmt("%.3e", l.error)};
}

Outcome c6_consistency() {
    std::ostringstream detail;
    bool ok = true;
    for (const auto& f : family()) {
        const auto g = f.guide();
        const auto n_max = neutral_particle_bound(g, Spin::half()).n_max;
        const auto count = spectral::discrete_spectrum_count(g).conservative_count;
        if (2LL * count > n_max) ok = false;
        detail << " " << 2 * count << "<=" << n_max;
    }
    return {ok, "2*count<=n_max:" + detail.str()};
}

Outcome c7_large_charge() {
    const ChargedProblem p(Waveguide(CurvatureProfile::cosine_bump(1.0, 1.0), 0.2), Spin::half(), 1000.0);
    const auto scan = scan_unbindable(p, 2, 50);
    double prev = -INFINITY;
    for (const auto& e : scan.entries) {
        if (!e.certificate) return {false, "no certificate at N=" + std::to_string(e.N)};
        if (!(e.certificate->margin > prev)) return {false, "margin not increasing at N=" + std::to_string(e.N)};
        prev = e.certificate->margin;
    }
    return {scan.entries.size() == 49, "49 certificates, margin at N=50 " + fmt("%.6e", prev)};
}

Outcome c8_charge_slope() {
    const Waveguide g(CurvatureProfile::cosine_bump(1.0, 1.0), 0.2);
    const double e1 = 1000.0, e2 = 1e5;
    const ChargedProblem p1(g, Spin::half(), e1), p2(g, Spin::half(), e2);
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> nn(2, 50);
    std::uniform_real_distribution<double> logspan(0.0, std::log(1000.0));
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
        const long long n = nn(rng);
        const double beta = p1.beta_min() * std::exp(logspan(rng));
        const double fd = (absence_margin(p2, n, beta).margin - absence_margin(p1, n, beta).margin) / (e2 * e2 - e1 * e1);
        const double nd = static_cast<double>(n);
        const double slope = nd * (nd - 1.0) / (2.0 * beta * std::sqrt(7.0)) - 1.0 / (18.0 * beta * std::numbers::sqrt2);
        worst = std::max(worst, std::abs(fd - slope) / std::abs(slope));
    }
    return {worst <= 1e-10, "max relative deviation " + fmt("%.3e", worst)};
}

Outcome c9_quadrature() {
    auto one = [](double) { return 1.0; };
    const double unit = numerics::integrate_kernel_abs(one, 0.0, 1.0);
    const double two = numerics::integrate_kernel_abs(one, 0.0, 2.0);
    const double d1 = std::abs(unit - 1.0 / 3.0), d2 = std::abs(two - 8.0 / 3.0);
    return {d1 <= 1e-10 && d2 <= 1e-10, "errors " + fmt("%.2e", d1) + ", " + fmt("%.2e", d2)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome c10_determinism() {
    const fs::path root = fs::temp_directory_path() / "wgb_acceptance_report";
    fs::remove_all(root);
    fs::create_directories(root);
    const nlohmann::json cfg = {
        {"waveguide", {{"profile", {{"kind", "bump"}, {"gamma0", 1.0}, {"b", 1.0}}}, {"a", 0.2}}},
        {"particles", {{"spin", "1/2"}, {"charge", 1000.0}}},
        {"numerics", {{"charged", {{"n_min", 2}, {"n_max", 10}}}}},
        {"analyses", {"report"}},
    };
    std::ofstream(root / "config.json") << cfg.dump(2);
    const std::string config = (root / "config.json").string();
    std::vector<fs::path> outs{root / "run1", root / "run2"};
    for (const auto& o : outs) {
        const std::string out = o.string();
        const char* argv[] = {"wgb", "report", "--config", config.c_str(), "--out", out.c_str()};
        std::ostringstream so, se;
        const int rc = cli::run(6, argv, so, se);
        if (rc != 0) return {false, "report exited " + std::to_string(rc) + ": " + se.str()};
    }
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(outs[0])) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    std::size_t second = 0;
    for (const auto& e : fs::directory_iterator(outs[1])) {
        (void)e;
        ++second;
    }
    bool ok = !names.empty() && second == names.size();
    for (const auto& n : names) ok = ok && slurp(outs[0] / n) == slurp(outs[1] / n);
    fs::remove_all(root);
    return {ok, std::to_string(names.size()) + " files compared"};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"1 localization constant", c1_constant},  {"2 majorization suite", c2_majorization},
        {"3 lattice oracle", c3_lattice},          {"4 straight-guide spectrum", c4_straight},
        {"5 bound state exists", c5_existence},    {"6 count vs neutral bound", c6_consistency},
        {"7 large-charge emptiness", c7_large_charge}, {"8 charge scaling", c8_charge_slope},
        {"9 kernel quadrature", c9_quadrature},    {"10 report determinism", c10_determinism},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  (" << o.detail << ", " << fmt("%.1f", secs)
                  << " s)" << std::endl;
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
