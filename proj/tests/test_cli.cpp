#include "wgb/cli.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace wgb;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("wgb_cli_" + std::string(info->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write_config(const json& j, const std::string& name = "config.json") {
        const fs::path p = dir_ / name;
        std::ofstream(p) << j.dump(2);
        return p;
    }

    int run(const std::vector<std::string>& args) {
        std::vector<const char*> argv{"wgb"};
        for (const auto& a : args) argv.push_back(a.c_str());
        out_.str("");
        err_.str("");
        return cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    json read_json(const fs::path& p) {
        std::ifstream in(p);
        return json::parse(in);
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    static json bump_config() {
        return {{"waveguide", {{"profile", {{"kind", "bump"}, {"gamma0", 1.0}, {"b", 1.0}}}, {"a", 0.2}}},
                {"particles", {{"spin", "1/2"}, {"charge", 1000.0}}},
                {"numerics",
                 {{"charged", {{"n_min", 2}, {"n_max", 4}}},
                  {"spectrum", {{"s_trunc", 3.0}, {"n_s", 64}, {"n_u", 16}}},
                  {"csv", {{"samples", 101}}}}}};
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

} // namespace

TEST_F(CliTest, CheckStraightGuide) {
    json cfg = {{"waveguide", {{"profile", {{"kind", "straight"}, {"b", 1.0}}}, {"a", 0.2}}}};
    const auto path = write_config(cfg);
    ASSERT_EQ(run({"check", "--config", path.string(), "--out", dir_.string()}), 0) << err_.str();
    const json j = read_json(dir_ / "check.json");
    EXPECT_EQ(j["analysis"], "check");
    const auto& r = j["report"];
    const auto& flags = r["assumptions"];
    EXPECT_TRUE(flags["i_non_self_intersecting"].get<bool>());
    EXPECT_TRUE(flags["ii_thin"].get<bool>());
    EXPECT_TRUE(flags["iii_regular"].get<bool>());
    EXPECT_TRUE(flags["iv_compact_support"].get<bool>());
    EXPECT_TRUE(r["all_pass"].get<bool>());
    EXPECT_EQ(r["embedding_check"], "verified-at-resolution");
    const auto back = io::assumption_report_from_json(r);
    EXPECT_TRUE(back.all_pass());
}

TEST_F(CliTest, NeutralMatchesLibrary) {
    const auto path = write_config(bump_config());
    ASSERT_EQ(run({"neutral", "--config", path.string(), "--out", dir_.string()}), 0) << err_.str();
    const json r = read_json(dir_ / "neutral.json")["report"];
    const auto direct = neutral_particle_bound(Waveguide(CurvatureProfile::cosine_bump(1.0, 1.0), 0.2), Spin::half());
    EXPECT_EQ(r["I1"].get<double>(), direct.I1);
    EXPECT_EQ(r["I2"].get<double>(), direct.I2);
    EXPECT_EQ(r["n_max"].get<long long>(), direct.n_max);
    EXPECT_EQ(r["rhs_real"].get<double>(), direct.rhs_real);

    auto back = io::neutral_report_from_json(r);
    EXPECT_EQ(back.rhs_real, direct.rhs_real);
    EXPECT_EQ(back.n_max, direct.n_max);
    EXPECT_EQ(back.lowest_mode_term, direct.lowest_mode_term);
}

TEST_F(CliTest, ChargedSingleNCertificate) {
    json cfg = bump_config();
    cfg["numerics"]["charged"] = {{"n_min", 2}, {"n_max", 2}};
    const auto path = write_config(cfg);
    ASSERT_EQ(run({"charged", "--config", path.string(), "--out", dir_.string()}), 0) << err_.str();
    const json j = read_json(dir_ / "charged.json");
    const auto& entries = j["report"]["entries"];
    ASSERT_EQ(entries.size(), 1u);
    const auto& cert = entries[0]["certificate"];
    ASSERT_FALSE(cert.is_null());
    EXPECT_GT(cert["margin"].get<double>(), 0.0);

    const auto report = io::charged_report_from_json(j["report"]);
    ASSERT_EQ(report.min_unbindable_N, 2);
    const ChargedProblem p(Waveguide(CurvatureProfile::cosine_bump(1.0, 1.0), 0.2), Spin::half(), 1000.0);
    const auto& c = *report.entries[0].certificate;
    EXPECT_EQ(absence_margin(p, c.N, c.beta).margin, c.margin);
}

TEST_F(CliTest, SpectrumRoundTrip) {
    const auto path = write_config(bump_config());
    ASSERT_EQ(run({"spectrum", "--config", path.string(), "--out", dir_.string()}), 0) << err_.str();
    const json r = read_json(dir_ / "spectrum.json")["report"];
    const auto back = io::spectral_result_from_json(r);
    EXPECT_EQ(io::to_json(back), r);
}

TEST_F(CliTest, ReportWritesAllFilesDeterministically) {
    json cfg = bump_config();
    cfg["analyses"] = {"report"};
    const auto path = write_config(cfg);
    const fs::path first = dir_ / "first", second = dir_ / "second";
    ASSERT_EQ(run({"report", "--config", path.string(), "--out", first.string()}), 0) << err_.str();
    ::setenv("WGB_THREADS", "1", 1);
    const int rc = run({"report", "--config", path.string(), "--out", second.string()});
    ::unsetenv("WGB_THREADS");
    ASSERT_EQ(rc, 0) << err_.str();

    const std::vector<std::string> expected{"check.json",  "neutral.json",     "w_tilde.csv",     "potential_u0.csv",
                                            "charged.json", "margin_N2.csv",   "margin_N3.csv",   "margin_N4.csv",
                                            "spectrum.json", "eigenvalues.csv"};
    std::size_t count = 0;
    for (const auto& e : fs::directory_iterator(first)) {
        (void)e;
        ++count;
    }
    EXPECT_EQ(count, expected.size());
    for (const auto& name : expected) {
        ASSERT_TRUE(fs::exists(first / name)) << name;
        EXPECT_EQ(slurp(first / name), slurp(second / name)) << name;
    }
    const std::string w = slurp(first / "w_tilde.csv");
    EXPECT_EQ(w.substr(0, 8), "s,value\n");
    EXPECT_EQ(std::count(w.begin(), w.end(), '\n'), 102);
    EXPECT_EQ(slurp(first / "margin_N2.csv").substr(0, 12), "beta,margin\n");
    EXPECT_EQ(slurp(first / "eigenvalues.csv").substr(0, 18), "index,value,error\n");
}

TEST_F(CliTest, OutputDirectoryFromConfig) {
    json cfg = bump_config();
    cfg["output"] = (dir_ / "from_config").string();
    const auto path = write_config(cfg);
    ASSERT_EQ(run({"check", "--config", path.string()}), 0) << err_.str();
    EXPECT_TRUE(fs::exists(dir_ / "from_config" / "check.json"));
}

TEST_F(CliTest, ConfigErrors) {
    json unknown = bump_config();
    unknown["waveguide"]["width"] = 1.0;
    EXPECT_EQ(run({"check", "--config", write_config(unknown).string()}), 1);
    EXPECT_NE(err_.str().find("/waveguide"), std::string::npos) << err_.str();

    EXPECT_EQ(run({"check", "--config", (dir_ / "missing.json").string()}), 1);

    std::ofstream(dir_ / "broken.json") << "{\n  \"waveguide\": \n";
    EXPECT_EQ(run({"check", "--config", (dir_ / "broken.json").string()}), 1);
    EXPECT_NE(err_.str().find("line"), std::string::npos) << err_.str();

    json no_charge = bump_config();
    no_charge["particles"].erase("charge");
    EXPECT_EQ(run({"charged", "--config", write_config(no_charge).string(), "--out", dir_.string()}), 1);
    EXPECT_NE(err_.str().find("charge"), std::string::npos);

    json thick = bump_config();
    thick["waveguide"]["a"] = 1.5;
    EXPECT_EQ(run({"check", "--config", write_config(thick).string()}), 1);

    json spin = bump_config();
    spin["particles"]["spin"] = "1/3";
    EXPECT_EQ(run({"check", "--config", write_config(spin).string()}), 1);

    json analysis = bump_config();
    analysis["analyses"] = {"neutral", "fourier"};
    EXPECT_EQ(run({"report", "--config", write_config(analysis).string()}), 1);

    json range = bump_config();
    range["numerics"]["charged"]["n_min"] = 1;
    EXPECT_EQ(run({"charged", "--config", write_config(range).string()}), 1);

    EXPECT_EQ(run({}), 1);
    EXPECT_EQ(run({"check"}), 1);
}

TEST_F(CliTest, BadThreadVariable) {
    const auto path = write_config(bump_config());
    ::setenv("WGB_THREADS", "many", 1);
    const int rc = run({"check", "--config", path.string(), "--out", dir_.string()});
    ::unsetenv("WGB_THREADS");
    EXPECT_EQ(rc, 1);
}

TEST_F(CliTest, NumericalFailureExitCode) {
    json cfg = bump_config();
    cfg["numerics"]["quadrature"] = {{"abs_tol", 1e-300}, {"rel_tol", 1e-300}, {"max_depth", 2}};
    const auto path = write_config(cfg);
    EXPECT_EQ(run({"neutral", "--config", path.string(), "--out", dir_.string()}), 2);
    EXPECT_NE(err_.str().find("numerical failure"), std::string::npos) << err_.str();
}
