#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <gtest/gtest.h>

#include <knopp/cli.hpp>

namespace fs = std::filesystem;

namespace
{

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string> &args)
{
    std::ostringstream out, err;
    const int code = knopp::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<nlohmann::json> json_lines(const std::string &text)
{
    std::vector<nlohmann::json> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) {
        if (!line.empty()) {
            out.push_back(nlohmann::json::parse(line));
        }
    }
    return out;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class TempDir : public ::testing::Test
{
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("knopp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override
    {
        fs::remove_all(dir_);
    }
    fs::path dir_;
};

} // namespace

TEST(CliEval, PrintsHeaderAndExactValue)
{
    const auto r = invoke({"eval", "--alpha", "1/2", "--nu", "2", "--x", "1/2"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("# knopp 0.1.0 command=eval alpha=1/2 nu=2", 0), 0u);
    EXPECT_NE(r.out.find("exact = 1/2"), std::string::npos);
}

TEST(CliEval, JsonOutput)
{
    const auto r = invoke({"eval", "--alpha", "1/2", "--nu", "2", "--x", "1", "--json"});
    ASSERT_EQ(r.code, 0);
    const auto lines = json_lines(r.out);
    ASSERT_EQ(lines.size(), 1u);
    EXPECT_EQ(lines[0]["value_exact"], "1");
}

TEST(CliEval, UsageErrors)
{
    EXPECT_EQ(invoke({"eval", "--alpha", "0.5", "--nu", "2", "--x", "1"}).code, 2);
    EXPECT_EQ(invoke({"eval", "--nu", "2", "--x", "1"}).code, 2);
    EXPECT_EQ(invoke({"eval", "--alpha", "3/2", "--nu", "2", "--x", "1"}).code, 2);
    EXPECT_EQ(invoke({"eval", "--alpha", "1/2", "--nu", "2", "--x", "1/3"}).code, 2);
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
}

TEST(CliEval, TermCapTooSmall)
{
    const auto r = invoke({"eval", "--alpha", "1/3", "--nu", "1", "--x", "1/2^40", "--eps", "1e-30", "--term-cap", "3"});
    EXPECT_NE(r.err.find("achievable width"), std::string::npos);
    EXPECT_EQ(r.code, 2);
}

TEST(CliVersion, PrintsVersion)
{
    const auto r = invoke({"--version"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
}

TEST(CliCertify, HolderPasses)
{
    const auto r = invoke({"certify", "holder", "--alpha", "1/2", "--nu", "2", "--pairs", "200", "--seed", "3"});
    EXPECT_EQ(r.code, 0);
    const auto lines = json_lines(r.out);
    ASSERT_GE(lines.size(), 2u);
    EXPECT_EQ(lines.front()["kind"], "header");
    EXPECT_EQ(lines.front()["seed"], 3);
    EXPECT_EQ(lines.back()["verdict"], "pass");
}

TEST(CliCertify, WitnessRegimeErrors)
{
    EXPECT_EQ(invoke({"certify", "witness", "--alpha", "1/2", "--nu", "2", "--points", "16", "--m-max", "4"}).code, 0);
    EXPECT_EQ(invoke({"certify", "witness", "--alpha", "1/2", "--nu", "1"}).code, 2);
    EXPECT_EQ(invoke({"certify", "witness", "--alpha", "1/2", "--nu", "2", "--beta", "1/2"}).code, 2);
}

TEST(CliCertify, L1ReportsExactIntegral)
{
    const auto r = invoke({"certify", "l1", "--alpha", "1/2", "--nu", "2", "--m", "1"});
    ASSERT_EQ(r.code, 0);
    const auto lines = json_lines(r.out);
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[1]["integral_exact"], "783/256");
    EXPECT_EQ(lines[1]["verdict"], "pass");
}

TEST(CliCertify, TrendPasses)
{
    EXPECT_EQ(invoke({"certify", "trend", "--alpha", "1/2", "--nu", "2", "--m-max", "5"}).code, 0);
}

TEST_F(TempDir, OutputsAreDeterministic)
{
    const auto a = dir_ / "a.jsonl";
    const auto b = dir_ / "b.jsonl";
    for (const auto &p : {a, b}) {
        EXPECT_EQ(invoke({"certify", "holder", "--alpha", "1/3", "--nu", "3", "--pairs", "300", "--seed", "9",
                          "--items", "-o", p.string()})
                      .code,
                  0);
    }
    EXPECT_FALSE(slurp(a).empty());
    EXPECT_EQ(slurp(a), slurp(b));

    const auto c = dir_ / "c.svg";
    const auto d = dir_ / "d.svg";
    for (const auto &p : {c, d}) {
        EXPECT_EQ(invoke({"sample", "--alpha", "1/2", "--nu", "2", "--points", "257", "--terms", "50", "--format",
                          "svg", "-o", p.string()})
                      .code,
                  0);
    }
    EXPECT_NE(slurp(c).find("<polyline"), std::string::npos);
    EXPECT_EQ(slurp(c), slurp(d));
}

TEST_F(TempDir, ConfigFileAndOverride)
{
    const auto cfg = dir_ / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "# witness settings\nalpha = 1/2\nnu = 1\npoints = 8\nm-max = 3\n";
    }
    EXPECT_EQ(invoke({"certify", "witness", "--config", cfg.string()}).code, 2);
    const auto r = invoke({"certify", "witness", "--config", cfg.string(), "--nu", "2"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(json_lines(r.out).front()["params"]["nu"], 2);
    EXPECT_EQ(invoke({"certify", "witness", "--config", (dir_ / "missing.cfg").string()}).code, 2);
}

TEST_F(TempDir, UnwritableOutput)
{
    const auto bad = dir_ / "no" / "such" / "dir" / "x.csv";
    EXPECT_EQ(invoke({"sample", "--alpha", "1/2", "--nu", "2", "-o", bad.string()}).code, 2);
}

TEST(CliSample, CsvHeaderAndRows)
{
    const auto r = invoke({"sample", "--alpha", "1/2", "--nu", "2", "--points", "3", "--terms", "2"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("# knopp 0.1.0 command=sample", 0), 0u);
    EXPECT_NE(r.out.find("1,0,1.00000000000000000e+00,1.00000000000000000e+00"), std::string::npos);
    EXPECT_EQ(invoke({"sample", "--alpha", "1/2", "--nu", "2", "--format", "png"}).code, 2);
}

TEST(CliPde, StructureVerdicts)
{
    EXPECT_EQ(invoke({"pde", "structure", "--builder", "planar-b8", "--samples", "500"}).code, 0);
    EXPECT_EQ(invoke({"pde", "structure", "--builder", "aronsson-map", "--samples", "500"}).code, 0);
    EXPECT_EQ(invoke({"pde", "structure", "--builder", "parabolic", "--samples", "500"}).code, 1);
    EXPECT_EQ(invoke({"pde", "structure", "--builder", "nonesuch"}).code, 2);
}

TEST(CliPde, ResidualTable)
{
    const auto r = invoke({"pde", "residual", "--builder", "rhombus-113", "--points", "50"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("operator,h,residual,ratio"), std::string::npos);
    EXPECT_EQ(invoke({"pde", "residual", "--builder", "planar-b8", "--K", "knopp:1/2,2"}).code, 2);
}

TEST(CliPde, PhaseRaster)
{
    const auto r = invoke({"pde", "phase", "--builder", "rhombus-113", "--grid", "21"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("P2\n", 0), 0u);
    EXPECT_NE(r.out.find("\n21 21\n255\n"), std::string::npos);
}
