#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "casimir/cli.hpp"

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "casimir-edges");
  std::ostringstream out, err;
  Outcome r;
  r.code = casimir::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> v;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) v.push_back(f);
  return v;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("casimir_cli_test_" + name);
}

}  // namespace

TEST(CliCsv, OverlapSchemaAndDefaults) {
  const Outcome r = invoke({"overlap"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 35u);
  EXPECT_EQ(ls[0], casimir::cli::kCsvMagic);
  EXPECT_EQ(ls[1], "abscissa,energy,error,method,converged");
  for (std::size_t i = 2; i < ls.size(); ++i) {
    const auto f = split(ls[i]);
    ASSERT_EQ(f.size(), 5u) << ls[i];
    EXPECT_EQ(f[3], "reflection:1");
    EXPECT_EQ(f[4], "true");
  }
  // d_x = 0 is the ninth abscissa of -2..6 in 33 steps.
  const auto zero = split(ls[2 + 8]);
  EXPECT_DOUBLE_EQ(std::stod(zero[0]), 0.0);
  EXPECT_NEAR(std::stod(zero[1]), -0.0053752, 1e-7);
}

TEST(CliCsv, TwelveSignificantDigits) {
  const Outcome r = invoke({"overlap", "--dx-min", "1", "--dx-max", "2", "--steps", "2"});
  ASSERT_EQ(r.code, 0);
  const auto f = split(lines(r.out)[2]);
  const double expected = casimir::wedge::energy_first_reflection_overlap(1.0, 1.0).value;
  EXPECT_EQ(f[1], casimir::cli::format_number(expected));
  EXPECT_NEAR(std::stod(f[1]), expected, 5e-12 * std::abs(expected));
}

TEST(CliCsv, TiltColumnHoldsCoefficient) {
  const Outcome r = invoke({"tilt", "--theta-min", "0", "--theta-max", "1.5", "--steps", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 6u);
  EXPECT_NEAR(std::stod(split(ls[2])[1]), 0.0066685, 1e-7);
  EXPECT_EQ(split(ls[2])[3], "two-reflection");
}

TEST(CliCsv, ThermalCurveMatchesClosedFormAndIsMonotone) {
  const Outcome r = invoke({"thermal", "--ratio-min", "0.1", "--ratio-max", "3", "--steps", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 10u);
  double prev = 0.0;
  for (std::size_t i = 2; i < ls.size(); ++i) {
    const auto f = split(ls[i]);
    const double x = std::stod(f[0]), v = std::stod(f[1]);
    EXPECT_NEAR(v, casimir::thermal::em_free_energy_closed({1.0, 0.0}, {x, 1}), 1e-12);
    if (i > 2) {
      EXPECT_LT(v, prev);
    }
    prev = v;
  }
}

TEST(CliCsv, MatsubaraChannelAgreesWithClosedForm) {
  const Outcome a = invoke({"point", "thermal", "--ratio", "0.5", "--channel", "dirichlet"});
  const Outcome b = invoke({"point", "thermal", "--ratio", "0.5", "--channel", "dirichlet", "--method", "matsubara"});
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  const double va = nlohmann::json::parse(a.out)["result"]["value"];
  const double vb = nlohmann::json::parse(b.out)["result"]["value"];
  EXPECT_NEAR(va, vb, 1e-6 * std::abs(vb));
}

TEST(CliPoint, PfaAndFirstReflection) {
  const Outcome p = invoke({"point", "overlap", "--dx", "1", "--dy", "1", "--method", "pfa"});
  ASSERT_EQ(p.code, 0);
  const auto j = nlohmann::json::parse(p.out);
  EXPECT_NEAR(j["result"]["value"].get<double>(), -0.0137078, 1e-7);
  EXPECT_EQ(j["result"]["method"], "pfa");
  EXPECT_EQ(j["manifest"]["command"], "point overlap");

  const Outcome r1 = invoke({"point", "overlap", "--dx", "0", "--dy", "1"});
  ASSERT_EQ(r1.code, 0);
  EXPECT_NEAR(nlohmann::json::parse(r1.out)["result"]["value"].get<double>(), -0.0053752, 1e-7);
}

TEST(CliPoint, InvalidDomainNamesInvariant) {
  const Outcome r = invoke({"point", "overlap", "--dx", "1", "--dy", "0", "--method", "exact"});
  EXPECT_EQ(r.code, casimir::cli::kExitDomain);
  EXPECT_NE(r.err.find("d_y > 0"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(CliErrors, UsageAndPartialFailures) {
  EXPECT_EQ(invoke({"overlap", "--bogus", "1"}).code, casimir::cli::kExitUsage);
  EXPECT_EQ(invoke({}).code, casimir::cli::kExitUsage);
  EXPECT_EQ(invoke({"overlap", "--method", "nonsense"}).code, casimir::cli::kExitUsage);
  EXPECT_EQ(invoke({"--help"}).code, 0);
  const Outcome v = invoke({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(casimir::cli::kToolVersion), std::string::npos);

  const Outcome pfa = invoke({"overlap", "--method", "pfa", "--dx-min", "-1", "--dx-max", "1", "--steps", "3"});
  EXPECT_EQ(pfa.code, casimir::cli::kExitPartial);
  const auto ls = lines(pfa.out);
  ASSERT_EQ(ls.size(), 5u);
  EXPECT_EQ(split(ls[2])[1], "nan");
  EXPECT_EQ(split(ls[2])[4], "false");
  EXPECT_EQ(split(ls[4])[4], "true");
}

TEST(CliJson, EmbedsManifest) {
  const Outcome r = invoke({"overlap", "--format", "json", "--steps", "3", "--dx-min", "0", "--dx-max", "2"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["rows"].size(), 3u);
  EXPECT_EQ(j["manifest"]["command"], "overlap");
  EXPECT_EQ(j["manifest"]["flags"]["steps"], 3);
  EXPECT_TRUE(j["manifest"].contains("truncation"));
  EXPECT_TRUE(j["manifest"].contains("versions"));
  EXPECT_EQ(j["manifest"]["row_converged"].size(), 3u);
}

TEST(CliFiles, OutputWritesSidecarManifest) {
  const auto csv = temp_path("overlap.csv");
  const auto man = std::filesystem::path(csv.string() + ".manifest.json");
  std::filesystem::remove(csv);
  std::filesystem::remove(man);
  const Outcome r = invoke({"overlap", "--steps", "5", "--out", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_TRUE(std::filesystem::exists(csv));
  ASSERT_TRUE(std::filesystem::exists(man));
  std::ifstream in(man);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["command"], "overlap");
  EXPECT_EQ(j["arguments"].size(), 6u);
  std::filesystem::remove(csv);
  std::filesystem::remove(man);
}

TEST(CliDeterminism, ByteIdenticalCsv) {
  const std::vector<std::string> args = {"overlap", "--steps", "9", "--dx-min", "-1", "--dx-max", "3"};
  EXPECT_EQ(invoke(args).out, invoke(args).out);
  const std::vector<std::string> tilt = {"tilt", "--steps", "5"};
  EXPECT_EQ(invoke(tilt).out, invoke(tilt).out);
}

#ifdef CASIMIR_EDGES_EXE
TEST(CliProcess, ExitCodesFromExecutable) {
  const std::string exe = CASIMIR_EDGES_EXE;
  auto status = [&](const std::string& args) {
    const int raw = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("point overlap --dx 1 --dy 1 --method pfa"), 0);
  EXPECT_EQ(status("point overlap --dx 1 --dy 0 --method exact"), 65);
  EXPECT_EQ(status("overlap --no-such-flag"), 64);
  EXPECT_EQ(status("overlap --method pfa --dx-min -1 --dx-max 1 --steps 3"), 2);
}
#endif
