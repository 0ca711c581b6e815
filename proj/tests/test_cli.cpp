#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "smr/cli.hpp"

namespace smr {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

const std::string kData = SMR_DATA_DIR;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "smr-axioms");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("smr-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

TEST(Compute, ExternalJson) {
  const auto r = run({"compute", "--hospitals", kData + "/scale_ext_hospitals.csv", "--standard",
                      kData + "/scale_ext_standard.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto json = Json::parse(r.out);
  EXPECT_EQ(json["command"], "compute");
  EXPECT_EQ(json["schema_version"], "1");
  EXPECT_EQ(json["inputs_digest"].get<std::string>().size(), 64u);
  EXPECT_EQ(json["results"]["hospitals"][0]["smr"].get<double>(), 7.0 / 6.0);
  EXPECT_NE(r.out.find("1.1666666666666667"), std::string::npos);
}

TEST(Compute, Csv) {
  const auto r = run({"--format", "csv", "compute", "--hospitals", kData + "/scale_ext_hospitals.csv", "--standard",
                      kData + "/scale_ext_standard.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "hospital_id,scheme,actual_rate,expected_rate,smr\n"
            "H1,external,0.11666666666666667,0.10000000000000001,1.1666666666666667\n");
}

TEST(Compute, PrettyRoundsToTwoDecimals) {
  setenv("SMR_AXIOMS_NO_COLOR", "1", 1);
  const auto r = run({"--pretty", "--scheme", "internal", "compute", "--hospitals", kData + "/casemix_int_eta10.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1.17"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("0.78"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("\x1b["), std::string::npos);
}

TEST(Compute, InternalWarnsAboutIgnoredStandard) {
  const auto r = run({"--scheme", "internal", "compute", "--hospitals", kData + "/expected_ext_hospitals.csv",
                      "--standard", kData + "/expected_ext_standard.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["warnings"].size(), 1u);
}

TEST(Compute, OutFileAndDigestIgnoresIt) {
  TempDir dir;
  const std::vector<std::string> base{"compute", "--hospitals", kData + "/scale_ext_hospitals.csv", "--standard",
                                      kData + "/scale_ext_standard.csv"};
  auto with_out = base;
  with_out.insert(with_out.begin(), {"--out", dir.path("report.json")});
  const auto a = run(with_out);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_TRUE(a.out.empty());
  std::ifstream file(dir.path("report.json"));
  const std::string written((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  EXPECT_EQ(written, run(base).out);
}

TEST(Errors, MissingRateReportsRow) {
  TempDir dir;
  const auto h = dir.write("h.csv", "hospital_id,stratum_id,patients,mortality_rate\nH,1,5,0.1\nH,2,4,\n");
  const auto s = dir.write("s.csv", "stratum_id,expected_rate\n1,0.1\n2,0.1\n");
  const auto r = run({"compute", "--hospitals", h, "--standard", s});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("h.csv:3"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("ValidationError"), std::string::npos) << r.err;
}

TEST(Errors, DataErrorsExitOne) {
  TempDir dir;
  const auto h = dir.write("h.csv", "hospital_id,stratum_id,patients,mortality_rate\nH,1,5,0.1\nH,7,4,0.1\n");
  const auto s = dir.write("s.csv", "stratum_id,expected_rate\n1,0.1\n");
  const auto r = run({"compute", "--hospitals", h, "--standard", s});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("'7'"), std::string::npos) << r.err;
}

TEST(Errors, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"compute"}).code, 2);
  EXPECT_EQ(run({"compute", "--hospitals", kData + "/scale_ext_hospitals.csv"}).code, 2);
  EXPECT_EQ(run({"--format", "xml", "audit"}).code, 2);
  EXPECT_EQ(run({"scenario", "--name", "nope"}).code, 2);
  EXPECT_EQ(run({"scenario", "--name", "casemix-ext", "--values", "30"}).code, 2);
  EXPECT_EQ(run({"scenario", "--name", "casemix-ext", "--values", "1", "--min", "0"}).code, 2);
  EXPECT_EQ(run({"sensitivity", "--hospitals", kData + "/scale_ext_hospitals.csv", "--standard",
                 kData + "/scale_ext_standard.csv", "--analysis", "cross"})
                .code,
            2);
  EXPECT_EQ(run({"sensitivity", "--hospitals", kData + "/scale_ext_hospitals.csv", "--standard",
                 kData + "/scale_ext_standard.csv", "--analysis", "scale"})
                .code,
            2);
}

TEST(Errors, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("audit"), std::string::npos);
}

TEST(Sensitivity, ExternalShift) {
  TempDir dir;
  const auto h = dir.write("h.csv", "hospital_id,stratum_id,patients,mortality_rate\nH1,1,20,0.2\nH1,2,0,0.1\nH1,3,5,0.2\n");
  const auto s = dir.write("s.csv", "stratum_id,expected_rate\n1,0.2\n2,0.1\n3,0.15\n");
  const auto r = run({"sensitivity", "--hospitals", h, "--standard", s, "--analysis", "shift", "--from", "1", "--to",
                      "2", "--eta", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto results = Json::parse(r.out)["results"];
  EXPECT_NEAR(results["value"].get<double>(), 0.006191950464396285, 1e-15);
  EXPECT_TRUE(results["check_agrees"].get<bool>());
}

TEST(Sensitivity, InternalScaleNeedsHospitalWhenSeveral) {
  const auto args = std::vector<std::string>{"--scheme",  "internal", "sensitivity", "--hospitals",
                                             kData + "/casemix_int_eta10.csv", "--analysis", "scale", "--lambda", "2"};
  EXPECT_EQ(run(args).code, 2);
  auto with_hospital = args;
  with_hospital.insert(with_hospital.end(), {"--hospital", "H1"});
  const auto r = run(with_hospital);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(Json::parse(r.out)["results"]["check_agrees"].get<bool>());
}

TEST(Audit, ByteIdenticalForSameSeed) {
  const auto a = run({"--seed", "7", "audit", "--trials", "300"});
  const auto b = run({"--seed", "7", "audit", "--trials", "300"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto json = Json::parse(a.out);
  EXPECT_EQ(json["results"]["seed"], 7);
  EXPECT_EQ(json["results"]["rows"].size(), 2u);
}

TEST(Audit, ExpectedMatrixPasses) {
  const auto r = run({"audit", "--expect-paper", "--trials", "1000"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(Json::parse(r.out)["results"]["matches_expected"].get<bool>());
}

TEST(Audit, ExtraMeasureRows) {
  const auto r = run({"--format", "csv", "audit", "--trials", "100", "--measure", "constant", "--measure",
                      "actual-rate"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("constant,strict_monotonicity,violated"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("actual-rate,case_mix_insensitivity,violated"), std::string::npos) << r.out;
}

TEST(Scenario, CheckClaims) {
  for (const char* name : {"casemix-ext", "scale-ext", "actual-ext", "expected-ext", "casemix-int", "scale-int",
                           "actual-int"}) {
    const auto r = run({"scenario", "--name", name, "--check-claims"});
    EXPECT_EQ(r.code, 0) << name << ": " << r.err;
    EXPECT_TRUE(Json::parse(r.out)["results"]["claims_passed"].get<bool>()) << name;
  }
  const auto r = run({"scenario", "--name", "actual-int", "--override", "w11=0.6", "--check-claims"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Scenario, ExplicitValuesCsv) {
  const auto r = run({"--format", "csv", "scenario", "--name", "casemix-int", "--values", "0,10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1.1666666666666667"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("0.77777777777777779"), std::string::npos) << r.out;
}

TEST(Scenario, IntegerOnly) {
  EXPECT_EQ(run({"scenario", "--name", "casemix-int", "--integer-only"}).code, 0);
  EXPECT_NE(run({"scenario", "--name", "casemix-int", "--integer-only", "--values", "2.5"}).code, 0);
}

TEST(Scenario, BadOverride) {
  EXPECT_EQ(run({"scenario", "--name", "actual-int", "--override", "w11"}).code, 2);
  EXPECT_EQ(run({"scenario", "--name", "actual-int", "--override", "w11=abc"}).code, 2);
  EXPECT_EQ(run({"scenario", "--name", "actual-int", "--override", "w11=1.5"}).code, 2);
}

}  // namespace
}  // namespace smr
