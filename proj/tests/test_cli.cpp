#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "gpentropy/gpentropy.hpp"

using namespace gpentropy;
using Json = nlohmann::ordered_json;

namespace {

const double kHalfLog2PiE = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string spec_json(const ProcessSpec& spec) { return to_json(spec).dump(); }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("gpentropy_test_cli_" + name);
}

std::filesystem::path write_text(const std::string& name, const std::string& text) {
  const auto path = temp_file(name);
  std::ofstream(path) << text;
  return path;
}

Json error_doc(const RunResult& r) { return Json::parse(r.err); }

const std::string kWhite1 = R"({"kind":"white","m":1,"sigma":[[1]]})";

}  // namespace

TEST(CliRate, WhiteScalarClosedForms) {
  const RunResult r = run({"rate", "--spec-json", kWhite1});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(r.out);
  EXPECT_EQ(doc["m"], 1);
  EXPECT_NEAR(doc["shannon_rate"].get<double>(), kHalfLog2PiE, 1e-12);
  EXPECT_NEAR(doc["renyi"]["2.0"].get<double>(), 0.5 * std::log(4.0 * std::numbers::pi), 1e-12);
  for (const char* key : {"spectral_integral", "grid_size", "diagnostics", "method"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  EXPECT_TRUE(doc["diagnostics"]["grid_converged"].get<bool>());
}

TEST(CliRate, Ar1FromFile) {
  const auto path = write_text("ar1.json", spec_json(ProcessSpec::ar1(0.9, 1.0)));
  const RunResult r = run({"rate", "--spec", path.string(), "--alpha", "0.5,2,5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(r.out);
  EXPECT_NEAR(doc["shannon_rate"].get<double>(), kHalfLog2PiE, 1e-9);
  EXPECT_EQ(doc["renyi"].size(), 3u);
  EXPECT_TRUE(doc["renyi"].contains("0.5"));
  EXPECT_TRUE(doc["renyi"].contains("5.0"));
}

TEST(CliRate, IndefiniteSigmaIsBadInput) {
  const RunResult r =
      run({"rate", "--spec-json", R"({"kind":"white","m":2,"sigma":[[1,2],[2,1]]})"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  const Json e = error_doc(r);
  EXPECT_EQ(e["error"], "InvalidSpec");
  EXPECT_EQ(e["exit_code"], 2);
}

TEST(CliRate, ZeroSigmaIsSingular) {
  const std::string zero = R"({"kind":"white","m":2,"sigma":[[0,0],[0,0]]})";
  const RunResult r = run({"rate", "--spec-json", zero});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(error_doc(r)["error"], "SingularDensity");
  const RunResult f = run({"finite", "--spec-json", zero, "--n", "4"});
  EXPECT_EQ(f.code, 3);
  EXPECT_EQ(error_doc(f)["error"], "NotPositiveDefinite");
}

TEST(CliRate, UsageErrors) {
  EXPECT_EQ(run({"rate"}).code, 2);
  EXPECT_EQ(run({"rate", "--spec-json", kWhite1, "--spec", "x.json"}).code, 2);
  EXPECT_EQ(run({"rate", "--spec-json", kWhite1, "--alpha", "-1"}).code, 2);
  EXPECT_EQ(error_doc(run({"rate", "--spec-json", kWhite1, "--alpha", "0"}))["error"], "BadAlpha");
  EXPECT_EQ(run({"rate", "--spec-json", kWhite1, "--alpha", "two"}).code, 2);
  EXPECT_EQ(run({"rate", "--spec-json", kWhite1, "--format", "csv"}).code, 2);
  EXPECT_EQ(run({"rate", "--spec-json", "{not json"}).code, 2);
  EXPECT_EQ(run({"rate", "--spec", temp_file("missing.json").string()}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliRate, OutPathWritesFile) {
  const auto path = temp_file("rate_out.json");
  std::filesystem::remove(path);
  const RunResult r = run({"rate", "--spec-json", kWhite1, "--out", path.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  const Json doc = Json::parse(in);
  EXPECT_NEAR(doc["shannon_rate"].get<double>(), kHalfLog2PiE, 1e-12);
}

TEST(CliFinite, WhiteTwoDimensionalSingleBlock) {
  const RunResult r =
      run({"finite", "--spec-json", R"({"kind":"white","m":2,"sigma":[[1,0],[0,1]]})", "--n", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(r.out);
  ASSERT_EQ(doc["rows"].size(), 1u);
  EXPECT_NEAR(doc["rows"][0]["shannon"].get<double>(), 2.0 * kHalfLog2PiE, 1e-14);
}

TEST(CliFinite, CsvColumns) {
  const RunResult r = run({"finite", "--spec-json", kWhite1, "--n", "1,4", "--alpha", "0.5,2",
                           "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "n,shannon,renyi_0.5,renyi_2.0");
  std::string row;
  int count = 0;
  while (std::getline(lines, row)) {
    ++count;
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 3);
  }
  EXPECT_EQ(count, 2);
}

TEST(CliFinite, LaterRowCloserToRate) {
  const std::string ar1 = spec_json(ProcessSpec::ar1(0.6, 1.0));
  const double rate =
      Json::parse(run({"rate", "--spec-json", ar1}).out)["shannon_rate"].get<double>();
  const RunResult r = run({"finite", "--spec-json", ar1, "--n", "16,1024"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json rows = Json::parse(r.out)["rows"];
  const double early = std::abs(rows[0]["shannon"].get<double>() - rate);
  const double late = std::abs(rows[1]["shannon"].get<double>() - rate);
  EXPECT_LT(late, early);
}

TEST(CliFinite, SizeLimit) {
  const RunResult r = run({"finite", "--spec-json", kWhite1, "--n", "16,1000000000"});
  EXPECT_EQ(r.code, 5);
  EXPECT_TRUE(r.out.empty());
  const Json e = error_doc(r);
  EXPECT_EQ(e["error"], "SizeLimit");
  EXPECT_EQ(e["cap"], 16384);
  EXPECT_EQ(run({"finite", "--spec-json", kWhite1, "--n", "0"}).code, 2);
  EXPECT_EQ(run({"finite", "--spec-json", kWhite1, "--n", "65", "--max-dim", "64"}).code, 5);
}

TEST(CliConverge, WhiteGapsAreZero) {
  const RunResult r = run({"converge", "--spec-json", kWhite1, "--n", "1,8,32"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(r.out);
  EXPECT_EQ(doc["function"], "log");
  ASSERT_EQ(doc["rows"].size(), 3u);
  for (const auto& row : doc["rows"]) EXPECT_EQ(row["gap"].get<double>(), 0.0);
}

TEST(CliConverge, Ar1GapShrinks) {
  const RunResult r = run({"converge", "--spec-json", spec_json(ProcessSpec::ar1(0.5, 1.0)),
                           "--n", "16,64,256,1024", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "n,finite_rate,limit_rate,gap");
  double previous = std::numeric_limits<double>::infinity();
  while (std::getline(lines, line)) {
    const double gap = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_LT(std::abs(gap), previous) << line;
    previous = std::abs(gap);
  }
}

TEST(CliConverge, Var1FinalGapSmall) {
  const RunResult r = run({"converge", "--spec-json", spec_json(fixtures::var1_2x2()),
                           "--n", "16,128"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json rows = Json::parse(r.out)["rows"];
  EXPECT_LT(std::abs(rows.back()["gap"].get<double>()), 1e-2);
}

TEST(CliEstimate, WhiteCsvNearSampleVariance) {
  const TimeSeries ts = simulate(fixtures::white(1), 20'000, 17);
  const auto path = temp_file("white.csv");
  {
    std::ofstream out(path);
    write_csv(out, ts);
  }
  const RunResult r = run({"estimate", path.string(), "--max-lag", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(r.out);
  const double k0 = sample_autocovariance(ts, 0)(0, 0);
  EXPECT_NEAR(doc["shannon_rate"].get<double>(),
              0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * k0), 0.05);
  EXPECT_EQ(doc["window"]["kind"], "bartlett");
  EXPECT_EQ(doc["window"]["max_lag"], 8);
  EXPECT_EQ(doc["window"]["samples"], 20'000);
  EXPECT_EQ(doc["source"], path.string());
}

TEST(CliEstimate, BinaryInputAndDefaultWindow) {
  const TimeSeries ts = simulate(fixtures::var1_2x2(), 10'000, 18);
  const auto path = temp_file("var1.grts");
  {
    std::ofstream out(path, std::ios::binary);
    write_binary(out, ts);
  }
  const RunResult r = run({"estimate", path.string(), "--window", "truncation"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(r.out);
  EXPECT_EQ(doc["m"], 2);
  EXPECT_EQ(doc["window"]["kind"], "truncation");
  EXPECT_EQ(doc["window"]["max_lag"], 100);
}

TEST(CliEstimate, DegenerateAndMalformedInput) {
  const auto constant = write_text("constant.csv", "x0,x1\n1,2\n1,2.5\n1,1.5\n1,2\n");
  const RunResult c = run({"estimate", constant.string(), "--max-lag", "1"});
  EXPECT_EQ(c.code, 3);
  EXPECT_EQ(error_doc(c)["error"], "SingularDensity");

  const auto header_only = write_text("header.csv", "x0\n");
  const RunResult h = run({"estimate", header_only.string()});
  EXPECT_EQ(h.code, 2);
  EXPECT_EQ(error_doc(h)["error"], "ParseError");

  const auto ragged = write_text("ragged.csv", "1,2\n3\n");
  EXPECT_EQ(run({"estimate", ragged.string()}).code, 2);
  EXPECT_EQ(run({"estimate", temp_file("absent.csv").string()}).code, 2);
  EXPECT_EQ(run({"estimate"}).code, 2);

  const auto tiny = write_text("tiny.csv", "1\n2\n4\n");
  EXPECT_EQ(error_doc(run({"estimate", tiny.string(), "--max-lag", "3"}))["error"],
            "LagOutOfRange");
  EXPECT_EQ(run({"estimate", tiny.string(), "--window", "hann"}).code, 2);
}

TEST(CliSelfcheck, DefaultSeedPassesAndIsDeterministic) {
  const RunResult a = run({"selfcheck"});
  const RunResult b = run({"selfcheck"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const Json doc = Json::parse(a.out);
  EXPECT_TRUE(doc["passed"].get<bool>());
  EXPECT_EQ(doc["cases"].size(), 25u);
}

TEST(CliSelfcheck, FloorOneFails) {
  const RunResult r = run({"selfcheck", "--floor", "1"});
  EXPECT_EQ(r.code, 1);
  const Json e = error_doc(r);
  EXPECT_EQ(e["error"], "SelfCheckFailed");
  EXPECT_FALSE(e["failing"].empty());
}

TEST(CliSimulate, CsvFeedsEstimate) {
  const auto path = temp_file("sim.csv");
  const RunResult s = run({"simulate", "--spec-json", spec_json(ProcessSpec::ar1(0.5, 1.0)),
                           "--length", "5000", "--seed", "3", "--out", path.string()});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(load_timeseries(path.string()).length(), 5000);
  EXPECT_EQ(run({"simulate", "--spec-json", kWhite1, "--binary"}).code, 2);
}

// Properties.

TEST(CliProperty, OutputIsDeterministic) {
  const std::string var1 = spec_json(fixtures::var1_2x2());
  const std::vector<std::vector<std::string>> commands = {
      {"rate", "--spec-json", var1, "--alpha", "0.5,2"},
      {"finite", "--spec-json", var1, "--n", "3,17", "--format", "csv"},
      {"converge", "--spec-json", var1, "--n", "4,8"},
  };
  for (const auto& args : commands) {
    const RunResult a = run(args);
    const RunResult b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out) << args[0];
  }
}

TEST(CliProperty, JsonReEmitsIdentically) {
  const std::string var1 = spec_json(fixtures::var1_2x2());
  const std::vector<std::vector<std::string>> commands = {
      {"rate", "--spec-json", var1, "--alpha", "0.5,2,5"},
      {"finite", "--spec-json", var1, "--n", "1,5"},
      {"converge", "--spec-json", var1, "--n", "2,4"},
      {"selfcheck"},
  };
  for (const auto& args : commands) {
    const RunResult r = run(args);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(dump_json(Json::parse(r.out)) + "\n", r.out) << args[0];
  }
}

TEST(CliProperty, RateAndFiniteAgreeAtLargestAllowedN) {
  // Under a configured cap of 512 the largest allowed n is 512 / m. The gap
  // bound for the shipped fixtures is 1/n nats per block.
  const std::uint64_t cap = 512;
  for (const auto& f : fixtures::all()) {
    const std::string spec = spec_json(f.spec);
    const auto n = static_cast<std::int64_t>(cap) / f.spec.m();
    const RunResult rate = run({"rate", "--spec-json", spec});
    const RunResult finite = run({"finite", "--spec-json", spec, "--n", std::to_string(n),
                                  "--max-dim", std::to_string(cap)});
    ASSERT_EQ(rate.code, 0) << f.name << rate.err;
    ASSERT_EQ(finite.code, 0) << f.name << finite.err;
    const double h_rate = Json::parse(rate.out)["shannon_rate"].get<double>();
    const double h_finite = Json::parse(finite.out)["rows"][0]["shannon"].get<double>();
    EXPECT_LE(std::abs(h_finite - h_rate), 1.0 / static_cast<double>(n)) << f.name;
    EXPECT_EQ(run({"finite", "--spec-json", spec, "--n", std::to_string(n + 1), "--max-dim",
                   std::to_string(cap)})
                  .code,
              5)
        << f.name;
  }
}
