/*
 * Copyright 2026 The shiftweigh Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"
#include "oracle_values.h"
#include "shiftweigh/estimators.h"
#include "shiftweigh/scenarios.h"
#include "test_util.h"

namespace fs = std::filesystem;
namespace sw = shiftweigh;
using Json = nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("shiftweigh_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult run(const std::string& args) const {
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(SHIFTWEIGH_CLI_PATH) + " " + args +
                            " 2>" + err.string();
    CliResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    char buf[4096];
    while (std::size_t k = std::fread(buf, 1, sizeof(buf), pipe)) r.out.append(buf, k);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
  }

  fs::path write(const std::string& name, const std::string& content) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << content;
    return p;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const char* kKernel = "'{\"family\":\"gaussian\",\"sigma\":0.5}'";

Json error_json(const CliResult& r) { return Json::parse(r.err); }

TEST_F(Cli, WeightsNoShift) {
  std::string csv = "a,b\n";
  for (int i = 0; i < 40; ++i) {
    csv += std::to_string(i / 40.0) + "," + std::to_string((i * 7 % 40) / 40.0) + "\n";
  }
  const auto p = write("x.csv", csv);
  const CliResult r = run("weights --train " + p.string() + " --test " + p.string() +
                    " --kernel " + kKernel + " --B 5 --out " + path("w.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(j["summary"]["mean"].get<double>(), 1.0, 1e-3);
  EXPECT_LT(j["lhat"].get<double>(), 1e-4);
  EXPECT_TRUE(j["converged"].get<bool>());
  const std::string w = slurp(path("w.csv"));
  EXPECT_EQ(std::count(w.begin(), w.end(), '\n'), 41);
  EXPECT_EQ(w.rfind("row,beta_hat\n", 0), 0u);
}

TEST_F(Cli, MalformedCellNamesRow) {
  const auto p = write("bad.csv", "x0,y\n0.1,1\n0.2,abc\n");
  const CliResult r = run("weights --train " + p.string() + " --test " + p.string() +
                    " --kernel " + kKernel + " --B 2 --out " + path("w.csv"));
  EXPECT_EQ(r.code, 2);
  const Json e = error_json(r);
  EXPECT_EQ(e["error"], "input");
  const std::string msg = e["message"];
  EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("'y'"), std::string::npos) << msg;
}

TEST_F(Cli, UnknownFlagRejected) {
  const CliResult r = run("bound --regime thm1 --bogus 1");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(error_json(r)["error"], "usage");
}

TEST_F(Cli, MissingSubcommandIsUsageError) {
  EXPECT_EQ(run("").code, 2);
}

TEST_F(Cli, ExportedWeightsTrackTrueRatio) {
  ASSERT_EQ(run("export --scenario S1 --n-tr 2000 --n-te 2000 --seed 7 --out " +
                path("ex")).code, 0);
  const CliResult r = run("weights --train " + path("ex/train.csv") + " --test " +
                    path("ex/test.csv") + " --kernel " + kKernel +
                    " --B 1501.4527021573146 --out " + path("w.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("w.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "row,beta_hat,beta_true");
  std::vector<double> a, b;
  while (std::getline(in, line)) {
    const auto c1 = line.find(','), c2 = line.rfind(',');
    a.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    b.push_back(std::stod(line.substr(c2 + 1)));
  }
  ASSERT_EQ(a.size(), 2000u);
  const Eigen::Map<Eigen::ArrayXd> x(a.data(), 2000), y(b.data(), 2000);
  const double cov = ((x - x.mean()) * (y - y.mean())).sum();
  const double r_xy = cov / std::sqrt((x - x.mean()).square().sum() *
                                      (y - y.mean()).square().sum());
  EXPECT_GT(r_xy, 0.5);
}

TEST_F(Cli, EstimateConstantLabels) {
  std::string tr = "x0,y\n", te = "x0\n";
  for (int i = 0; i < 50; ++i) {
    tr += std::to_string(i / 50.0) + ",0.25\n";
    te += std::to_string(i / 50.0) + "\n";
  }
  const CliResult r = run("estimate --train " + write("tr.csv", tr).string() +
                    " --test " + write("te.csv", te).string() + " --kernel " +
                    kKernel + " --B 3");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(Json::parse(r.out)["point"].get<double>(), 0.25, 1e-3);
}

TEST_F(Cli, EstimatePluginDispatch) {
  ASSERT_EQ(run("export --scenario S1 --n-tr 100 --n-te 100 --seed 1 --out " +
                path("ex")).code, 0);
  const CliResult r = run("estimate --estimator plugin --lambda 0.01 --train " +
                    path("ex/train.csv") + " --test " + path("ex/test.csv") +
                    " --kernel " + kKernel);
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["kind"], "plugin");
}

TEST_F(Cli, EstimateMatchesLibraryBitForBit) {
  ASSERT_EQ(run("export --scenario S1 --n-tr 500 --n-te 700 --seed 7 --out " +
                path("ex")).code, 0);
  const CliResult r = run("estimate --train " + path("ex/train.csv") + " --test " +
                    path("ex/test.csv") + " --kernel " + kKernel +
                    " --B 1501.4527021573146");
  ASSERT_EQ(r.code, 0) << r.err;
  const sw::ScenarioSample s = sw::draw_sample(sw::find_scenario("S1"), 500, 700, 7);
  const sw::EstimateReport lib = sw::kmm_estimate(
      s.train, s.X_te, sw::KernelSpec::gaussian(0.5), 1501.4527021573146);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["point"].get<double>(), lib.point);
  EXPECT_EQ(j["weights"]["lhat"].get<double>(), *lib.weights->lhat);
}

TEST_F(Cli, EstimateOracleAndKde) {
  ASSERT_EQ(run("export --scenario S0 --n-tr 300 --n-te 300 --seed 2 --out " +
                path("ex")).code, 0);
  const std::string io = " --train " + path("ex/train.csv") + " --test " + path("ex/test.csv");
  const CliResult o = run("estimate --estimator oracle" + io);
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(Json::parse(o.out)["kind"], "oracle");
  const CliResult k = run("estimate --estimator kde --B 4" + io);
  ASSERT_EQ(k.code, 0) << k.err;
  EXPECT_EQ(Json::parse(k.out)["kind"], "kde_ratio");
  EXPECT_EQ(run("estimate --estimator kde" + io).code, 2);
  EXPECT_EQ(run("estimate --estimator kmm --B 2" + io).code, 2);
}

TEST_F(Cli, LabelsOutsideDeclaredRange) {
  const auto tr = write("tr.csv", "x0,y\n0.1,5\n0.2,12\n");
  const auto te = write("te.csv", "x0\n0.1\n");
  const std::string base = "estimate --train " + tr.string() + " --test " +
                           te.string() + " --kernel " + kKernel + " --B 2";
  EXPECT_EQ(run(base).code, 2);
  EXPECT_EQ(run(base + " --label-min 0 --label-max 10").code, 2);
  const CliResult ok = run(base + " --label-min 0 --label-max 20");
  ASSERT_EQ(ok.code, 0) << ok.err;
  const Json j = Json::parse(ok.out);
  EXPECT_NEAR(j["point"].get<double>(), 20 * j["point_unit_scale"].get<double>(),
              1e-12);
}

TEST_F(Cli, BoundZeroNormGivesUnitM) {
  const CliResult r = run("bound --regime thm1 --B 2 --C 1 --delta 0.05 --n-tr 100 "
                    "--n-te 100 --norm-m 0");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["bound"]["constants"]["M"].get<double>(), 1.0);
}

TEST_F(Cli, BoundLogRegimeNeedsSampleSize) {
  const CliResult r = run("bound --regime thm3 --B 1 --C 1 --delta 0.05 --n-tr 1 "
                    "--n-te 1 --Cinf 0.1 --s 1");
  EXPECT_EQ(r.code, 2);
  const Json e = error_json(r);
  EXPECT_EQ(e["error"], "domain");
  EXPECT_NE(e["message"].get<std::string>().find("large enough"), std::string::npos);
}

TEST_F(Cli, BoundGoldenFiles) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"thm1", "--regime thm1 --B 2 --C 1 --delta 0.05 --n-tr 100 --n-te 100 --norm-m 1"},
      {"thm2", "--regime thm2 --B 2 --C 1 --delta 0.05 --n-tr 100 --n-te 100 --C2 1 --theta 2"},
      {"thm3", "--regime thm3 --B 2 --C 1 --delta 0.05 --n-tr 10000 --n-te 10000 --Cinf 5 --s 1"},
      {"thm4", "--regime thm4 --B 4 --C 1 --delta 0.05 --n-tr 10000 --n-te 10000 --C1 1 --theta 2"},
  };
  const std::vector<double> want = {oracle::kThm1, oracle::kThm2Total,
                                    oracle::kThm3Total, oracle::kThm4Total};
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const CliResult r = run("bound " + cases[k].second);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, slurp(fs::path(SHIFTWEIGH_GOLDEN_DIR) /
                           ("bound_" + cases[k].first + ".json")))
        << cases[k].first;
    EXPECT_LT(testutil::rel_err(Json::parse(r.out)["bound"]["total"].get<double>(),
                                want[k]),
              1e-12);
  }
}

TEST_F(Cli, BoundFromJsonInputs) {
  const CliResult flags = run("bound --regime thm2 --B 2 --C 1 --delta 0.05 --n-tr 100 "
                        "--n-te 100 --C2 1 --theta 2");
  const auto p = write("in.json",
                       R"({"regime":"thm2","B":2,"C":1,"delta":0.05,"n_tr":100,)"
                       R"("n_te":100,"C2":1,"theta":2})");
  const CliResult file = run("bound --inputs " + p.string());
  ASSERT_EQ(file.code, 0) << file.err;
  EXPECT_EQ(flags.out, file.out);
  EXPECT_EQ(run("bound --inputs " + p.string() + " --regime thm1").code, 2);
  const auto bad = write("bad.json", R"({"regime":"thm2","B":2})");
  EXPECT_EQ(run("bound --inputs " + bad.string()).code, 2);
}

TEST_F(Cli, ExperimentDeterministicAndGolden) {
  const std::string args =
      "experiment --scenario S1 --estimator kmm,plugin --n-grid 100,200 --reps 3 "
      "--n-te 400 --seed 11 --threads 1 --timing off --out ";
  ASSERT_EQ(run(args + path("a")).code, 0);
  ASSERT_EQ(run(args + path("b")).code, 0);
  for (const char* f : {"trials.csv", "medians.csv", "rates.json"}) {
    EXPECT_EQ(slurp(path("a") + "/" + f), slurp(path("b") + "/" + f)) << f;
    EXPECT_EQ(slurp(path("a") + "/" + f),
              slurp(fs::path(SHIFTWEIGH_GOLDEN_DIR) / "experiment_s1" / f))
        << f;
  }
  const Json rates = Json::parse(slurp(path("a") + "/rates.json"));
  EXPECT_TRUE(rates["fits"]["kmm"]["slope"].is_number());
  const std::string trials = slurp(path("a") + "/trials.csv");
  EXPECT_EQ(trials.rfind("scenario,estimator,n_tr,n_te,seed,abs_error,lhat,runtime_ms\n", 0),
            0u);
}

TEST_F(Cli, ExperimentThreadsDoNotChangeResults) {
  const std::string args =
      "experiment --scenario S3 --estimator kde --n-grid 50,100 --reps 4 "
      "--n-te 200 --seed 3 --timing off --out ";
  ASSERT_EQ(run(args + path("a") + " --threads 1").code, 0);
  ASSERT_EQ(run(args + path("b") + " --threads 3").code, 0);
  EXPECT_EQ(slurp(path("a") + "/trials.csv"), slurp(path("b") + "/trials.csv"));
}

TEST_F(Cli, ExperimentCoverage) {
  const CliResult r = run("experiment --scenario S1 --n-grid 100,200 --reps 2 --n-te 300 "
                    "--coverage --coverage-n 200 --coverage-reps 5 --delta 0.5 "
                    "--out " + path("c"));
  ASSERT_EQ(r.code, 0) << r.err;
  const Json c = Json::parse(slurp(path("c") + "/coverage.json"));
  EXPECT_EQ(c["reps"], 5);
  EXPECT_EQ(c["bound"]["name"], "thm1");
  EXPECT_EQ(run("experiment --scenario S2 --n-grid 100,200 --reps 2 --coverage "
                "--coverage-reps 2 --out " + path("d")).code, 2);
}

TEST_F(Cli, ExperimentValidation) {
  EXPECT_EQ(run("experiment --scenario S1 --reps 0 --out " + path("x")).code, 2);
  const CliResult r = run("experiment --scenario S7 --out " + path("x"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(error_json(r)["message"].get<std::string>().find("S0 S1 S2 S3"),
            std::string::npos);
  EXPECT_EQ(run("experiment --scenario S1 --n-grid 200,100 --out " + path("x")).code, 2);
  EXPECT_EQ(run("experiment --scenario S1 --n-grid 1,x --out " + path("x")).code, 2);
}

TEST_F(Cli, RankSingleAndTied) {
  std::string tr = "x0\n", te = "x0\n", one = "loss\n", two = "first,second\n";
  for (int i = 0; i < 30; ++i) {
    const double z = (i % 3 == 0) ? 1.0 : 0.0;
    tr += std::to_string(i / 30.0) + "\n";
    te += std::to_string(0.2 + i / 40.0) + "\n";
    one += std::to_string(z) + "\n";
    two += std::to_string(z) + "," + std::to_string(z) + "\n";
  }
  const std::string io = " --train " + write("tr.csv", tr).string() + " --test " +
                         write("te.csv", te).string() + " --kernel " + kKernel +
                         " --B 3 --losses ";
  const CliResult a = run("rank" + io + write("one.csv", one).string());
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(Json::parse(a.out)["ranking"].size(), 1u);
  const CliResult b = run("rank" + io + write("two.csv", two).string());
  ASSERT_EQ(b.code, 0) << b.err;
  const Json j = Json::parse(b.out);
  EXPECT_EQ(j["ranking"][0]["name"], "first");
  EXPECT_EQ(j["ranking"][1]["name"], "second");
  EXPECT_EQ(j["ranking"][0]["estimate"], j["ranking"][1]["estimate"]);
  EXPECT_TRUE(j["ranking"][0]["weights_shared"].get<bool>());
}

TEST_F(Cli, RankRowMismatch) {
  const CliResult r = run("rank --train " + write("tr.csv", "x0\n0.1\n0.2\n").string() +
                    " --test " + write("te.csv", "x0\n0.3\n").string() +
                    " --losses " + write("l.csv", "l\n1\n").string() +
                    " --kernel " + kKernel + " --B 2");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(error_json(r)["message"].get<std::string>().find("rows"), std::string::npos);
}

TEST_F(Cli, RankSyntheticShiftOrder) {
  ASSERT_EQ(run("export --scenario S1 --n-tr 2000 --n-te 2000 --seed 7 --out " +
                path("ex")).code, 0);
  const CliResult r = run("rank --train " + path("ex/train.csv") + " --test " +
                    path("ex/test.csv") + " --losses " + path("ex/losses.csv") +
                    " --kernel " + kKernel + " --B 1501.4527021573146");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json truth = Json::parse(slurp(path("ex/truth.json")));
  EXPECT_GT(truth["true_risks"]["loss_a"].get<double>(),
            truth["true_risks"]["loss_b"].get<double>());
  EXPECT_EQ(Json::parse(r.out)["ranking"][0]["name"], "loss_b");
}

TEST_F(Cli, ExportIsDeterministic) {
  ASSERT_EQ(run("export --scenario S3 --n-tr 20 --n-te 30 --seed 4 --out " + path("a")).code, 0);
  ASSERT_EQ(run("export --scenario S3 --n-tr 20 --n-te 30 --seed 4 --out " + path("b")).code, 0);
  for (const char* f : {"train.csv", "test.csv", "losses.csv", "truth.json"}) {
    EXPECT_EQ(slurp(path("a") + "/" + f), slurp(path("b") + "/" + f)) << f;
  }
  EXPECT_EQ(slurp(path("a") + "/train.csv").rfind("x0,x1,y,beta_true\n", 0), 0u);
}

TEST_F(Cli, KernelFromFileAndBadKernel) {
  const auto k = write("k.json", R"({"family":"inverse_multiquadric","c":1,"alpha":0.5})");
  const auto x = write("x.csv", "x0\n0.1\n0.5\n0.9\n");
  const std::string io = "weights --train " + x.string() + " --test " + x.string() +
                         " --B 2 --out " + path("w.csv") + " --kernel ";
  EXPECT_EQ(run(io + k.string()).code, 0);
  EXPECT_EQ(run(io + "'{\"family\":\"gaussian\"}'").code, 2);
  EXPECT_EQ(run(io + "'{\"family\":\"gaussian\",\"sigma\":1,\"extra\":2}'").code, 2);
  EXPECT_EQ(run(io + "'{\"family\":\"rbf\",\"sigma\":1}'").code, 2);
  EXPECT_EQ(run(io + path("missing.json")).code, 2);
}

}  // namespace
