// Copyright 2026 The Spikesound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "spikesound_cli_test";

int RunCli(const std::string& args, std::string* err = nullptr) {
  const fs::path err_file = kScratch / "stderr.txt";
  fs::create_directories(kScratch);
  const std::string cmd = std::string(SPIKESOUND_CLI) + " " + args + " > " +
                          (kScratch / "stdout.txt").string() + " 2> " + err_file.string();
  const int status = std::system(cmd.c_str());
  if (err) {
    std::ifstream is(err_file);
    std::stringstream ss;
    ss << is.rdbuf();
    *err = ss.str();
  }
  return WEXITSTATUS(status);
}

std::string Slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string Out(const std::string& name) { return (kScratch / name).string(); }

TEST(Cli, ExitCodes) {
  EXPECT_EQ(RunCli("--help"), 0);
  EXPECT_EQ(RunCli("train --help"), 0);
  EXPECT_EQ(RunCli(""), 1);
  EXPECT_EQ(RunCli("frobnicate"), 1);
  EXPECT_EQ(RunCli("sts-check --no-such-flag 1 --out " + Out("x")), 1);
  EXPECT_EQ(RunCli("sts-check --cases notanumber --out " + Out("x")), 1);
  EXPECT_EQ(RunCli("train --rule hebb --out " + Out("x")), 1);
  std::string err;
  EXPECT_EQ(RunCli("encode --input /nonexistent/clip.wav --out " + Out("x"), &err), 2);
  EXPECT_NE(err.find("/nonexistent/clip.wav"), std::string::npos) << err;
  EXPECT_EQ(RunCli("train --corpus /nonexistent/corpus --out " + Out("x"), &err), 2);
  EXPECT_NE(err.find("/nonexistent/corpus"), std::string::npos) << err;
  EXPECT_EQ(RunCli("eval --model /nonexistent/m.spkmodel --classes 2 --files 2 --out " + Out("x"),
                &err),
            2);
  EXPECT_NE(err.find("/nonexistent/m.spkmodel"), std::string::npos) << err;
}

TEST(Cli, ConfigFileThenFlags) {
  const fs::path cfg = kScratch / "sts.cfg";
  fs::create_directories(kScratch);
  std::ofstream(cfg) << "# audit\ncases = 3\nk-max = 4\n";
  ASSERT_EQ(RunCli("sts-check --config " + cfg.string() + " --out " + Out("cfg1")), 0);
  const std::string echoed = Slurp(kScratch / "cfg1" / "config.txt");
  EXPECT_NE(echoed.find("cases = 3\n"), std::string::npos) << echoed;
  EXPECT_NE(echoed.find("k-max = 4\n"), std::string::npos);
  EXPECT_NE(echoed.find("grad-k-max = 5\n"), std::string::npos);

  ASSERT_EQ(RunCli("sts-check --config " + cfg.string() + " --cases 2 --out " + Out("cfg2")), 0);
  EXPECT_NE(Slurp(kScratch / "cfg2" / "config.txt").find("cases = 2\n"), std::string::npos);
  const std::string csv = Slurp(kScratch / "cfg2" / "sts_check.csv");
  EXPECT_EQ(csv.find("\n2,"), std::string::npos);  // no third case
  EXPECT_NE(csv.find("\n1,"), std::string::npos);

  std::ofstream(cfg) << "bogus = 1\n";
  EXPECT_EQ(RunCli("sts-check --config " + cfg.string() + " --out " + Out("cfg3")), 1);
  EXPECT_EQ(RunCli("sts-check --config /nonexistent/c.cfg --out " + Out("cfg3")), 2);
}

TEST(Cli, EchoedConfigReproducesTheRun) {
  const std::string common = " --classes 3 --files 4 --max-epochs 3 --runs 1 --conditions clean,0";
  ASSERT_EQ(RunCli("eval" + common + " --out " + Out("echo1")), 0);
  ASSERT_EQ(RunCli("eval --config " + Out("echo1") + "/config.txt --out " + Out("echo2")), 0);
  EXPECT_EQ(Slurp(kScratch / "echo1" / "accuracy.csv"),
            Slurp(kScratch / "echo2" / "accuracy.csv"));
}

TEST(Cli, TrainEvalIsByteIdenticalAcrossReruns) {
  ASSERT_EQ(RunCli("gen-corpus --classes 3 --files 4 --noise-seconds 3 --out " + Out("corpus")), 0);
  const std::string data = " --corpus " + Out("corpus") + " --noise " + Out("corpus") +
                           "/babble.wav --max-epochs 5 --seed 3";
  for (const char* dir : {"run1", "run2"}) {
    ASSERT_EQ(RunCli("train" + data + " --out " + Out(dir)), 0);
    ASSERT_EQ(RunCli("eval" + data + " --model " + Out(dir) + "/model.spkmodel --out " + Out(dir)),
              0);
  }
  for (const char* f : {"model.spkmodel", "split.csv", "accuracy.csv", "summary.csv",
                        "confusion_clean.csv", "confusion_-5.csv"}) {
    const std::string a = Slurp(kScratch / "run1" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, Slurp(kScratch / "run2" / f)) << f;
  }
}

TEST(Cli, EncodeSingleFile) {
  ASSERT_EQ(RunCli("gen-corpus --classes 2 --files 1 --noise-seconds 0 --out " + Out("enc")), 0);
  ASSERT_EQ(RunCli("encode --input " + Out("enc") + "/ring/ring_0.wav --out " + Out("enc_out")),
            0);
  const std::string pat = Slurp(kScratch / "enc_out" / "ring_0.spkpat");
  EXPECT_EQ(pat.rfind("SPKPAT v1 129 ", 0), 0u);
  EXPECT_FALSE(Slurp(kScratch / "enc_out" / "ring_0_keypoints.csv").empty());
}

}  // namespace
