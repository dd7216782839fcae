#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace galmod::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("galmod_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, SynthDecomposeVerifyPipeline) {
  const Result s = invoke({"synth", "--p", "3", "--n", "2", "--m", "1", "--e", "1,2,1", "--seed",
                           "7", "--out", path("d.json")});
  ASSERT_EQ(s.code, kOk) << s.err;
  ASSERT_TRUE(fs::exists(path("d.sidecar.json")));

  const Result d = invoke({"decompose", "--in", path("d.json"), "--out", path("dec.json"),
                           "--sidecar", path("d.sidecar.json")});
  ASSERT_EQ(d.code, kOk) << d.err;
  EXPECT_NE(d.out.find("sidecar  match"), std::string::npos);
  EXPECT_NE(d.out.find("m        1"), std::string::npos);

  const Result v = invoke({"verify", "--in", path("d.json"), "--dec", path("dec.json")});
  EXPECT_EQ(v.code, kOk) << v.out;
  EXPECT_NE(v.out.find("all clauses pass"), std::string::npos);

  const Result i = invoke({"invariants", "--in", path("d.json"), "--seed", "3"});
  EXPECT_EQ(i.code, kOk) << i.out;
}

TEST_F(Cli, OutputsAreByteIdenticalAcrossRuns) {
  for (const char* name : {"a.json", "b.json"}) {
    ASSERT_EQ(invoke({"synth", "--p", "5", "--n", "1", "--m=-inf", "--e", "1,2", "--seed", "11",
                      "--out", path(name)})
                  .code,
              kOk);
  }
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(slurp(path("a.sidecar.json")), slurp(path("b.sidecar.json")));

  const Result x = invoke({"decompose", "--in", path("a.json"), "--format", "json"});
  const Result y = invoke({"decompose", "--in", path("a.json"), "--format", "json"});
  ASSERT_EQ(x.code, kOk);
  EXPECT_EQ(x.out, y.out);
}

TEST_F(Cli, MutatedDecompositionFailsVerification) {
  ASSERT_EQ(invoke({"synth", "--p", "3", "--n", "1", "--m", "0", "--e", "1,1", "--out", path("d.json")})
                .code,
            kOk);
  ASSERT_EQ(invoke({"decompose", "--in", path("d.json"), "--out", path("dec.json")}).code, kOk);
  Json dec = Json::parse(slurp(path("dec.json")));
  dec["m"] = "-inf";
  spit(path("bad.json"), dec.dump());
  const Result v = invoke({"verify", "--in", path("d.json"), "--dec", path("bad.json")});
  EXPECT_EQ(v.code, kVerifyFailed);
  EXPECT_NE(v.out.find("FAIL "), std::string::npos);
  EXPECT_NE(v.out.find("failed: "), std::string::npos);
}

TEST_F(Cli, SidecarMismatchExitsOne) {
  ASSERT_EQ(invoke({"synth", "--p", "3", "--n", "1", "--m", "0", "--e", "1,1", "--out", path("a.json")})
                .code,
            kOk);
  ASSERT_EQ(invoke({"synth", "--p", "3", "--n", "1", "--m=-inf", "--e", "1,1", "--out", path("b.json")})
                .code,
            kOk);
  const Result d = invoke({"decompose", "--in", path("a.json"), "--sidecar", path("b.sidecar.json")});
  EXPECT_EQ(d.code, kVerifyFailed);
  EXPECT_NE(d.out.find("MISMATCH"), std::string::npos);
}

TEST_F(Cli, InvalidInputsExitTwo) {
  EXPECT_EQ(invoke({"synth", "--p", "3", "--n", "1", "--m", "7", "--e", "1,1"}).code, kInvalidInput);
  EXPECT_EQ(invoke({"synth", "--p", "4", "--n", "1", "--e", "1,1"}).code, kInvalidInput);
  EXPECT_EQ(invoke({"synth", "--p", "3", "--n", "1", "--m", "bogus", "--e", "1,1"}).code,
            kInvalidInput);
  EXPECT_EQ(invoke({"decompose"}).code, kInvalidInput);
  EXPECT_EQ(invoke({"frobnicate"}).code, kInvalidInput);
  EXPECT_EQ(invoke({"decompose", "--in", path("missing.json")}).code, kInvalidInput);

  spit(path("broken.json"), "{\"p\": 3, ");
  const Result r = invoke({"decompose", "--in", path("broken.json")});
  EXPECT_EQ(r.code, kInvalidInput);
  EXPECT_NE(r.err.find("byte"), std::string::npos);

  EXPECT_EQ(invoke({"local", "--p", "2", "--kind", "unramified", "--n", "1", "--precision", "20"}).code,
            kInvalidInput);
  EXPECT_EQ(invoke({"local", "--p", "3", "--kind", "cyclotomic", "--n", "1", "--precision", "5"}).code,
            kInvalidInput);
}

TEST_F(Cli, HelpExitsZero) {
  const Result r = invoke({"--help"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("decompose"), std::string::npos);
}

TEST_F(Cli, LocalTowerDecomposes) {
  const Result l = invoke({"local", "--p", "3", "--kind", "cyclotomic", "--n", "1", "--precision",
                           "60", "--out", path("t.json")});
  ASSERT_EQ(l.code, kOk) << l.err;
  const Result d = invoke({"decompose", "--in", path("t.json")});
  ASSERT_EQ(d.code, kOk) << d.err;
  EXPECT_NE(d.out.find("m        -inf"), std::string::npos) << d.out;
  EXPECT_NE(d.out.find("blocks   {3, 3, 1, 1}"), std::string::npos) << d.out;
}

TEST_F(Cli, JordanOnRawModule) {
  spit(path("m.json"), R"({"p": 2, "n": 1, "sigma": [[1, 1], [0, 1]]})");
  const Result r = invoke({"jordan", "--in", path("m.json")});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out, "{2}\n");

  spit(path("bad.json"), R"({"p": 2, "n": 1, "sigma": [[1, 1, 0], [0, 1, 1], [0, 0, 1]]})");
  EXPECT_EQ(invoke({"jordan", "--in", path("bad.json")}).code, kInvalidInput);
}

}  // namespace
}  // namespace galmod::cli
