// Copyright 2026 The ropelength Authors.
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

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "ropelength/cli.hpp"
#include "support.hpp"

namespace rl = ropelength;
namespace io = ropelength::io;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ropelength_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string &name) const { return (dir_ / name).string(); }

  struct Run {
    int code;
    std::string out, err;
    io::json report() const { return io::parse_json(out); }
  };
  static Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = rl::cli::run_command(args, out, err);
    return {code, out.str(), err.str()};
  }
  std::string fixture(const std::string &kind, std::vector<std::string> extra = {}) {
    const std::string p = path(kind + ".json");
    std::vector<std::string> args{"-o", p, "generate", kind};
    args.insert(args.end(), extra.begin(), extra.end());
    const Run r = run(args);
    EXPECT_EQ(r.code, 0) << r.err;
    return p;
  }

  fs::path dir_;
};

io::FixtureParams params(std::initializer_list<std::pair<const std::string, double>> s) {
  io::FixtureParams p;
  p.scalars = s;
  return p;
}

}  // namespace

TEST(Numbers, NonFiniteTravelAsStrings) {
  EXPECT_EQ(io::number(rl::kInf).get<std::string>(), "inf");
  EXPECT_EQ(io::to_number(io::number(-rl::kInf), "x"), -rl::kInf);
  EXPECT_THROW(io::to_number(io::json("abc"), "x"), io::ParseError);
}

TEST(CurveDocument, RoundTripIsByteIdempotent) {
  for (const auto &kind : io::fixture_kinds()) {
    io::FixtureParams p = params({{"n", 64}});
    if (kind == "clc")
      p.vectors = {{"p", rl::testing::vec({0, 0})}, {"q", rl::testing::vec({5, 1})},
                   {"v", rl::testing::vec({0, 1})}, {"w", rl::testing::vec({1, 0})}};
    const std::string first = io::write_curve_document(io::generate_fixture(kind, p));
    const io::CurveDocument back = io::curve_document_from_json(io::parse_json(first));
    EXPECT_EQ(io::write_curve_document(back), first) << kind;
    // Every coordinate survives the text round trip exactly.
    const io::CurveDocument orig = io::generate_fixture(kind, p);
    EXPECT_EQ(back.points, orig.points) << kind;
  }
}

TEST(CurveDocument, SeventeenDigitDecimalsRoundTrip) {
  const std::string text =
      "{\"dim\": 2, \"closed\": false, \"points\": [[0.10000000000000001, 2.3456789012345678], "
      "[1.0000000000000002, -3.1415926535897931]]}";
  const io::CurveDocument d = io::curve_document_from_json(io::parse_json(text));
  const io::CurveDocument again = io::curve_document_from_json(io::parse_json(io::write_curve_document(d)));
  EXPECT_EQ(d.points, again.points);
  EXPECT_EQ(d.points(1, 1), -3.1415926535897931);
}

TEST(CurveDocument, MalformedInputNamesLineOrField) {
  try {
    io::parse_json("{\n  \"dim\": 2,\n  \"closed\": true\n  \"points\": []\n}");
    FAIL();
  } catch (const io::ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
  try {
    io::curve_document_from_json(io::parse_json("{\"dim\": 2, \"closed\": true, \"points\": [[0, 0], [1]]}"));
    FAIL();
  } catch (const io::ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("points[1]"), std::string::npos) << e.what();
  }
  EXPECT_THROW(io::curve_document_from_json(io::parse_json("{\"dim\": 2, \"points\": []}")), io::ParseError);
}

TEST(CurveDocument, CsvWithHeader) {
  const io::CurveDocument d = io::curve_document_from_csv("x,y\n0,0\n1,0\n1,1\n", true);
  EXPECT_EQ(d.dim, 2);
  EXPECT_EQ(d.points.cols(), 3);
  EXPECT_DOUBLE_EQ(d.to_curve().length(), 2.0 + std::sqrt(2.0));
  try {
    io::curve_document_from_csv("0,0\n1,0\n1,x\n", true);
    FAIL();
  } catch (const io::ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Fixtures, CirclePerimeter) {
  const rl::Curve c = io::generate_fixture("circle", params({{"r", 1}, {"n", 1024}})).to_curve();
  const double x = rl::kPi / 1024;
  EXPECT_NEAR(c.length(), 2 * rl::kPi * std::sin(x) / x, 1e-12);
  EXPECT_NEAR(c.length(), 2 * rl::kPi, 1e-4);
}

TEST(Fixtures, StadiumLength) {
  const rl::Curve c = io::generate_fixture("stadium", params({{"r", 1}, {"length", 4}, {"n", 2048}})).to_curve();
  EXPECT_NEAR(c.length(), 2 * rl::kPi + 8, 1e-3);
}

TEST(Fixtures, OffsetCircleArcLiesOutsideUnitDisc) {
  const io::CurveDocument d = io::generate_fixture("example1_offset_circle", params({{"eps", 0.05}, {"n", 500}}));
  EXPECT_FALSE(d.closed);
  const rl::Curve c = d.to_curve();
  EXPECT_NEAR(c.point(0).norm(), 1.0, 1e-12);
  EXPECT_NEAR(c.point(c.size() - 1).norm(), 1.0, 1e-12);
  for (std::size_t i = 1; i + 1 < c.size(); ++i) {
    EXPECT_GT(c.point(i).norm(), 1.0);
    EXPECT_NEAR((c.point(i) - rl::testing::vec({0.05, 0})).norm(), 1.0, 1e-12);
  }
}

TEST(Fixtures, TorusKnotIsSpatialAndClosed) {
  const io::CurveDocument d = io::generate_fixture("torus_knot_sample", params({{"n", 200}}));
  EXPECT_EQ(d.dim, 3);
  EXPECT_TRUE(d.closed);
  EXPECT_TRUE(d.tangents.has_value());
}

TEST(Fixtures, Errors) {
  EXPECT_THROW(io::generate_fixture("trefoil", {}), rl::InvalidInput);
  EXPECT_THROW(io::generate_fixture("circle", params({{"radius", 2}})), rl::InvalidInput);
  EXPECT_THROW(io::generate_fixture("circle", params({{"r", -1}})), rl::InvalidInput);
  EXPECT_THROW(io::generate_fixture("clc", {}), rl::InvalidInput);
}

TEST(Boundary, JsonRoundTrip) {
  const rl::BoundaryData b{rl::testing::vec({0, 1}), rl::testing::vec({2, 3}), rl::testing::vec({1, 0}),
                           rl::testing::vec({0, -1}), 0.5};
  const rl::BoundaryData c = io::boundary_from_json(io::to_json(b));
  EXPECT_EQ(c.p, b.p);
  EXPECT_EQ(c.w, b.w);
  EXPECT_EQ(c.lambda, b.lambda);
}

TEST_F(TempDir, ThicknessOfCircle) {
  const std::string c = fixture("circle");
  const Run r = run({"thickness", c});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::json rep = r.report();
  for (const char *key : {"tool_version", "command", "inputs", "seed", "results", "witnesses", "tolerances"})
    EXPECT_TRUE(rep.contains(key)) << key;
  EXPECT_EQ(rep["command"], "thickness");
  EXPECT_EQ(rep["seed"], 0);
  EXPECT_NEAR(rep["results"]["thickness"].get<double>(), 1.0, 1e-2);
}

TEST_F(TempDir, ReportsAreDeterministicAcrossRunsAndThreads) {
  const std::string c = fixture("torus_knot_sample", {"--n", "300"});
  const Run a = run({"thickness", c}), b = run({"--threads", "3", "thickness", c});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const std::string bumped = fixture("bumped_circle", {"--n", "128"});
  const Run r1 = run({"--seed", "5", "relax", bumped, "--cap", "1.5", "--steps", "50"});
  const Run r2 = run({"--seed", "5", "relax", bumped, "--cap", "1.5", "--steps", "50"});
  ASSERT_EQ(r1.code, 0) << r1.err;
  EXPECT_EQ(r1.out, r2.out);
  EXPECT_EQ(r1.report()["seed"], 5);
}

TEST_F(TempDir, GenerateWriteReadWriteIsIdempotent) {
  const std::string a = fixture("ellipse", {"--n", "100"});
  const std::string once = io::read_file(a);
  const std::string again = io::write_curve_document(io::read_curve_document(a));
  EXPECT_EQ(once, again);
}

TEST_F(TempDir, VerdictFailureExitsWithTwo) {
  const std::string sq = fixture("rounded_square", {"--n", "512"});
  const Run r = run({"check-thm3", sq});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.report()["results"]["triggered"].get<bool>());
  const std::string st = fixture("stadium", {"--n", "512"});
  EXPECT_EQ(run({"check-thm2", st}).code, 0);
}

TEST_F(TempDir, ClcPlanOnStraightData) {
  const std::string out = path("path.json");
  const Run r = run({"clc-plan", "--p", "0,0", "--q", "10,0", "--v", "1,0", "--w", "1,0", "--lambda", "1",
                     "--curve-out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::json rep = r.report();
  EXPECT_EQ(rep["results"]["regime"], "clc");
  EXPECT_NEAR(rep["results"]["best_length"].get<double>(), 10.0, 1e-12);
  const rl::Curve path = io::read_curve_document(out).to_curve();
  EXPECT_NEAR(path.length(), 10.0, 1e-9);
  EXPECT_EQ(run({"clc-verify", out, "--lambda", "1"}).code, 0);
}

TEST_F(TempDir, InputErrorsExitWithOne) {
  const std::string bad = path("bad.json");
  io::write_file(bad, "{\n  \"dim\": 2,\n  \"closed\": true,\n  \"points\": [[0, 0], [1, 0], [1, oops]]\n}\n");
  const Run r = run({"thickness", bad});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
  EXPECT_EQ(run({"thickness", path("missing.json")}).code, 1);
  EXPECT_EQ(run({"nonsense"}).code, 1);
  EXPECT_EQ(run({"clc-plan", "--p", "0,0", "--q", "1,0", "--v", "2,0", "--w", "1,0"}).code, 1);
  EXPECT_EQ(run({"generate", "circle", "--param", "radius=2"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(TempDir, CsvExports) {
  const std::string c = fixture("circle", {"--n", "64"});
  const std::string csv = path("profile.csv");
  ASSERT_EQ(run({"thickness", c, "--csv", csv}).code, 0);
  const std::string text = io::read_file(csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "index,s,kappa,f_g");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 65);

  const std::string b = fixture("bumped_circle", {"--n", "128"});
  const std::string trace = path("trace.csv");
  ASSERT_EQ(run({"relax", b, "--cap", "1.5", "--steps", "20", "--csv", trace}).code, 0);
  const std::string t = io::read_file(trace);
  EXPECT_EQ(t.substr(0, t.find('\n')), "step,length,r_o,ropelength");
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 22);
}

TEST_F(TempDir, EverySubcommandRuns) {
  const std::string st = fixture("stadium", {"--n", "256"});
  const std::string arc = fixture("example1_offset_circle", {"--n", "200"});
  const std::string c1 = fixture("circle", {"--n", "128", "--param", "r=1.5"});
  const std::string c2 = fixture("circle", {"--n", "128"});
  const std::vector<std::vector<std::string>> cmds = {
      {"curvature", st, "--lambda", "1.05"},
      {"mdc", st},
      {"classify", st},
      {"decompose", st},
      {"oracle", "--p", "0,0", "--q", "0,3", "--v", "1,0", "--w", "0,1", "--one-sided", "--segments", "32"},
      {"clc-verify", arc, "--lambda", "1"},
      {"semicontinuity", c1, c2, "--tol", "0.6"},
  };
  for (const auto &cmd : cmds) {
    const Run r = run(cmd);
    EXPECT_EQ(r.code, 0) << cmd.front() << ": " << r.err << r.out.substr(0, 400);
    EXPECT_EQ(r.report()["command"], cmd.front());
  }
}
