#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "modbpdn/bounds.hpp"
#include "modbpdn/model.hpp"

namespace fs = std::filesystem;

namespace modbpdn {
namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run_cli(const std::string& args) {
  const std::string cmd = std::string(MODBPDN_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  char buf[4096];
  while (const std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) o.out.append(buf, n);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("modbpdn_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Writes A (with a header row), y and 1-based index files for a fixed
  // instance and returns the matrix for reference computations.
  SensingMatrix write_instance(Index n, Index m, const IndexSet& known, const IndexSet& unknown) {
    Rng rng(77);
    SensingMatrix a = generate_sensing_matrix(n, m, rng);
    VectorXd x = VectorXd::Zero(m);
    for (Index i : known) x(i) = 10.0 + static_cast<double>(i);
    for (Index i : unknown) x(i) = -5.0 - static_cast<double>(i);
    y_ = a.entries() * x;
    for (Index i = 0; i < n; ++i) y_(i) += 1e-3 * std::sin(static_cast<double>(i));
    std::ofstream fa(dir_ / "A.csv");
    fa.precision(17);
    for (Index j = 0; j < m; ++j) fa << (j ? "," : "") << "c" << j;
    fa << '\n';
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < m; ++j) fa << (j ? "," : "") << a.entries()(i, j);
      fa << '\n';
    }
    std::ofstream fy(dir_ / "y.csv");
    fy.precision(17);
    for (Index i = 0; i < n; ++i) fy << y_(i) << '\n';
    std::ofstream ft(dir_ / "T.csv");
    for (Index i : known) ft << i + 1 << '\n';
    std::ofstream fd(dir_ / "D.csv");
    for (Index i : unknown) fd << i + 1 << ',';
    return a;
  }

  std::string paths() const {
    return "--matrix " + (dir_ / "A.csv").string() + " --y " + (dir_ / "y.csv").string() +
           " --support " + (dir_ / "T.csv").string() + " --delta " + (dir_ / "D.csv").string();
  }

  fs::path dir_;
  VectorXd y_;
};

TEST_F(CliTest, CheckReportsGammaStar) {
  const IndexSet known{1, 4, 9}, unknown{6};
  const SensingMatrix a = write_instance(30, 40, known, unknown);
  const Outcome o = run_cli("check " + paths());
  ASSERT_EQ(o.code, 0) << o.out;
  auto kv = key_values(o.out);
  EXPECT_EQ(kv["sizeT"], "3");
  EXPECT_EQ(kv["sizeDelta"], "1");
  EXPECT_EQ(kv["applicable"], "1");
  const auto part = SupportPartition::from_known(40, known, unknown);
  EXPECT_NEAR(std::stod(kv["gammaStar"]), gamma_star(a, y_, part), 1e-9);
  EXPECT_NEAR(std::stod(kv["linfBound"]),
              linf_bound(a, known, unknown, std::stod(kv["gammaStar"])), 1e-9);
}

TEST_F(CliTest, CheckWithGammaReportsCondition) {
  write_instance(30, 40, {1, 4, 9}, {6});
  const Outcome base = run_cli("check " + paths());
  const double gs = std::stod(key_values(base.out)["gammaStar"]);
  const Outcome above = run_cli("check " + paths() + " --gamma " + std::to_string(2 * gs));
  EXPECT_EQ(key_values(above.out)["globalCondition"], "1");
  const Outcome below = run_cli("check " + paths() + " --gamma " + std::to_string(gs / 2));
  EXPECT_EQ(key_values(below.out)["globalCondition"], "0");
}

TEST_F(CliTest, CheckNotApplicableExitsTwo) {
  IndexSet unknown;
  for (Index i = 0; i < 12; ++i) unknown.push_back(i);
  write_instance(14, 60, {}, unknown);
  const Outcome o = run_cli("check " + paths());
  EXPECT_EQ(o.code, 2);
  EXPECT_EQ(key_values(o.out)["applicable"], "0");
}

TEST_F(CliTest, CheckBadInputExitsOne) {
  write_instance(10, 12, {1}, {2});
  std::ofstream(dir_ / "T.csv") << "13\n";  // out of range
  EXPECT_EQ(run_cli("check " + paths()).code, 1);
  EXPECT_EQ(run_cli("check --matrix " + (dir_ / "missing.csv").string() + " --y x").code, 1);
  EXPECT_EQ(run_cli("frobnicate").code, 1);
}

TEST_F(CliTest, RunWritesOutputs) {
  const fs::path out = dir_ / "res" / "sweep";
  const Outcome o = run_cli("run --m 128 --support-size 6 --n 0.375,64 --delta 0,2 --trials 3 "
                            "--seed 5 --out " + out.string());
  ASSERT_EQ(o.code, 0) << o.out;
  EXPECT_TRUE(fs::exists(out.string() + ".trials.csv"));
  EXPECT_TRUE(fs::exists(out.string() + ".summary.csv"));
  EXPECT_TRUE(fs::exists(out.string() + ".n48.dat"));
  EXPECT_TRUE(fs::exists(out.string() + ".n64.dat"));
}

TEST_F(CliTest, RunNothingApplicableExitsTwo) {
  const Outcome o = run_cli("run --m 256 --support-size 40 --n 60 --delta 40 --trials 2 "
                            "--bounds-only --out " + (dir_ / "na").string());
  EXPECT_EQ(o.code, 2);
}

TEST_F(CliTest, RunRejectsBadArguments) {
  EXPECT_EQ(run_cli("run --m 64 --support-size 6 --n 64 --out " + (dir_ / "x").string()).code, 1);
  EXPECT_EQ(run_cli("run --trials abc --out " + (dir_ / "x").string()).code, 1);
  std::ofstream(dir_ / "blocker") << "x";
  EXPECT_EQ(run_cli("run --m 64 --support-size 4 --n 32 --delta 1 --trials 1 --out " +
                    (dir_ / "blocker" / "out").string())
                .code,
            1);
}

TEST_F(CliTest, ConfigFileSuppliesDefaultsAndFlagsOverride) {
  const fs::path cfg = dir_ / "run.cfg";
  std::ofstream(cfg) << "# sweep\nm = 128\nsupport-size = 6\nn = 48\ndelta = 0,2\n"
                     << "trials = 2\nseed = 9\nout = " << (dir_ / "fromcfg").string() << "\n";
  Outcome o = run_cli("run --config " + cfg.string());
  ASSERT_EQ(o.code, 0) << o.out;
  EXPECT_TRUE(fs::exists(dir_ / "fromcfg.n48.dat"));

  o = run_cli("run --config " + cfg.string() + " --n 64 --out " + (dir_ / "override").string());
  ASSERT_EQ(o.code, 0) << o.out;
  EXPECT_TRUE(fs::exists(dir_ / "override.n64.dat"));
  EXPECT_FALSE(fs::exists(dir_ / "override.n48.dat"));

  std::ofstream(dir_ / "bad.cfg") << "nonsense = 1\n";
  EXPECT_EQ(run_cli("run --config " + (dir_ / "bad.cfg").string()).code, 1);
}

}  // namespace
}  // namespace modbpdn
