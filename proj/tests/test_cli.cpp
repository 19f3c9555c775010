#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "arx/csv.hpp"
#include "arx/model.hpp"
#include "cli.hpp"

namespace arx {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("arx_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name, std::ios::binary) << text;
    return path(name);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  static std::size_t line_count(const fs::path& p) {
    const auto text = slurp(p);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  }

  // ARX(2,2,1) driven by white noise, optional equation noise.
  std::string arx_scenario(double noise_std) const {
    std::ostringstream s;
    s << "system = arx\ndt = 0.1\narx.a = -1.5 0.7\narx.b = 1 0.5\narx.nk = 1\n"
      << "train.random_length = 800\nvalidate.random_length = 800\n"
      << "noise_std = " << noise_std << "\nseed = 5\n";
    return write("arx_scenario.txt", s.str());
  }

  int fit_arx(const std::string& data_dir, const std::string& out_dir,
              std::vector<std::string> extra = {}) {
    std::vector<std::string> args{"fit",        "--train",  data_dir + "/train.csv",
                                  "--validate", data_dir + "/validate.csv",
                                  "--dt",       "0.1",      "--ambient",
                                  "0",          "--out-dir", out_dir};
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(Cli, UnknownCommandAndHelp) {
  EXPECT_EQ(run({"bogus"}), cli::exit_usage);
  EXPECT_EQ(run({}), cli::exit_usage);
  EXPECT_EQ(run({"--help"}), cli::exit_ok);
}

TEST_F(Cli, GenIsDeterministic) {
  ASSERT_EQ(run({"gen", "--out-dir", path("a"), "--noise-fraction", "0.05"}), cli::exit_ok);
  ASSERT_EQ(run({"gen", "--out-dir", path("b"), "--noise-fraction", "0.05"}), cli::exit_ok);
  EXPECT_EQ(slurp(dir_ / "a/train.csv"), slurp(dir_ / "b/train.csv"));
  EXPECT_EQ(slurp(dir_ / "a/validate.csv"), slurp(dir_ / "b/validate.csv"));
  EXPECT_EQ(slurp(dir_ / "a/scenario.txt"), slurp(dir_ / "b/scenario.txt"));
  ASSERT_EQ(run({"gen", "--out-dir", path("c"), "--noise-fraction", "0.05", "--seed", "7"}),
            cli::exit_ok);
  EXPECT_NE(slurp(dir_ / "a/train.csv"), slurp(dir_ / "c/train.csv"));
  const auto table = read_csv(dir_ / "a/train.csv");
  EXPECT_EQ(table.header, (std::vector<std::string>{"t", "P", "T"}));
  EXPECT_EQ(table.rows(), 4600u);
}

TEST_F(Cli, GenConfigErrors) {
  EXPECT_EQ(run({"gen", "--out-dir", path("a"), "--noise-std", "-1"}), cli::exit_usage);
  const auto bad = write("bad.txt", "system = foster\ndt = 0.1\nstages = 0\n"
                                    "train.segments = 1:1\nvalidate.segments = 1:1\n");
  EXPECT_EQ(run({"gen", "--scenario", bad, "--out-dir", path("a")}), cli::exit_usage);
  EXPECT_NE(err_.str().find("stage"), std::string::npos);
  EXPECT_EQ(run({"gen", "--scenario", path("missing.txt")}), cli::exit_usage);
}

TEST_F(Cli, FitRecoversArxOrders) {
  const auto sc = arx_scenario(0.0);
  ASSERT_EQ(run({"gen", "--scenario", sc, "--out-dir", path("data")}), cli::exit_ok);
  ASSERT_EQ(fit_arx(path("data"), path("fit"), {"--na-max", "4", "--nb-max", "4", "--nk-max", "3"}),
            cli::exit_ok)
      << err_.str();
  EXPECT_NE(out_.str().find("selected na=2 nb0=2 nk0=1"), std::string::npos) << out_.str();
  const auto model = load_model(dir_ / "fit/model.arx");
  EXPECT_EQ(model.orders().to_string(), "na=2 nb0=2 nk0=1");
  EXPECT_NEAR(model.a()[0], -1.5, 1.5e-6);
  for (const char* f : {"model.arx", "candidates.csv", "fit_report.txt", "train_prediction.csv",
                        "validate_prediction.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "fit" / f)) << f;
  }
  const auto report = slurp(dir_ / "fit/fit_report.txt");
  EXPECT_NE(report.find("validation.fit_percent = 99.99"), std::string::npos) << report;
  EXPECT_NE(report.find("train_one_step.prediction_mode = one-step"), std::string::npos);
  EXPECT_EQ(line_count(dir_ / "fit/candidates.csv"), 1u + 64u);
}

TEST_F(Cli, FitWithFixedOrders) {
  const auto sc = arx_scenario(0.0);
  ASSERT_EQ(run({"gen", "--scenario", sc, "--out-dir", path("data")}), cli::exit_ok);
  ASSERT_EQ(fit_arx(path("data"), path("fit"), {"--na", "1", "--nb", "1", "--nk", "0"}),
            cli::exit_ok);
  EXPECT_EQ(line_count(dir_ / "fit/candidates.csv"), 2u);
  EXPECT_EQ(fit_arx(path("data"), path("fit"), {"--na", "1"}), cli::exit_usage);
  EXPECT_EQ(fit_arx(path("data"), path("fit"), {"--na", "1", "--nb", "1,2", "--nk", "0"}),
            cli::exit_usage);
}

TEST_F(Cli, FitUsageErrors) {
  const auto sc = arx_scenario(0.0);
  ASSERT_EQ(run({"gen", "--scenario", sc, "--out-dir", path("data")}), cli::exit_ok);
  EXPECT_EQ(run({"fit", "--train", path("data/train.csv"), "--dt", "0.1"}), cli::exit_usage);
  EXPECT_EQ(fit_arx(path("data"), path("fit"), {"--na-max", "0"}), cli::exit_usage);
  EXPECT_NE(err_.str().find("Na must be >= 1"), std::string::npos);
  EXPECT_EQ(fit_arx(path("data"), path("fit"), {"--criterion", "bic"}), cli::exit_usage);
  EXPECT_EQ(fit_arx(path("data"), path("fit"), {"--output", "Tj"}), cli::exit_data);
  EXPECT_NE(err_.str().find("output column Tj not found"), std::string::npos);
}

TEST_F(Cli, SimulateReplaysTrainingPrediction) {
  const auto sc = arx_scenario(0.05);
  ASSERT_EQ(run({"gen", "--scenario", sc, "--out-dir", path("data")}), cli::exit_ok);
  ASSERT_EQ(fit_arx(path("data"), path("fit")), cli::exit_ok);
  ASSERT_EQ(run({"simulate", "--model", path("fit/model.arx"), "--input", path("data/train.csv"),
                 "--out", path("replay.csv")}),
            cli::exit_ok)
      << err_.str();
  const auto a = read_csv(dir_ / "replay.csv");
  const auto b = read_csv(dir_ / "fit/train_prediction.csv");
  ASSERT_EQ(a.header, b.header);
  const auto pa = a.columns[*a.find("predicted")];
  const auto pb = b.columns[*b.find("predicted")];
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t k = 0; k < pa.size(); ++k) ASSERT_NEAR(pa[k], pb[k], 1e-12);
}

TEST_F(Cli, SimulateAddAmbientAndMissingInput) {
  ASSERT_EQ(run({"gen", "--out-dir", path("data"), "--noise-fraction", "0.05"}), cli::exit_ok);
  ASSERT_EQ(run({"fit", "--train", path("data/train.csv"), "--validate", path("data/validate.csv"),
                 "--dt", "0.1", "--ambient", "25", "--na-max", "2", "--nb-max", "2", "--nk-max",
                 "1", "--out-dir", path("fit")}),
            cli::exit_ok)
      << err_.str();
  ASSERT_EQ(run({"simulate", "--model", path("fit/model.arx"), "--input",
                 path("data/validate.csv"), "--out", path("rise.csv")}),
            cli::exit_ok);
  ASSERT_EQ(run({"simulate", "--model", path("fit/model.arx"), "--input",
                 path("data/validate.csv"), "--add-ambient", "--out", path("abs.csv")}),
            cli::exit_ok);
  const auto rise = read_csv(dir_ / "rise.csv");
  const auto abs = read_csv(dir_ / "abs.csv");
  const auto& r = rise.columns[*rise.find("predicted")];
  const auto& a = abs.columns[*abs.find("predicted")];
  for (std::size_t k = 0; k < r.size(); ++k) ASSERT_EQ(a[k], r[k] + 25.0);

  const auto no_power = write("np.csv", "t,Q,T\n0,1,25\n0.1,1,25\n");
  EXPECT_EQ(run({"simulate", "--model", path("fit/model.arx"), "--input", no_power}),
            cli::exit_data);
  EXPECT_NE(err_.str().find("input column P"), std::string::npos);
}

TEST_F(Cli, ValidateThresholdExitCodes) {
  const auto sc = arx_scenario(0.02);
  ASSERT_EQ(run({"gen", "--scenario", sc, "--out-dir", path("data")}), cli::exit_ok);
  ASSERT_EQ(fit_arx(path("data"), path("fit")), cli::exit_ok);
  ASSERT_EQ(run({"validate", "--model", path("fit/model.arx"), "--data", path("data/validate.csv"),
                 "--min-fit", "90", "--report", path("report.txt")}),
            cli::exit_ok)
      << out_.str() << err_.str();
  EXPECT_NE(out_.str().find("PASS"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "report.txt").find("pass = true"), std::string::npos);
  EXPECT_EQ(run({"validate", "--model", path("fit/model.arx"), "--data", path("data/validate.csv"),
                 "--min-fit", "99.999"}),
            cli::exit_threshold_fail);
  EXPECT_NE(out_.str().find("FAIL"), std::string::npos);
}

TEST_F(Cli, MalformedModelFile) {
  const auto bad = write("bad.arx", "format = arx-model\nformat_version = 1\nna = 2\n");
  const auto data = write("d.csv", "P,T\n1,2\n2,3\n");
  EXPECT_EQ(run({"validate", "--model", bad, "--data", data}), cli::exit_usage);
  EXPECT_NE(err_.str().find("truncated"), std::string::npos);
  const auto future = write("future.arx", "format = arx-model\nformat_version = 7\nend = arx-model\n");
  EXPECT_EQ(run({"simulate", "--model", future, "--input", data}), cli::exit_usage);
}

TEST_F(Cli, ExitCodeMapping) {
  EXPECT_EQ(cli::exit_code_for(ErrorKind::config), cli::exit_usage);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::schema), cli::exit_data);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::rank), cli::exit_numerical);
  EXPECT_EQ(cli::exit_code_for(ErrorKind::selection), cli::exit_numerical);
}

}  // namespace
}  // namespace arx
