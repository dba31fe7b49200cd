#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mbgp/cli.hpp"
#include "mbgp/io.hpp"
#include "mbgp/simd.hpp"

using namespace mbgp;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "mbgp");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  simd::set_active(simd::best_available());
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Draw, accept and batch-size columns; wall time is the only run-to-run difference.
std::string decisions(const fs::path& p) {
  const auto t = read_chain_csv(p);
  std::ostringstream ss;
  ss.precision(17);
  ss << t.draws << '\n';
  for (auto a : t.accepted) ss << a;
  for (auto b : t.batch_size) ss << ',' << b;
  return ss.str();
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    static int counter = 0;
    dir = fs::temp_directory_path() / ("mbgp_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
    data = (dir / "d.csv").string();
    ASSERT_EQ(run({"simulate", "--n", "300", "--seed", "3", "--out", data}).code, 0);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }

  fs::path dir;
  std::string data;
};

} // namespace

TEST_F(Cli, SimulateIsByteReproducible) {
  ASSERT_EQ(run({"simulate", "--n", "300", "--seed", "3", "--out", path("again.csv")}).code, 0);
  EXPECT_EQ(slurp(data), slurp(path("again.csv")));
  ASSERT_EQ(run({"simulate", "--n", "300", "--seed", "4", "--out", path("other.csv")}).code, 0);
  EXPECT_NE(slurp(data), slurp(path("other.csv")));
  const auto d = read_dataset_csv(data);
  EXPECT_EQ(d.size(), 300u);
  EXPECT_EQ(d.indices_of(Split::test).size(), 60u);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"simulate", "--n", "abc", "--out", path("x.csv")}).code, 2);
  EXPECT_EQ(run({"simulate", "--omega", "2", "--out", path("x.csv")}).code, 2);
  EXPECT_EQ(run({"simulate", "--n", "10", "--out", path("no/such/dir/x.csv")}).code, 4);
  EXPECT_EQ(run({"fit", "--data", path("missing.csv"), "--out", path("c.csv"), "--iterations", "5"}).code, 4);
  EXPECT_EQ(run({"fit", "--data", data, "--out", path("c.csv"), "--iterations", "0"}).code, 2);
  EXPECT_EQ(run({"fit", "--data", data, "--out", path("c.csv"), "--iterations", "5", "--algorithm", "sgld"}).code, 2);
  EXPECT_EQ(run({"fit", "--data", data, "--out", path("c.csv"), "--iterations", "5", "--simd", "sse9"}).code, 2);
  EXPECT_EQ(run({"correction-dist", "--c", "4", "--out", path("h.txt")}).code, 2);
  std::ofstream(path("garbage.csv")) << "s1,s2,y\n0,0,oops\n";
  EXPECT_EQ(run({"fit", "--data", path("garbage.csv"), "--out", path("c.csv"), "--iterations", "5"}).code, 4);

  // A heavy L1 penalty cannot meet the certification bound: numerical failure.
  const auto numerical = run({"correction-dist", "--c", "1", "--lambda", "1e6", "--out", path("h.txt")});
  EXPECT_EQ(numerical.code, 3) << numerical.err;
}

TEST_F(Cli, FitWritesDrawsMetadataAndSummary) {
  const auto r = run({"fit", "--data", data, "--out", path("c.csv"), "--iterations", "40", "--seed", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("beta1"), std::string::npos);
  EXPECT_NE(r.out.find("acceptance rate"), std::string::npos);
  EXPECT_EQ(read_chain_csv(path("c.csv")).draws.rows(), 40);
  const auto meta = read_metadata_file(path("c.csv.meta"));
  EXPECT_EQ(meta.at("algorithm"), "nn");
  EXPECT_EQ(meta.at("burn_in"), "20");
  EXPECT_EQ(meta.at("n_train"), "240");
}

TEST_F(Cli, FbWritesEpochsTimesBatchesRows) {
  ASSERT_EQ(run({"fit", "--data", data, "--out", path("fb.csv"), "--algorithm", "fb", "--epochs", "6", "--batches", "4"}).code, 0);
  EXPECT_EQ(read_chain_csv(path("fb.csv")).draws.rows(), 24);
  ASSERT_EQ(run({"fit", "--data", data, "--out", path("fb2.csv"), "--algorithm", "fb", "--iterations", "24", "--batches", "4"}).code, 0);
  EXPECT_EQ(decisions(path("fb.csv")), decisions(path("fb2.csv")));
  EXPECT_EQ(run({"fit", "--data", data, "--out", path("fb3.csv"), "--algorithm", "fb", "--iterations", "25", "--batches", "4"}).code, 2);
}

TEST_F(Cli, SameSeedSameChain) {
  ASSERT_EQ(run({"fit", "--data", data, "--out", path("a.csv"), "--iterations", "30", "--seed", "9"}).code, 0);
  ASSERT_EQ(run({"fit", "--data", data, "--out", path("b.csv"), "--iterations", "30", "--seed", "9"}).code, 0);
  EXPECT_EQ(decisions(path("a.csv")), decisions(path("b.csv")));
  ASSERT_EQ(run({"fit", "--data", data, "--out", path("c.csv"), "--iterations", "30", "--seed", "10"}).code, 0);
  EXPECT_NE(decisions(path("a.csv")), decisions(path("c.csv")));
}

TEST_F(Cli, FbWithOneBatchMatchesNn) {
  ASSERT_EQ(run({"fit", "--data", data, "--out", path("nn.csv"), "--iterations", "30", "--seed", "5"}).code, 0);
  ASSERT_EQ(run({"fit", "--data", data, "--out", path("fb.csv"), "--algorithm", "fb", "--epochs", "30", "--batches", "1",
                 "--seed", "5"}).code, 0);
  EXPECT_EQ(decisions(path("nn.csv")), decisions(path("fb.csv")));
}

TEST_F(Cli, ConfigFileAndFlagPrecedence) {
  std::ofstream(path("cfg.txt")) << "# run settings\niterations = 12\nseed = 4\nneighbors = 5\n";
  ASSERT_EQ(run({"fit", "--config", path("cfg.txt"), "--data", data, "--out", path("a.csv")}).code, 0);
  EXPECT_EQ(read_chain_csv(path("a.csv")).draws.rows(), 12);
  auto meta = read_metadata_file(path("a.csv.meta"));
  EXPECT_EQ(meta.at("seed"), "4");
  EXPECT_EQ(meta.at("neighbors"), "5");
  ASSERT_EQ(run({"fit", "--config", path("cfg.txt"), "--data", data, "--out", path("b.csv"), "--iterations", "8",
                 "--neighbors", "7"}).code, 0);
  EXPECT_EQ(read_chain_csv(path("b.csv")).draws.rows(), 8);
  meta = read_metadata_file(path("b.csv.meta"));
  EXPECT_EQ(meta.at("seed"), "4");
  EXPECT_EQ(meta.at("neighbors"), "7");

  std::ofstream(path("unknown.txt")) << "iterations = 5\nwarp_factor = 9\n";
  EXPECT_EQ(run({"fit", "--config", path("unknown.txt"), "--data", data, "--out", path("c.csv")}).code, 2);
  std::ofstream(path("badvalue.txt")) << "iterations = many\n";
  EXPECT_EQ(run({"fit", "--config", path("badvalue.txt"), "--data", data, "--out", path("c.csv")}).code, 2);
  EXPECT_EQ(run({"fit", "--config", path("absent.txt"), "--data", data, "--out", path("c.csv")}).code, 4);
}

TEST_F(Cli, PredictAndScorePipeline) {
  ASSERT_EQ(run({"fit", "--data", data, "--out", path("c.csv"), "--iterations", "200"}).code, 0);
  const auto p = run({"predict", "--data", data, "--draws", path("c.csv"), "--out", path("p.csv")});
  ASSERT_EQ(p.code, 0) << p.err;
  const auto table = read_predictions_csv(path("p.csv"));
  EXPECT_EQ(table.truth.size(), 60);
  const auto s = run({"score", "--predictions", path("p.csv"), "--label", "nn", "--out", path("m.csv")});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(slurp(path("m.csv")).rfind("label,MAE,RPMSE,CRPS,INT,WID,CVG,count\nnn,", 0), 0u);
  const auto ps = run({"score", "--draws", path("c.csv"), "--truth", "0,1,-5,1,0.5,0.236"});
  ASSERT_EQ(ps.code, 0) << ps.err;
  EXPECT_NE(ps.out.find(",energy,"), std::string::npos);
  EXPECT_EQ(run({"score", "--draws", path("c.csv"), "--truth", "0,1"}).code, 2);
}

TEST_F(Cli, PredictWithOneDrawAndMismatchedMetadata) {
  ASSERT_EQ(run({"fit", "--data", data, "--out", path("c.csv"), "--iterations", "2", "--burn-in", "1"}).code, 0);
  ASSERT_EQ(run({"predict", "--data", data, "--draws", path("c.csv"), "--out", path("p.csv")}).code, 0);
  const auto t = read_predictions_csv(path("p.csv"));
  for (Eigen::Index i = 0; i < t.summary.sd.size(); ++i) {
    EXPECT_GT(t.summary.sd(i), 0.0);
    EXPECT_NEAR(t.summary.upper(i) - t.summary.mean(i), 1.959963984540054 * t.summary.sd(i), 1e-6);
  }
  ASSERT_EQ(run({"simulate", "--n", "200", "--seed", "8", "--out", path("other.csv")}).code, 0);
  EXPECT_EQ(run({"predict", "--data", path("other.csv"), "--draws", path("c.csv"), "--out", path("q.csv")}).code, 2);
  auto meta = read_metadata_file(path("c.csv.meta"));
  meta["kernel"] = "matern52";
  meta["num_coefficients"] = "5";
  write_metadata_file(path("c.csv.meta"), meta);
  EXPECT_EQ(run({"predict", "--data", data, "--draws", path("c.csv"), "--out", path("q.csv")}).code, 2);
}

TEST_F(Cli, ScoreOfPerfectPredictionsIsZero) {
  std::ofstream(path("perfect.csv")) << "s1,s2,truth,mean,sd,lo95,hi95\n0,0,1,1,0,1,1\n1,1,2,2,0,2,2\n";
  const auto r = run({"score", "--predictions", path("perfect.csv"), "--label", "x"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("x,0,0,0,0,0,1,2"), std::string::npos) << r.out;
}

TEST_F(Cli, CorrectionDistRoundTrip) {
  const auto r = run({"correction-dist", "--c", "1", "--out", path("h1.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("h1.txt"));
  const auto cd = read_correction(in);
  EXPECT_LE(cd.sup_error(), 0.01);
  std::ostringstream again;
  write_correction(again, cd);
  EXPECT_EQ(again.str(), slurp(path("h1.txt")));
  ASSERT_EQ(run({"fit", "--data", data, "--out", path("b.csv"), "--algorithm", "barker", "--iterations", "10",
                 "--b-init", "50", "--correction", path("h1.txt")}).code, 0);
  EXPECT_EQ(run({"fit", "--data", data, "--out", path("b.csv"), "--algorithm", "barker", "--iterations", "10",
                 "--c", "0.5", "--correction", path("h1.txt")}).code, 2);
}
