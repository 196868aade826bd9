#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "votelab/serialize.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "votelab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code =
      votelab::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("votelab_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("analyze the split-vote example") {
  TempDir dir;
  auto r = run({"simulate", "split-vote", "--p", "0.75", "--case", "half-half", "--examples",
                "4", "--output", dir / "ex1.csv", "--weights-output", dir / "w.json"});
  REQUIRE(r.code == 0);
  r = run({"analyze", "--predictions", dir / "ex1.csv", "--weights", dir / "w.json"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"polarization\": 1.6") != std::string::npos);
  const auto stats = votelab::stats_from_json(votelab::Json::parse(r.out));
  CHECK(stats.polarization == 1.6);
}

TEST_CASE("bounds table lists every bound") {
  TempDir dir;
  REQUIRE(run({"simulate", "dirichlet", "--examples", "30", "--classifiers", "5", "--classes",
               "3", "--seed", "4", "--output", dir / "p.csv"})
              .code == 0);
  const auto r = run({"bounds", "--predictions", dir / "p.csv", "--delta", "0.05"});
  CHECK(r.code == 0);
  for (const char* name :
       {"first_order", "c_bound", "binary_second_order", "competence_first_order",
        "competence_second_order", "polarized", "entropy_restricted", "finite_ensemble",
        "epsilon_restricted", "epsilon_worst_case", "polarization_upper_bound"}) {
    CHECK(r.out.find(name) != std::string::npos);
  }
  const auto j = run({"bounds", "--predictions", dir / "p.csv", "--format", "json"});
  CHECK(votelab::Json::parse(j.out)["entries"].size() == 11);
}

TEST_CASE("commands are deterministic") {
  TempDir dir;
  REQUIRE(run({"simulate", "dirichlet", "--examples", "40", "--classifiers", "25", "--classes",
               "4", "--seed", "11", "--output", dir / "p.csv"})
              .code == 0);
  const std::vector<std::string> ext{"extrapolate", "--predictions", dir / "p.csv", "--m",  "3",
                                     "--targets",   "5,10,20",      "--num-subsets", "20",
                                     "--seed",      "7"};
  const auto a = run(ext);
  const auto b = run(ext);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("N,pred_conj,pred_meas,pred_disg,actual_mv\n", 0) == 0);

  auto with_prefix = ext;
  with_prefix.insert(with_prefix.end(), {"--output", dir / "curve"});
  REQUIRE(run(with_prefix).code == 0);
  CHECK(slurp(dir / "curve.csv") == a.out);
  CHECK(votelab::Json::parse(slurp(dir / "curve.json"))["target_Ns"].size() == 3);

  const std::vector<std::string> perturbed{"bounds",     "--predictions", dir / "p.csv",
                                           "--tie-rule", "perturbed",     "--seed", "3"};
  CHECK(run(perturbed).out == run(perturbed).out);
}

TEST_CASE("simulate kinds") {
  TempDir dir;
  CHECK(run({"simulate", "pathological", "--classes", "10", "--epsilon", "0.1", "--examples",
             "20", "--output", dir / "path.csv", "--weights-output", dir / "pw.json"})
            .code == 0);
  const auto r = run({"analyze", "--predictions", dir / "path.csv", "--weights", dir / "pw.json"});
  const auto s = votelab::stats_from_json(votelab::Json::parse(r.out));
  CHECK(s.mv_error == 0.0);
  CHECK(s.avg_error == doctest::Approx(0.1).epsilon(1e-14));

  std::ofstream(dir / "pool.csv") << "y,f1,f2\n0,0,1\n1,1,1\n0,1,0\n";
  std::ofstream(dir / "probs.json") << "[0.4, 0.6]";
  CHECK(run({"simulate", "finite-pool", "--pool", dir / "pool.csv", "--probs", dir / "probs.json",
             "--classifiers", "7", "--output", dir / "drawn.csv"})
            .code == 0);
  CHECK(slurp(dir / "drawn.csv").rfind("y,h1,h2,h3,h4,h5,h6,h7\n", 0) == 0);

  const auto clt = run({"simulate", "clt-check", "--pool", dir / "pool.csv", "--probs",
                        dir / "probs.json", "--n", "20", "--trials", "100"});
  CHECK(clt.code == 0);
  const auto j = votelab::Json::parse(clt.out);
  for (const char* key : {"mean_UN", "var_scaled", "sigma1_sq_true"}) CHECK(j.contains(key));
}

TEST_CASE("error paths") {
  TempDir dir;
  SUBCASE("unknown flag") {
    const auto r = run({"analyze", "--predictions", "x.csv", "--nope"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--nope") != std::string::npos);
  }
  SUBCASE("missing subcommand") { CHECK(run({}).code == 1); }
  SUBCASE("missing input file") {
    CHECK(run({"analyze", "--predictions", dir / "absent.csv"}).code == 2);
  }
  SUBCASE("malformed row names the row and leaves no output behind") {
    std::ofstream(dir / "bad.csv") << "y,h1,h2\n0,0,1\n1,1\n";
    const auto r =
        run({"analyze", "--predictions", dir / "bad.csv", "--output", dir / "stats.json"});
    CHECK(r.code == 1);
    CHECK(r.err.find("row 2") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "stats.json"));
    CHECK_FALSE(fs::exists(dir / "stats.json.tmp"));
  }
  SUBCASE("label outside the declared class count") {
    std::ofstream(dir / "p.csv") << "y,h1,h2\n0,0,7\n";
    const auto r = run({"analyze", "--predictions", dir / "p.csv", "--declared-k", "4"});
    CHECK(r.code == 1);
    CHECK(r.err.find("h2") != std::string::npos);
  }
  SUBCASE("unwritable output") {
    std::ofstream(dir / "p.csv") << "y,h1\n0,0\n";
    const auto r = run({"analyze", "--predictions", dir / "p.csv", "--output",
                        dir / "no/such/dir/out.json"});
    CHECK(r.code == 2);
  }
  SUBCASE("subset size other than three") {
    std::ofstream(dir / "p.csv") << "y,h1,h2,h3,h4\n0,0,1,0,1\n";
    CHECK(run({"extrapolate", "--predictions", dir / "p.csv", "--m", "2", "--targets", "4"}).code ==
          1);
  }
}

TEST_CASE("help exits cleanly") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("analyze") != std::string::npos);
}

}  // TEST_SUITE
