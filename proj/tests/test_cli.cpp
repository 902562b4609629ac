#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run kaonlab(const std::string& args, const std::string& env = {}) {
  const auto out = fs::temp_directory_path() / "kaonlab_cli_test.out";
  fs::remove(out);
  const std::string cmd = env + " \"" KAONLAB_CLI_PATH "\" " + args + " > \"" + out.string() +
                          "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1,
          {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}};
}

}  // namespace

TEST_CASE("constants in json") {
  const auto r = kaonlab("constants --format json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("epsilon_abs").get<double>() == doctest::Approx(2.23e-3));
  CHECK(j.at("decay_mode") == "full");
}

TEST_CASE("config file and environment fallback") {
  const auto cfg = fs::temp_directory_path() / "kaonlab_cli_test.cfg";
  std::ofstream(cfg) << "epsilon_abs = 1e-3\n";
  const auto direct = nlohmann::json::parse(kaonlab("--config " + cfg.string() + " constants --format json").out);
  CHECK(direct.at("epsilon_abs").get<double>() == doctest::Approx(1e-3));
  const auto env = nlohmann::json::parse(
      kaonlab("constants --format json", "KAONLAB_CONFIG=" + cfg.string()).out);
  CHECK(env.at("epsilon_abs").get<double>() == doctest::Approx(1e-3));
  const auto flag = nlohmann::json::parse(
      kaonlab("constants --format json --epsilon-abs 5e-4", "KAONLAB_CONFIG=" + cfg.string()).out);
  CHECK(flag.at("epsilon_abs").get<double>() == doctest::Approx(5e-4));
}

TEST_CASE("exit codes") {
  CHECK(kaonlab("").code == 1);
  CHECK(kaonlab("frobnicate").code == 1);
  CHECK(kaonlab("constants --format xml").code == 1);
  CHECK(kaonlab("--config /nonexistent.cfg constants").code == 2);
  CHECK(kaonlab("--tau-s -1 constants").code == 2);
  CHECK(kaonlab("fit-zeta --data /nonexistent.csv").code == 3);

  const auto dir = fs::temp_directory_path();
  std::ofstream(dir / "kaonlab_bad.csv") << "label,x\n";
  CHECK(kaonlab("fit-zeta --data " + (dir / "kaonlab_bad.csv").string()).code == 4);
  std::ofstream(dir / "kaonlab_empty.csv") << "";
  CHECK(kaonlab("fit-zeta --data " + (dir / "kaonlab_empty.csv").string()).code == 5);
  std::ofstream(dir / "kaonlab_theory.csv")
      << "label,t_l,t_r,measured,sigma,corrected_theory\na,1,1,0.8,0.1,\n";
  CHECK(kaonlab("fit-zeta --data " + (dir / "kaonlab_theory.csv").string()).code == 6);
  CHECK(kaonlab("--epsilon-phase 120 wigner threshold").code == 7);
}

TEST_CASE("fit-zeta uses the bundled data") {
  const auto r = kaonlab("fit-zeta --format json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("zeta_hat").get<double>() == doctest::Approx(0.1349).epsilon(1e-3));
}

TEST_CASE("csv scan shape and --out") {
  const auto r = kaonlab("asymmetry-scan --format csv --steps 10 --zeta 0,1");
  REQUIRE(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1 + 1 + 11);
  CHECK(r.out.find("delta_t,A_zeta_0,A_zeta_1") != std::string::npos);

  const auto file = fs::temp_directory_path() / "kaonlab_cli_scan.csv";
  fs::remove(file);
  REQUIRE(kaonlab("--out " + file.string() + " asymmetry-scan --format csv --steps 10 --zeta 0,1").code == 0);
  std::ifstream in(file);
  const std::string written{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  CHECK(written == r.out);
}

TEST_CASE("chsh-max and probe") {
  const auto photon = nlohmann::json::parse(kaonlab("chsh-max --system photon --format json").out);
  CHECK(photon.at("best_value").get<double>() == doctest::Approx(2 * std::sqrt(2.0)));
  CHECK(photon.at("verdict") == "VIOLATION");
  const auto probe = nlohmann::json::parse(
      kaonlab("--epsilon-abs 0 probe --left K0 --right K0 --tl 1 --tr 1 --format json").out);
  CHECK(probe.at("p_yy").get<double>() < 1e-12);
}
