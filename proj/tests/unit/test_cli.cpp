#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("ecmmd_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(ECMMD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string paired_csv(std::size_t n, bool identical) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  std::ostringstream out;
  out.precision(17);
  out << "x_0,y_0,z_0,z_1\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double z0 = nd(gen), z1 = nd(gen);
    const double y = z0 + z1 + nd(gen);
    const double x = identical ? y : z0 + z1 + nd(gen);
    out << x << ',' << y << ',' << z0 << ',' << z1 << '\n';
  }
  return out.str();
}

nlohmann::json without_time(const fs::path& p) {
  nlohmann::json j = nlohmann::json::parse(read_file(p));
  j.erase("wall_ms");
  return j;
}

}  // namespace

TEST_CASE("two-sample test writes a report") {
  const fs::path data = write_file("paired.csv", paired_csv(120, false));
  const fs::path out = workdir() / "report.json";
  REQUIRE(run("test --mode asymptotic --k 10 --kernel gaussian:median --alpha 0.05 " + data.string() + " --out " +
              out.string()) == 0);
  const auto j = nlohmann::json::parse(read_file(out));
  CHECK(j["method"] == "ecmmd-asymptotic");
  CHECK(j["n"] == 120);
  CHECK(j["d"] == 2);
  CHECK(j["z"].is_number());
  CHECK(j["p_value"].is_number());
  CHECK(j["kernel"]["kind"] == "gaussian");
}

TEST_CASE("reports are byte-identical apart from wall time") {
  const fs::path data = write_file("gof.csv", paired_csv(150, false));
  const fs::path a = workdir() / "a.json", b = workdir() / "b.json";
  const std::string args = "gof --sampler gaussian --mean-coef 1,1 --variance 1 --mode finite --M 19 --seed 7 ";
  REQUIRE(run(args + data.string() + " --out " + a.string()) == 0);
  REQUIRE(run(args + data.string() + " --out " + b.string()) == 0);
  CHECK(without_time(a).dump(2) == without_time(b).dump(2));
  const auto j = without_time(a);
  CHECK(j["M"] == 19);
  CHECK(j["statistics"]["eta_values"].size() == 20);
}

TEST_CASE("gof from resample columns") {
  const fs::path data = write_file("cols.csv",
                                   "y_0,z_0,r0_0,r1_0,r2_0\n"
                                   "0.1,0,0.3,-0.2,0.5\n1.2,1,0.8,1.1,0.9\n2.1,2,1.7,2.4,2.2\n"
                                   "2.9,3,3.3,2.8,3.1\n4.2,4,3.9,4.1,4.4\n");
  CHECK(run("gof --mode finite --k 1 " + data.string() + " --out " + (workdir() / "c.json").string()) == 0);
  CHECK(run("gof --mode derandomized --k 2 " + data.string() + " --out " + (workdir() / "d.json").string()) == 0);
}

TEST_CASE("calibration and simulation verbs") {
  const fs::path cls = write_file("cls.csv", "p_1,p_2,label\n0.2,0.8,2\n0.7,0.3,1\n0.4,0.6,2\n0.9,0.1,1\n"
                                             "0.1,0.9,2\n0.6,0.4,2\n0.3,0.7,1\n0.8,0.2,1\n");
  CHECK(run("calibrate classify --k 2 " + cls.string()) == 0);
  CHECK(run("calibrate reliability --bins 5 " + cls.string()) == 0);
  CHECK(run("calibrate isotonic " + cls.string()) == 0);
  const fs::path reg = write_file("reg.csv", "y,mean\n0.1,0\n0.9,1\n2.2,2\n2.7,3\n4.1,4\n5.3,5\n");
  CHECK(run("calibrate regress --k 2 --variance 0.5 " + reg.string()) == 0);
  const fs::path dump = workdir() / "dump.csv";
  CHECK(run("sim class-calib --n 60 --reps 4 --rho 0.5 --dump " + dump.string()) == 0);
  CHECK(fs::exists(dump));
  CHECK(run("sim oracle --n 200 --k 4 --reps 2") == 0);
}

TEST_CASE("exit-code contract") {
  const fs::path good = write_file("good.csv", paired_csv(50, false));
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("test --k notanumber " + good.string()) == 2);
  CHECK(run("test " + (workdir() / "missing.csv").string()) == 2);
  CHECK(run("test --alpha 1.5 " + good.string()) == 2);
  CHECK(run("test --k 50 " + good.string()) == 2);
  CHECK(run("test --kernel cosine " + good.string()) == 2);
  CHECK(run("test --mode finite " + good.string()) == 2);
  CHECK(run("test " + write_file("ragged.csv", "x_0,y_0,z_0\n1,2,3\n4,5\n").string()) == 2);
  CHECK(run("test " + write_file("text.csv", "x_0,y_0,z_0\n1,2,3\n4,five,6\n").string()) == 2);
  CHECK(run("test " + write_file("nan.csv", "x_0,y_0,z_0\n1,2,3\nnan,5,6\n").string()) == 2);
  CHECK(run("test " + write_file("noz.csv", "x_0,y_0\n1,2\n3,4\n").string()) == 2);
  CHECK(run("gof " + good.string()) == 2);  // no sampler and no resample columns
  CHECK(run("gof --sampler gaussian --mean-coef 1 " + good.string()) == 2);
  CHECK(run("gof --sampler gaussian --variance -1 " + good.string()) == 2);
  CHECK(run("calibrate classify " + write_file("badp.csv", "p_1,p_2,label\n0.5,0.6,1\n0.5,0.5,2\n").string()) == 2);
  CHECK(run("sim class-calib --rho 1.5 --reps 2") == 2);
  CHECK(run("sim gof --hypothesis maybe --reps 2") == 2);

  const fs::path same = write_file("same.csv", paired_csv(50, true));
  CHECK(run("test --k 5 " + same.string()) == 3);
  CHECK(run("test --k 5 --kernel gaussian:1 " + same.string()) == 3);
  CHECK(run("test --k 5 --kernel linear " + same.string()) == 3);
}
