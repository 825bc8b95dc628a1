#include <doctest.h>

#include <sstream>

#include "ecmmd/csv.hpp"
#include "ecmmd/report.hpp"

using namespace ecmmd;

namespace {
CsvTable parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_CASE("schema echo") {
  const auto data = to_paired(parse("x_0,y_0,z_0,z_1\n1,2,3,4\n5,6,7,8\n9,10,11,12\n"));
  CHECK(data.size() == 3);
  CHECK(data.x.cols() == 1);
  CHECK(data.z.cols() == 2);
  CHECK(data.z(2, 1) == 12.0);
}

TEST_CASE("csv errors cite the row and column") {
  CHECK(error_of("x_0,y_0\n1,2\n1,abc\n").find("row 2") != std::string::npos);
  CHECK(error_of("x_0,y_0\n1,2\n1,abc\n").find("'y_0'") != std::string::npos);
  CHECK(error_of("x_0,y_0\n1,2\n3\n").find("row 2 has 1 fields") != std::string::npos);
  CHECK(error_of("x_0,y_0\n1,nan\n").find("non-finite") != std::string::npos);
  CHECK(error_of("x_0,y_0\n1,inf\n").find("row 1") != std::string::npos);
  CHECK(error_of("x_0,x_0\n1,2\n").find("duplicate") != std::string::npos);
  CHECK(error_of("").find("empty") != std::string::npos);
  CHECK_THROWS_AS(to_paired(parse("x_0,z_0\n1,2\n")), InputError);
}

TEST_CASE("explicit mapping equals the prefix convention") {
  const auto a = to_paired(parse("x_0,y_0,z_0\n1,2,3\n4,5,6\n"));
  const auto b = to_paired(parse("a,b,c\n1,2,3\n4,5,6\n"), ColumnMapping{{"a"}, {"b"}, {"c"}});
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.z == b.z);
}

TEST_CASE("blank lines, BOM and signs") {
  const auto t = parse("\xEF\xBB\xBFy_0,z_0\n\n+1.5,-2e-1\n\n");
  CHECK(t.header[0] == "y_0");
  CHECK(t.cells.rows() == 1);
  CHECK(t.cells(0, 0) == 1.5);
  CHECK(t.cells(0, 1) == -0.2);
}

TEST_CASE("resample, classifier and regression schemas") {
  const auto t = parse("y_0,z_0,r0_0,r1_0,r10_0\n1,2,3,4,5\n");
  const auto draws = resample_columns(t, 1);
  REQUIRE(draws.has_value());
  CHECK(draws->count() == 3);
  CHECK(draws->slots[2](0, 0) == 5.0);  // r10 sorts after r1 numerically
  CHECK_FALSE(resample_columns(parse("y_0,z_0\n1,2\n"), 1).has_value());
  CHECK_THROWS_AS(resample_columns(t, 2), InputError);

  const auto pred = to_classifier(parse("p_1,p_2,label\n0.2,0.8,2\n1,0,1\n"));
  CHECK(pred.labels == std::vector<std::size_t>{2, 1});
  CHECK_THROWS_AS(to_classifier(parse("p_1,p_2,label\n0.2,0.8,1.5\n")), InputError);
  CHECK_THROWS_AS(to_classifier(parse("p_1,p_2,label\n0.2,0.7,1\n")), InputError);

  const auto reg = to_regression(parse("y,mean\n1,2\n3,4\n"), 0.5);
  CHECK(reg.model.variances == std::vector<double>{0.5});
  CHECK_THROWS_AS(to_regression(parse("y,mean\n1,2\n"), std::nullopt), InputError);
}

TEST_CASE("csv round trip") {
  Matrix m = Matrix::from_rows({{0.1, 1.0 / 3.0}, {-2.5e-300, 12345.678901234567}});
  std::ostringstream out;
  write_csv(out, {"a", "b"}, m);
  CHECK(parse(out.str()).cells == m);
}

TEST_CASE("report JSON round trip and schema") {
  TestReport r;
  r.method = "ecmmd-finite-sample";
  r.n = 100;
  r.d = 3;
  r.k = 10;
  r.kernel = {"gaussian", 1.25};
  r.statistics = {{"p_m", 0.05}, {"eta_observed", 2.5}};
  r.eta_values = {0.1, -0.3, 2.5};
  r.p_value = 0.05;
  r.alpha = 0.05;
  r.reject = true;
  r.M = 19;
  r.seed = 18446744073709551615ull;
  r.wall_ms = 12.5;
  const nlohmann::json j = r;
  for (const char* key : {"method", "n", "d", "k", "kernel", "statistics", "z", "p_value", "alpha", "reject", "M",
                          "seed", "wall_ms"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["z"].is_null());
  CHECK(j["kernel"]["bandwidth"] == 1.25);
  const TestReport back = nlohmann::json::parse(to_json_string(r)).get<TestReport>();
  CHECK(back == r);
  CHECK(to_json_string(back) == to_json_string(r));

  TestReport lin;
  lin.kernel = {"linear", std::nullopt};
  lin.z = -1.5;
  const nlohmann::json jl = lin;
  CHECK(jl["kernel"]["bandwidth"].is_null());
  CHECK(jl["M"].is_null());
  CHECK(nlohmann::json(jl).get<TestReport>() == lin);
}

TEST_CASE("summary line") {
  TestReport r;
  r.method = "ecmmd-asymptotic";
  r.n = 100;
  r.k = 10;
  r.z = 1.23;
  r.p_value = 0.219;
  const std::string s = summary_line(r);
  CHECK(s.find("ecmmd-asymptotic") == 0);
  CHECK(s.find("retain") != std::string::npos);
}
