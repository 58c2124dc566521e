#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "osc/diff_op.hpp"
#include "osc/io.hpp"

using namespace osc;
namespace fs = std::filesystem;

namespace {

std::string tmp_path(const std::string& name) {
  return (fs::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

const char* kHeisAlgebra = R"({
  "name": "heis1",
  "weights": [1, 1, 2],
  "brackets": [[0, 1, 2, "1"], [1, 0, 2, "-1"]]
})";

const char* kHeisPatch = R"({
  "name": "heisenberg",
  "frame": [["1", "0", "-1/2*y"], ["0", "1", "1/2*x"], ["0", "0", "1"]],
  "orders": [1, 1, 2],
  "depth": 2,
  "periodic": false,
  "injectivity_radius": 10
})";

}  // namespace

TEST_CASE("fmt17 round-trips doubles exactly") {
  for (double v : {1.0 / 3, 3.141592653589793, 1e-300, -2.5e17, 0.1,
                   6.283185307179586476925286766559}) {
    CHECK(std::strtod(fmt17(v).c_str(), nullptr) == v);
    CHECK(std::strtod(fmt17(-v).c_str(), nullptr) == -v);
  }
}

TEST_CASE("algebra spec loads and validates") {
  auto alg = algebra_from_json(nlohmann::json::parse(kHeisAlgebra));
  CHECK(alg.dim() == 3);
  CHECK(alg.validate().ok);
  auto ref = heisenberg_algebra();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) CHECK(alg.c(i, j, k) == ref.c(i, j, k));
}

TEST_CASE("malformed specs throw with a location") {
  auto j = nlohmann::json::parse(kHeisAlgebra);
  j["brackets"][0][3] = "1/0";
  CHECK_THROWS_WITH_AS(algebra_from_json(j),
                       doctest::Contains("brackets[0]"), MalformedInput);
  j = nlohmann::json::parse(kHeisAlgebra);
  j.erase("weights");
  CHECK_THROWS_WITH_AS(algebra_from_json(j), doctest::Contains("weights"),
                       MalformedInput);
  auto p = nlohmann::json::parse(kHeisPatch);
  p["frame"][1][2] = "1/2*q";
  CHECK_THROWS_WITH_AS(patch_from_json(p), doctest::Contains("frame[1][2]"),
                       MalformedInput);
}

TEST_CASE("json parse errors carry the file and position") {
  auto path = tmp_path("osc_bad.json");
  write_text(path, "{\"weights\": [1, 1,\n");
  CHECK_THROWS_WITH_AS(load_json(path), doctest::Contains("line"),
                       MalformedInput);
  CHECK_THROWS_WITH_AS(load_json(tmp_path("osc_missing_file.json")),
                       doctest::Contains("cannot open"), MalformedInput);
}

TEST_CASE("patch and operator specs reproduce the sublaplacian cosymbol") {
  auto patch = std::make_shared<const FilteredPatch>(
      patch_from_json(nlohmann::json::parse(kHeisPatch)));
  CHECK(patch->check_filtration().ok);
  auto op = nlohmann::json::parse(R"({
    "terms": [{"index": [2, 0, 0], "coeff": "-1"},
              {"index": [0, 2, 0], "coeff": "-1"}]
  })");
  auto L = operator_from_json(patch, op);
  CHECK(L.h_order() == 2);
  auto c = principal_cosymbol(L);
  CHECK(c.weight() == 2);
  CHECK(c.terms().size() == 2);
}

TEST_CASE("family array exchange round-trips byte for byte") {
  auto S = family_from_spec(FamilySpec{"cone", 1, 32, 4});
  auto base = tmp_path("osc_family");
  write_family(base, S);
  auto R = read_family(base);
  CHECK(R.weight == S.weight);
  CHECK(R.weights == S.weights);
  CHECK(R.tgrid == S.tgrid);
  CHECK(R.nose_normalized == S.nose_normalized);
  CHECK(R.xgrid.sizes == S.xgrid.sizes);
  CHECK(R.egrid.sizes == S.egrid.sizes);
  REQUIRE(R.values.size() == S.values.size());
  for (std::size_t i = 0; i < S.values.size(); ++i) {
    bool nan_s = std::isnan(S.values[i].real());
    bool nan_r = std::isnan(R.values[i].real());
    CHECK(nan_s == nan_r);
    if (!nan_s) CHECK(R.values[i] == S.values[i]);
  }
  auto header1 = slurp(base + ".json");
  auto bin1 = slurp(base + ".bin");
  write_family(base, R);
  CHECK(slurp(base + ".json") == header1);
  CHECK(slurp(base + ".bin") == bin1);
}

TEST_CASE("deterministic json dump uses 17-digit floats and ordered keys") {
  nlohmann::json j;
  j["b"] = 1.0 / 3;
  j["a"] = 7;
  auto s = dump_json(j);
  CHECK(s.find("0.33333333333333331") != std::string::npos);
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(dump_json(j) == s);
}

TEST_CASE("csv shell tables have one row per measured shell") {
  auto S = family_from_spec(FamilySpec{"eta-squared", 1, 64, 4});
  auto prof = slice_shell_profile(restrict_t(S, 1.0));
  auto csv = shell_profile_csv(prof);
  CHECK(csv.rfind("shell,radius,sup\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') >= 4);
  auto rep = decay_report(S, 1, 1);
  auto table = seminorm_csv(rep);
  CHECK(table.rfind("a,b,k,shell,radius,sup,slope,bound,pass\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') > 8);
}

TEST_CASE("log kernel cocycle is the constant -log(lambda)/lambda density") {
  auto rep = log_cocycle_check(256, {2, 4, 8});
  CHECK(rep.pass);
  REQUIRE(rep.entries.size() == 3);
  for (const auto& e : rep.entries) {
    CHECK(e.expected ==
          doctest::Approx(-std::log(e.lambda) / e.lambda * 2 *
                          3.141592653589793).epsilon(1e-12));
    CHECK(e.rel_error < 1e-12);
    CHECK(e.tail_max < 1e-12 * std::abs(e.expected));
  }
}

TEST_CASE("log kernel family satisfies the weight -1 decay estimates") {
  auto S = log_kernel_family(256, 8);
  CHECK(S.weight == doctest::Approx(-1.0));
  auto rep = decay_report(S);
  CHECK(rep.pass);
}

TEST_CASE("family catalog rejects unknown kinds") {
  CHECK_THROWS_WITH_AS(family_from_spec(FamilySpec{"no-such", 1, 32, 4}),
                       doctest::Contains("unknown kind"), MalformedInput);
}
