#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "dmkp/error.hpp"
#include "dmkp/init.hpp"
#include "dmkp/io.hpp"
#include "helpers.hpp"

using namespace dmkp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const char* name) {
  fs::path p = fs::temp_directory_path() / "dmkp_unit" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("initial data kinds") {
  const double tp = 2.0 * std::numbers::pi;
  auto g = build_grid(32, 32, 4 * tp, 4 * tp);
  const auto gauss = gaussian_field(g, 2.0, 1.5);
  const auto phys = inverse(gauss);
  CHECK(phys.at(16, 16) == doctest::Approx(2.0));
  CHECK(conjugate_symmetry_defect(gauss) < 1e-13);
  CHECK_THROWS_AS(gaussian_field(g, 1.0, 0.0), ConfigError);

  const auto r1 = random_field(g, 7, -1.0, 4, 0.3);
  const auto r2 = random_field(g, 7, -1.0, 4, 0.3);
  CHECK(testing::max_abs_diff(r1, r2) == 0.0);
  CHECK(l2_norm(r1) == doctest::Approx(0.3));
  CHECK(conjugate_symmetry_defect(r1) < 1e-15);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const int j = g->mode_x(g->col_of(i)), k = g->mode_y(g->row_of(i));
    if (j == 0 || std::abs(j) > 4 || std::abs(k) > 4) CHECK(r1.coeffs[i] == cplx(0.0));
  }
  CHECK(testing::max_abs_diff(r1, random_field(g, 8, -1.0, 4, 0.3)) > 0.0);

  const auto s = inverse(single_mode_field(g, 2, 1, 0.5));
  CHECK(s.at(3, 5) == doctest::Approx(0.5 * std::cos(g->xi_at(2) * g->x_at(3) + g->eta_at(1) * g->y_at(5))));
  CHECK_THROWS_AS(single_mode_field(g, 16, 0, 1.0), ConfigError);
}

TEST_CASE("FLD1 round trip and layout") {
  auto g = build_grid(6, 4, 1.5, 2.5);
  RealField f(g);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = std::sin(0.37 * i) * 1e3 + 1e-9 * i;
  const std::string bytes = encode_fld1(f, 0.125);
  CHECK(bytes.size() == 48 + 8 * 24);
  CHECK(bytes.substr(0, 4) == "FLD1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);
  CHECK(static_cast<unsigned char>(bytes[8]) == 6);
  CHECK(static_cast<unsigned char>(bytes[16]) == 4);
  const auto snap = decode_fld1(bytes);
  CHECK(snap.time == 0.125);
  CHECK(snap.field.grid->nx() == 6);
  CHECK(snap.field.grid->ly() == 2.5);
  CHECK(snap.field.values == f.values);

  const auto dir = scratch("fld");
  write_fld1(dir / "a.fld", f, 0.125);
  CHECK(read_fld1(dir / "a.fld").field.values == f.values);
  CHECK_FALSE(fs::exists(dir / "a.fld.tmp"));
  CHECK_THROWS_AS(read_fld1(dir / "missing.fld"), ConfigError);
  CHECK_THROWS_AS(decode_fld1("FLD2" + bytes.substr(4)), ConfigError);
  CHECK_THROWS_AS(decode_fld1(bytes.substr(0, bytes.size() - 3)), ConfigError);

  write_manifest(dir / "a.fld", 0.125, presets::kpb(), {{"command", "test"}});
  const auto j = nlohmann::json::parse(slurp(dir / "a.fld.json"));
  CHECK(j["format"] == "FLD1");
  CHECK(j["model"]["dissipation"] == "burgers");
  CHECK(j["provenance"]["command"] == "test");
}

TEST_CASE("CSV tables") {
  CsvTable t("demo", {"a", "b"});
  t.add_row(std::vector<double>{0.1, 1e-300});
  t.add_row(std::vector<std::string>{"x", "y"});
  CHECK(t.str() == "# dmkp-lab v1 demo\na,b\n0.1,1e-300\nx,y\n");
  CHECK_THROWS_AS(t.add_row(std::vector<double>{1.0}), ConfigError);
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  const auto dir = scratch("csv");
  t.write(dir / "sub" / "t.csv");
  CHECK(slurp(dir / "sub" / "t.csv") == t.str());
}

TEST_CASE("run config parsing") {
  const auto cfg = parse_run_config(R"({
    "model": {"preset": "dmkp", "beta": 0.0},
    "grid": {"nx": 32, "ny": 16, "lx": 10.0},
    "time": {"t_final": 0.5, "dt": 0.01, "output_every": 10},
    "init": {"kind": "random", "seed": 3, "band": 4},
    "output": {"dir": "out", "s1": -0.5}
  })");
  CHECK(cfg.model.beta == 0.0);
  CHECK(cfg.model.alpha == 1.0);
  CHECK(cfg.grid.ny == 16);
  CHECK(cfg.make_grid()->ly() == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(cfg.init.seed == 3);
  CHECK(cfg.output.s1 == -0.5);

  CHECK_THROWS_AS(parse_run_config(R"({"grid": {"nx": 32, "nz": 4}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"extra": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"init": {"kind": "gaussian", "seed": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"grid": {"nx": "32"}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"grid": {"nx": 33}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"time": {"dt": 2.0}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"model": {"epsilon": 0.3}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{not json"), ConfigError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("output directory override") {
  RunConfig cfg;
  cfg.output.dir = "from_config";
  ::unsetenv(kOutputDirEnv);
  CHECK(resolve_output_dir(cfg) == fs::path("from_config"));
  ::setenv(kOutputDirEnv, "/tmp/override", 1);
  CHECK(resolve_output_dir(cfg) == fs::path("/tmp/override"));
  ::unsetenv(kOutputDirEnv);
}

TEST_CASE("file initial data must match the grid") {
  const auto dir = scratch("init");
  auto g = build_grid(8, 8, 1.0, 1.0);
  RealField f(g);
  f.values[3] = 1.0;
  write_fld1(dir / "s.fld", f, 0.0);
  InitSpec spec;
  spec.kind = "file";
  spec.path = (dir / "s.fld").string();
  const auto F = make_initial(g, spec);
  CHECK(inverse(F).values[3] == doctest::Approx(1.0));
  CHECK_THROWS_AS(make_initial(build_grid(8, 8, 2.0, 1.0), spec), ConfigError);
}
