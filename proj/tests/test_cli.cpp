#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ureach/cli.hpp"
#include "ureach/model_io.hpp"

using namespace ureach;
namespace fs = std::filesystem;

namespace {

const fs::path kModels = UREACH_MODELS_DIR;

struct Run {
  int status = 0;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.status = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ureach_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string write_model(const std::string& name, const ModelSpec& m) {
  const fs::path p = scratch(name + ".json");
  std::ofstream(p) << serialize_model(m);
  return p.string();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

ModelSpec small_model(const Eigen::MatrixXd& a) {
  ModelSpec m;
  m.name = "small";
  m.a = a;
  m.step = 0.01;
  m.horizon = 20;
  m.initial = Boxd::Constant(a.rows(), Intervald(0.5, 1.0));
  return m;
}

}  // namespace

TEST_CASE("numeric reach csv") {
  const fs::path out = scratch("rotation.csv");
  const Run r = cli({"reach", (kModels / "rotation_2d.json").string(), "--out", out.string()});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("verdict: ") != std::string::npos);
  const auto rows = read_csv(out);
  REQUIRE(rows.size() == 2052);
  CHECK(rows[0] == std::vector<std::string>{"step", "lo_1", "hi_1", "lo_2", "hi_2", "gen_count"});
  for (std::size_t k = 1; k < rows.size(); ++k) REQUIRE(rows[k].size() == 6);
  CHECK(rows[1][0] == "0");
  CHECK(std::stod(rows[1][1]) == 0.9);
  CHECK(rows.back()[0] == "2050");
}

TEST_CASE("zero uncertainty matches the nominal flowpipe") {
  Eigen::MatrixXd a(2, 2);
  a << -1, -4, 4, -1;
  const ModelSpec m = small_model(a);
  const fs::path out = scratch("nominal.csv");
  REQUIRE(cli({"reach", write_model("nominal", m), "--out", out.string()}).status == 0);
  const auto rows = read_csv(out);
  const auto nominal = nominal_reach(discrete_system(m).a, m.initial, m.horizon);
  REQUIRE(rows.size() == nominal.num_steps() + 1);
  for (std::size_t k = 0; k < nominal.num_steps(); ++k) {
    for (int i = 0; i < 2; ++i) {
      CHECK(std::stod(rows[k + 1][1 + 2 * i]) == nominal.boxes[k](i).lo());
      CHECK(std::stod(rows[k + 1][2 + 2 * i]) == nominal.boxes[k](i).hi());
    }
  }
}

TEST_CASE("symbolic reach csv") {
  const fs::path out = scratch("loan.csv");
  const Run r = cli({"reach", (kModels / "rotation_2d.json").string(), "--method", "loan", "--norm",
                     "frobenius", "--out", out.string()});
  REQUIRE(r.status == 0);
  const auto rows = read_csv(out);
  REQUIRE(rows.size() == 2052);
  CHECK(rows[0] == std::vector<std::string>{"t", "phi", "radius", "lo_1", "hi_1", "lo_2", "hi_2"});
  CHECK(std::stod(rows[1][1]) == 0.0);

  const fs::path window = scratch("window.csv");
  REQUIRE(cli({"reach", (kModels / "rotation_2d.json").string(), "--method", "kagstrom1",
               "--t-start", "5", "--t-end", "5.5", "--out", window.string()})
              .status == 0);
  const auto wrows = read_csv(window);
  REQUIRE(wrows.size() == 52);
  CHECK(std::stod(wrows[1][0]) == doctest::Approx(5.0));
  CHECK(std::stod(wrows.back()[0]) == doctest::Approx(5.5));

  CHECK(cli({"reach", (kModels / "growth_1d.json").string(), "--method", "loan", "--out",
             scratch("x.csv").string()})
            .status != 0);
}

TEST_CASE("defective dynamics with kagstrom2") {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 0, 0;
  ModelSpec m = small_model(a);
  m.uncertainty = {{0, 1, 0.1}};
  const Run r = cli({"reach", write_model("jordan", m), "--method", "kagstrom2", "--out",
                     scratch("j.csv").string()});
  CHECK(r.status != 0);
  CHECK(r.err.find("kagstrom2") != std::string::npos);
}

TEST_CASE("order") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d.diagonal() << 2, 1;
  const fs::path out = scratch("order.json");
  REQUIRE(cli({"order", write_model("diag", small_model(d)), "--out", out.string()}).status == 0);
  const auto doc = read_json(out);
  CHECK(doc["ranking"][0] == nlohmann::json::array({0, 0}));
  CHECK(doc["top5"].size() == 4);
  CHECK(doc["scores"][0][0].get<double>() == doctest::Approx(2.0));

  // Relabelling the states permutes the ranking accordingly.
  Eigen::MatrixXd a(3, 3);
  a << 3, -1, 0.5, 0.2, 1.5, -0.7, 1.1, 0.3, -2;
  Eigen::PermutationMatrix<3> p;
  p.indices() << 2, 0, 1;
  const Eigen::MatrixXd pa = p * a * p.transpose();
  REQUIRE(cli({"order", write_model("a", small_model(a)), "--out", scratch("a.json").string()})
              .status == 0);
  REQUIRE(cli({"order", write_model("pa", small_model(pa)), "--out", scratch("pa.json").string()})
              .status == 0);
  const auto ra = read_json(scratch("a.json"))["ranking"];
  const auto rp = read_json(scratch("pa.json"))["ranking"];
  for (std::size_t k = 0; k < 9; ++k) {
    const int i = ra[k][0], j = ra[k][1];
    CHECK(rp[k] == nlohmann::json::array({p.indices()(i), p.indices()(j)}));
  }

  const Run id = cli({"order", write_model("id", small_model(Eigen::MatrixXd::Identity(2, 2)))});
  CHECK(id.status != 0);
  CHECK(id.err.find("error:") != std::string::npos);

  const Run disc = cli({"order", (kModels / "cruise_4d.json").string(), "--discrete"});
  CHECK(disc.status == 0);
  CHECK(nlohmann::json::parse(disc.out)["matrix"] == "discrete");
}

TEST_CASE("robust") {
  const fs::path out = scratch("robust.json");
  REQUIRE(cli({"robust", (kModels / "growth_1d.json").string(), "--scheme", "equal", "--step",
               "0.05", "--out", out.string()})
              .status == 0);
  const auto doc = read_json(out);
  CHECK(doc["norm"].get<double>() == 0.1);
  CHECK(doc["status"] == "found");
  CHECK(doc["trace"].size() == 4);
  CHECK(doc["trace"][3]["safe"] == false);

  ModelSpec unsafe = load_model(kModels / "growth_1d.json");
  unsafe.unsafe[0].offset = 0.5;
  const Run u = cli({"robust", write_model("unsafe", unsafe), "--step", "0.05"});
  REQUIRE(u.status == 0);
  const auto ud = nlohmann::json::parse(u.out);
  CHECK(ud["already_unsafe"] == true);
  CHECK(ud["norm"].get<double>() == 0.0);

  const Run cap = cli({"robust", (kModels / "growth_1d.json").string(), "--step", "0.001",
                       "--cap", "3", "--cell", "0,0"});
  REQUIRE(cap.status == 0);
  CHECK(nlohmann::json::parse(cap.out)["cap_reached"] == true);

  ModelSpec rot = load_model(kModels / "rotation_2d.json");
  rot.a(1, 0) = 2.0;
  rot.horizon = 150;
  rot.unsafe[0].offset = 1.2;
  const std::string path = write_model("rot_short", rot);
  const Run eq = cli({"robust", path, "--scheme", "equal", "--step", "0.1", "--cap", "50"});
  const Run hm = cli({"robust", path, "--scheme", "harmonic", "--step", "0.1", "--cap", "50"});
  REQUIRE(eq.status == 0);
  REQUIRE(hm.status == 0);
  const auto je = nlohmann::json::parse(eq.out), jh = nlohmann::json::parse(hm.out);
  CHECK(je["norm"].is_number());
  CHECK(jh["norm"].is_number());
  CHECK(je["scheme"] == "equal");
  CHECK(jh["scheme"] == "harmonic");
  CHECK(cli({"robust", path, "--scheme", "equal", "--step", "0.1", "--cap", "50"}).out == eq.out);

  CHECK(cli({"robust", (kModels / "growth_1d.json").string(), "--cell", "0;0"}).status != 0);
  CHECK(cli({"robust", (kModels / "growth_1d.json").string(), "--cell", "3,0"}).status != 0);
}

TEST_CASE("norms") {
  const Run r = cli({"norms", (kModels / "upper_triangular_2d.json").string()});
  REQUIRE(r.status == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["frobenius_sup"].get<double>() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(doc["two_norm_sup"].get<double>() == doctest::Approx(0.1).epsilon(1e-12));

  const Run lim = cli({"norms", (kModels / "cruise_4d.json").string(), "--limit", "3"});
  REQUIRE(lim.status == 0);
  CHECK(nlohmann::json::parse(lim.out)["two_norm_sup"].is_null());
}

TEST_CASE("usage errors") {
  CHECK(cli({}).status != 0);
  CHECK(cli({"launch"}).status != 0);
  CHECK(cli({"reach", (kModels / "rotation_2d.json").string()}).status != 0);
  CHECK(cli({"reach", (kModels / "rotation_2d.json").string(), "--method", "taylor", "--out",
             scratch("t.csv").string()})
            .status != 0);
  const Run missing = cli({"norms", (kModels / "nope.json").string()});
  CHECK(missing.status == 1);
  CHECK(missing.err.find("cannot open") != std::string::npos);
}

TEST_CASE("every shipped example runs end to end") {
  for (const auto& entry : fs::directory_iterator(kModels)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const std::string model = entry.path().string();
    CHECK(cli({"reach", model, "--out", scratch("e.csv").string()}).status == 0);
    CHECK(cli({"norms", model}).status == 0);
    const ModelSpec m = load_model(entry.path());
    if (m.continuous)
      CHECK(cli({"reach", model, "--method", "kagstrom1", "--out", scratch("s.csv").string()})
                .status == 0);
    if (m.dim() > 1) {
      // A scaled rotation has a repeated top singular value, so ordering must refuse it.
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.a);
      const auto& s = svd.singularValues();
      const Run order = cli({"order", model});
      if (s(0) - s(1) < 1e-10 * s(0)) {
        CHECK(order.status != 0);
        CHECK(order.err.find("not simple") != std::string::npos);
      } else {
        CHECK(order.status == 0);
      }
    }
  }
}

TEST_CASE("installed binary exit codes") {
  const std::string bin = UREACH_CLI_PATH;
  const std::string quiet = " > " + scratch("bin.log").string() + " 2>&1";
  CHECK(std::system((bin + " norms " + (kModels / "growth_1d.json").string() + quiet).c_str()) == 0);
  CHECK(std::system((bin + " norms " + (kModels / "nope.json").string() + quiet).c_str()) != 0);
}
