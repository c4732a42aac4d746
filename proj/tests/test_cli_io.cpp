#include "doctest.h"
#include "oracles.hpp"

#include "pcparam/commands.hpp"
#include "pcparam/config.hpp"
#include "pcparam/geometry.hpp"
#include "pcparam/io.hpp"
#include "pcparam/synthetic.hpp"

#include <sys/wait.h>

#include <atomic>
#include <cstring>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace pcparam;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() / ("pcparam_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
  int code;
  std::string out, log;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, log;
  const int code = run_cli(args, out, log);
  return {code, out.str(), log.str()};
}

// The real binary, for exit codes as seen by a shell.
int cli_process(const std::string& args) {
  const int status = std::system((std::string(PCPARAM_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, double> read_metrics(const std::string& path) {
  std::map<std::string, double> m;
  std::istringstream in(read_text(path));
  std::string line;
  std::getline(in, line);
  CHECK(line == "metric,value");
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    m[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
  }
  return m;
}

// Distinct values of the first CSV column, header skipped.
std::set<std::string> first_column(const std::string& path) {
  std::set<std::string> s;
  std::istringstream in(read_text(path));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line))
    if (!line.empty()) s.insert(line.substr(0, line.find(',')));
  return s;
}

// 3 -> (2) -> 2 sine network that is the identity on (x, y) up to O(eps^2).
NetworkParams near_identity_net() {
  NetworkSpec spec;
  spec.input_dim = 3;
  spec.hidden_widths = {2};
  spec.output_dim = 2;
  NetworkParams p = init_params(spec, 0);
  const double eps = 1e-4;
  p.values << eps, 0, 0, 0, eps, 0, 0, 0, 1 / eps, 0, 0, 1 / eps, 0, 0;
  return p;
}

Points planar_cloud(Eigen::Index n, std::uint64_t seed, double z) {
  std::mt19937_64 rng(seed);
  Points x(n, 3);
  x << oracle::uniform(rng, n, 2, -1.2, 1.2), Eigen::VectorXd::Constant(n, z);
  return x;
}

std::string small_run_config(const std::string& mode, const std::string& input) {
  return R"({
  "mode": ")" + mode + R"(",
  "input": ")" + input + R"(",
  "domain": "disk",
  "output_dir": "out",
  "seed": 4,
  "stages": {"epochs": 4, "epochs_min": 1, "batch_x": 16, "batch_w": 16},
  "optimizer": {"lr": 0.001},
  "map_net": {"hidden_widths": [8, 8]},
  "lambda_net": {"hidden_widths": [4]},
  "eval_samples": 200
}
)";
}

}  // namespace

TEST_CASE("fit reports missing files with exit code 2") {
  TempDir dir;
  const Run missing_config = cli({"fit", "--config", dir / "absent.json"});
  CHECK(missing_config.code == kExitUsage);
  CHECK(missing_config.log.find("absent.json") != std::string::npos);

  write_text(dir / "run.json", small_run_config("fixed_boundary", "no_such_cloud.xyz"));
  const Run missing_input = cli({"fit", "--config", dir / "run.json"});
  CHECK(missing_input.code == kExitUsage);
  CHECK(missing_input.log.find("no_such_cloud.xyz") != std::string::npos);

  CHECK(cli_process("fit --config " + (dir / "absent.json")) == kExitUsage);
  CHECK(cli_process("no-such-verb") == kExitUsage);
  CHECK(cli_process("--help") == kExitOk);
}

TEST_CASE("config errors carry the line number") {
  TempDir dir;
  write_text(dir / "bad.json", "{\n  \"mode\": \"free_boundary\",\n  \"epochs\": 3\n}\n");
  const Run r = cli({"fit", "--config", dir / "bad.json"});
  CHECK(r.code == kExitUsage);
  CHECK(r.log.find("bad.json:3") != std::string::npos);
  CHECK(r.log.find("epochs") != std::string::npos);

  write_text(dir / "type.json", "{\n  \"stages\": {\n    \"batch_x\": \"many\"\n  }\n}\n");
  CHECK(cli({"fit", "--config", dir / "type.json"}).log.find("type.json:3") != std::string::npos);

  write_text(dir / "syntax.json", "{\n  \"mode\": \"landmark\",\n  oops\n}\n");
  const Run s = cli({"fit", "--config", dir / "syntax.json"});
  CHECK(s.code == kExitUsage);
  CHECK(s.log.find("syntax.json:3") != std::string::npos);

  CHECK_THROWS_AS(parse_run_config(R"({"mode": "sideways"})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"optimizer": {"lr": -1}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"stages": {"sigma_min": 0}})"), ConfigError);
}

TEST_CASE("effective config") {
  TempDir dir;
  SUBCASE("defaults") {
    write_text(dir / "empty.json", "{}\n");
    const Run fixed = cli({"fit", "--config", dir / "empty.json", "--print-effective-config"});
    REQUIRE(fixed.code == kExitOk);
    CHECK(nlohmann::json::parse(fixed.out)["mode"] == "fixed_boundary");
    // Landmark mode keeps all three weights.
    write_text(dir / "landmark.json", R"({"mode": "landmark"})");
    const Run r = cli({"fit", "--config", dir / "landmark.json", "--print-effective-config"});
    REQUIRE(r.code == kExitOk);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["objective"]["beta1"] == 5.0);
    CHECK(j["objective"]["beta2"] == 1.0);
    CHECK(j["objective"]["beta3"] == 1.0);
    CHECK(j["stages"]["epochs"] == 10000);
    CHECK(j["stages"]["batch_x"] == 1024);
    CHECK(j["stages"]["batch_w"] == 1024);
    CHECK(j["stages"]["sigma"] == 0.5);
    CHECK(j["stages"]["alpha_initial"] == 2.0);
    CHECK(j["stages"]["alpha_final"] == 20.0);
    CHECK(j["stages"]["sigma_min"] == 0.001);
    CHECK(j["stages"]["alpha_max"] == 100.0);
    CHECK(j["stages"]["epochs_min"] == 1000);
    CHECK(j["optimizer"]["lr"] == 1e-4);
    CHECK(j["optimizer"]["rho"] == 0.99);
    CHECK(j["optimizer"]["momentum"] == 0.9);
    CHECK(j["map_net"]["hidden_widths"] == std::vector<int>(5, 256));
    CHECK(j["lambda_net"]["hidden_widths"] == std::vector<int>(3, 128));
    CHECK(j["lambda_net"]["output_activation"] == "softplus");
  }
  SUBCASE("mode contract") {
    write_text(dir / "free.json", R"({"mode": "free_boundary", "objective": {"beta2": 7, "beta3": 3}})");
    const nlohmann::json free = nlohmann::json::parse(cli({"fit", "--config", dir / "free.json", "--print-effective-config"}).out);
    CHECK(free["objective"]["beta2"] == 0.0);
    CHECK(free["objective"]["beta3"] == 0.0);
    CHECK(free["objective"]["beta1"] == 5.0);

    write_text(dir / "shape.json", R"({"mode": "shape_matching", "map_net": {"input_dim": 2}})");
    const nlohmann::json shape = nlohmann::json::parse(cli({"fit", "--config", dir / "shape.json", "--print-effective-config"}).out);
    CHECK(shape["objective"]["beta1"] == 0.0);
    CHECK(shape["lambda_net"].is_null());

    write_text(dir / "fixed.json", R"({"mode": "fixed_boundary", "objective": {"beta3": 3}})");
    const nlohmann::json fixed = nlohmann::json::parse(cli({"fit", "--config", dir / "fixed.json", "--print-effective-config"}).out);
    CHECK(fixed["objective"]["beta3"] == 0.0);
    CHECK(fixed["objective"]["beta2"] == 1.0);
  }
  SUBCASE("round trip") {
    for (const std::string mode : {"shape_matching", "free_boundary", "fixed_boundary", "landmark"}) {
      CAPTURE(mode);
      RunConfig c = parse_run_config(R"({"mode": ")" + mode + R"(", "seed": 17, "stages": {"sigma": 0.25}})");
      if (mode == "shape_matching") c.map_net.input_dim = 2;
      const RunConfig e = c.effective();
      const nlohmann::json j = to_json(e);
      const RunConfig back = parse_run_config(j.dump(2), "roundtrip");
      CHECK(to_json(back.effective()) == j);
      CHECK(to_json(back) == j);
    }
  }
  SUBCASE("relative paths follow the config file") {
    fs::create_directories(dir.path / "sub");
    write_text(dir / "sub/run.json", R"({"input": "cloud.xyz", "output_dir": "out", "domain": "shapes/d.json"})");
    const RunConfig c = load_run_config(dir / "sub/run.json");
    CHECK(fs::path(c.input) == dir.path / "sub" / "cloud.xyz");
    CHECK(fs::path(c.output_dir) == dir.path / "sub" / "out");
    CHECK(fs::path(c.domain) == dir.path / "sub" / "shapes" / "d.json");
    write_text(dir / "sub/preset.json", R"({"domain": "smiling_face"})");
    CHECK(load_run_config(dir / "sub/preset.json").domain == "smiling_face");
  }
}

TEST_CASE("fit writes deterministic artifacts") {
  TempDir dir;
  const TriangleMesh face = face_like_surface(0.25, 3);
  write_points(dir / "cloud.xyz", face.vertices);
  write_mesh(dir / "face.obj", face);
  std::string text = small_run_config("fixed_boundary", "cloud.xyz");
  text.insert(text.find("\"domain\""), "\"reference_mesh\": \"face.obj\",\n  ");
  write_text(dir / "run.json", text);

  const Run first = cli({"fit", "--config", dir / "run.json", "--output", dir / "a"});
  REQUIRE(first.code == kExitOk);
  REQUIRE(cli({"fit", "--config", dir / "run.json", "--output", dir / "b"}).code == kExitOk);
  for (const std::string f : {"train_log.csv", "map.json", "lambda.json", "mapped.csv", "checkpoints/stage_1_map.json"}) {
    CAPTURE(f);
    CHECK(read_text(dir / ("a/" + f)) == read_text(dir / ("b/" + f)));
  }
  const TrainLog log = read_train_log(dir / "a/train_log.csv");
  REQUIRE(!log.stages.empty());
  CHECK(log.stages.back().batch_x == face.num_vertices());
  CHECK(std::isfinite(log.stages.back().mean_abs_angle));
  CHECK(fs::exists(dir / "a/checkpoints/stage_1_map.json"));
  CHECK(fs::exists(dir / "a/checkpoints/stage_1_lambda.json"));
  CHECK(read_points(dir / "a/mapped.csv").rows() == face.num_vertices());
  CHECK(first.log.find("stage 1") != std::string::npos);
}

TEST_CASE("eval matches the library") {
  TempDir dir;
  const TriangleMesh face = face_like_surface(0.2, 5);
  write_points(dir / "cloud.csv", face.vertices);
  write_mesh(dir / "face.off", face);
  NetworkSpec spec;
  spec.hidden_widths = {6, 6};
  const NetworkParams net = init_params(spec, 9);
  save_checkpoint(dir / "map.json", net);

  const Run r = cli({"eval", "--map", dir / "map.json", "--cloud", dir / "cloud.csv", "--mesh", dir / "face.off",
                     "--domain", "disk", "--samples", "300", "--seed", "8", "--bins", "12", "--output",
                     dir / "metrics.csv", "--histogram", dir / "hist.csv"});
  REQUIRE(r.code == kExitOk);
  const auto m = read_metrics(dir / "metrics.csv");
  const Points mapped = forward(net, face.vertices);
  CHECK(m.at("hausdorff") == hausdorff_exact(mapped, sample_area(unit_disk(), 300, 8)));
  const AngleDistortionReport rep = angle_distortion(face, mapped, {12, -std::numbers::pi, std::numbers::pi});
  CHECK(m.at("mean_abs_angle") == rep.mean_abs);
  CHECK(m.at("corners") == static_cast<double>(3 * face.num_triangles()));
  CHECK(m.at("domain_sample_gap") > 0.0);

  long total = 0;
  int rows = 0;
  std::istringstream in(read_text(dir / "hist.csv"));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    total += std::stol(line.substr(line.rfind(',') + 1));
    ++rows;
  }
  CHECK(rows == 12);
  CHECK(total == 3 * face.num_triangles());

  // A 2D-input checkpoint cannot read a 3D cloud.
  NetworkSpec flat = spec;
  flat.input_dim = 2;
  save_checkpoint(dir / "flat.json", init_params(flat, 1));
  const Run bad = cli({"eval", "--map", dir / "flat.json", "--cloud", dir / "cloud.csv", "--output", dir / "m2.csv"});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.log.find("2D input") != std::string::npos);
}

TEST_CASE("eval of a near-identity map on a planar cloud sees only sampling gaps") {
  TempDir dir;
  // Cloud dense in the square that the domain also covers.
  std::mt19937_64 rng(6);
  Points x(3000, 3);
  x << oracle::uniform(rng, 3000, 2, 0, 1), Eigen::VectorXd::Zero(3000);
  write_points(dir / "plane.xyz", x);
  save_checkpoint(dir / "id.json", near_identity_net());
  REQUIRE(cli({"eval", "--map", dir / "id.json", "--cloud", dir / "plane.xyz", "--domain", "square", "--samples", "3000",
               "--output", dir / "m.csv"})
              .code == kExitOk);
  const auto m = read_metrics(dir / "m.csv");
  CHECK(m.at("hausdorff") < 0.05);
  CHECK(m.count("mean_abs_angle") == 0);
}

TEST_CASE("boundary command") {
  TempDir dir;
  std::mt19937_64 rng(7);
  write_points(dir / "square.csv", oracle::uniform(rng, 200, 2));
  const Run hull = cli({"boundary", "--mapped", dir / "square.csv", "--threshold", "1000", "--output", dir / "hull.csv",
                        "--svg", dir / "hull.svg"});
  REQUIRE(hull.code == kExitOk);
  CHECK(first_column(dir / "hull.csv").size() == 1);
  CHECK(read_text(dir / "hull.svg").find("<svg") != std::string::npos);

  write_points(dir / "annulus.csv", annulus_cloud(0.05, 0.4, 1.0, 2));
  REQUIRE(cli({"boundary", "--mapped", dir / "annulus.csv", "--threshold", "0.1", "--output", dir / "ann.csv"}).code ==
          kExitOk);
  CHECK(first_column(dir / "ann.csv").size() == 2);

  const Run tiny = cli({"boundary", "--mapped", dir / "square.csv", "--threshold", "1e-9", "--output", dir / "t.csv"});
  CHECK(tiny.code == kExitUsage);
  CHECK(tiny.log.find("threshold") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "t.csv"));
  CHECK(cli({"boundary", "--mapped", dir / "square.csv", "--threshold", "-1", "--output", dir / "t.csv"}).code == kExitUsage);
  CHECK(cli({"boundary", "--threshold", "1", "--output", dir / "t.csv"}).code == kExitUsage);
}

TEST_CASE("reconstruct command") {
  TempDir dir;
  write_points(dir / "plane.xyz", planar_cloud(1500, 8, 0.3));
  save_checkpoint(dir / "id.json", near_identity_net());

  const Run no_lambda = cli({"reconstruct", "--map", dir / "id.json", "--cloud", dir / "plane.xyz", "--mode", "lambda",
                             "--output", dir / "r.obj"});
  CHECK(no_lambda.code == kExitUsage);
  CHECK(no_lambda.log.find("--lambda") != std::string::npos);

  REQUIRE(cli({"reconstruct", "--map", dir / "id.json", "--cloud", dir / "plane.xyz", "--domain", "disk", "--mode",
               "uniform", "--target-edge", "0.1", "--output", dir / "r.obj"})
              .code == kExitOk);
  const TriangleMesh m = read_mesh(dir / "r.obj");
  REQUIRE(m.num_triangles() > 100);
  CHECK((m.vertices.col(2).array() - 0.3).abs().maxCoeff() < 1e-12);
  CHECK_NOTHROW(m.validate());
  write_mesh(dir / "again.obj", m);
  CHECK(read_text(dir / "again.obj") == read_text(dir / "r.obj"));

  // Lambda mode with a softplus field network.
  NetworkSpec ls;
  ls.hidden_widths = {4};
  ls.output_dim = 1;
  ls.output_activation = OutputActivation::Softplus;
  save_checkpoint(dir / "lambda.json", init_params(ls, 2));
  CHECK(cli({"reconstruct", "--map", dir / "id.json", "--lambda", dir / "lambda.json", "--cloud", dir / "plane.xyz",
             "--mode", "lambda", "--target-edge", "0.1", "--output", dir / "l.off"})
            .code == kExitOk);
  CHECK(read_mesh(dir / "l.off").num_triangles() > 100);
}

TEST_CASE("plot command") {
  TempDir dir;
  write_train_log(dir / "empty.csv", TrainLog{});
  const Run empty = cli({"plot", "--kind", "stage_lines", "--input", dir / "empty.csv", "--output", dir / "e.svg"});
  CHECK(empty.code == kExitOk);
  CHECK(read_text(dir / "e.svg").find("<svg") != std::string::npos);

  TrainLog log;
  for (int s = 1; s <= 3; ++s) {
    StageRecord r;
    r.stage = s;
    r.hausdorff = 0.3 / s;
    r.mean_abs_angle = 0.2 / s;
    log.stages.push_back(r);
  }
  write_train_log(dir / "log.csv", log);
  REQUIRE(cli({"plot", "--kind", "stage_lines", "--input", dir / "log.csv", "--output", dir / "a.svg"}).code == kExitOk);
  REQUIRE(cli({"plot", "--kind", "stage_lines", "--input", dir / "log.csv", "--output", dir / "b.svg"}).code == kExitOk);
  CHECK(read_text(dir / "a.svg") == read_text(dir / "b.svg"));

  write_text(dir / "values.csv", "triangle,corner,diff\n0,0,0.1\n0,1,-0.2\n0,2,0.05\n");
  REQUIRE(cli({"plot", "--kind", "histogram", "--input", dir / "values.csv", "--bins", "7", "--output", dir / "h.svg"})
              .code == kExitOk);
  CHECK(read_text(dir / "h.svg").find("data-bins=\"7\"") != std::string::npos);

  write_points(dir / "pts.csv", Points::Zero(0, 2));
  CHECK(cli({"plot", "--kind", "scatter", "--input", dir / "pts.csv", "--output", dir / "s.svg"}).code == kExitOk);

  write_text(dir / "broken.csv", "diff\n0.1\nabc\n");
  const Run broken = cli({"plot", "--kind", "histogram", "--input", dir / "broken.csv", "--output", dir / "x.svg"});
  CHECK(broken.code == kExitUsage);
  CHECK(broken.log.find("line 3") != std::string::npos);
}

TEST_CASE("sample-domain, synth and audit commands") {
  TempDir dir;
  REQUIRE(cli({"sample-domain", "--domain", "smiling_face", "--n", "80", "--seed", "3", "--output", dir / "s.csv"}).code ==
          kExitOk);
  const Points s = read_points(dir / "s.csv");
  CHECK(s == sample_area(smiling_face(), 80, 3));
  REQUIRE(cli({"sample-domain", "--domain", "disk", "--n", "4", "--boundary", "--equal", "--output", dir / "b.csv"}).code ==
          kExitOk);
  CHECK((read_points(dir / "b.csv").rowwise().norm().array() - 1).abs().maxCoeff() < 1e-12);
  CHECK(cli({"sample-domain", "--domain", "hexagon", "--output", dir / "x.csv"}).code == kExitUsage);

  REQUIRE(cli({"synth", "--kind", "face", "--spacing", "0.2", "--seed", "1", "--output", dir / "f.xyz", "--mesh",
               dir / "f.obj"})
              .code == kExitOk);
  CHECK(read_mesh(dir / "f.obj").vertices == read_points(dir / "f.xyz"));

  const Run audit = cli({"audit", "--trials", "30", "--seed", "2"});
  CHECK(audit.code == kExitOk);
  CHECK(audit.out.find("boltzmann: 30 trials, 0 violations") != std::string::npos);
  CHECK(audit.out.find("theorem: 30 trials, 0 violations") != std::string::npos);
}

TEST_CASE("point and mesh files round-trip") {
  TempDir dir;
  std::mt19937_64 rng(9);
  const Points p = oracle::uniform(rng, 25, 3, -1e3, 1e3);
  for (const std::string ext : {".xyz", ".csv"}) {
    write_points(dir / ("p" + ext), p);
    CHECK(read_points(dir / ("p" + ext)) == p);
  }
  write_text(dir / "header.csv", "x,y\n1,2\n3.5,-4e-3\n");
  CHECK(read_points(dir / "header.csv") == (Points(2, 2) << 1, 2, 3.5, -4e-3).finished());

  write_text(dir / "ragged.xyz", "1 2 3\n4 5\n");
  try {
    read_points(dir / "ragged.xyz");
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("ragged.xyz") != std::string::npos);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(read_points(dir / "absent.xyz"), IoError);

  const TriangleMesh face = face_like_surface(0.3, 2);
  for (const std::string ext : {".obj", ".off"}) {
    write_mesh(dir / ("m" + ext), face);
    const TriangleMesh back = read_mesh(dir / ("m" + ext));
    CHECK(back.vertices == face.vertices);
    CHECK(back.triangles == face.triangles);
  }
  write_text(dir / "slashes.obj", "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvt 0 0\nf 1/1/1 2/1/1 3/1/1\nf 1//1 3//1 4//1\n");
  const TriangleMesh q = read_mesh(dir / "slashes.obj");
  CHECK(q.num_triangles() == 2);
  CHECK(q.triangles.row(1) == Eigen::RowVector3i(0, 2, 3));
  write_text(dir / "out_of_range.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n");
  CHECK_THROWS_AS(read_mesh(dir / "out_of_range.obj"), IoError);
}

TEST_CASE("checkpoints, domains, landmarks and logs round-trip") {
  TempDir dir;
  NetworkSpec spec = inverse_lambda_net_spec();
  spec.hidden_widths = {5, 3};
  spec.omega = 2.5;
  const NetworkParams net = init_params(spec, 4);
  save_checkpoint(dir / "net.json", net);
  const NetworkParams back = load_checkpoint(dir / "net.json");
  CHECK(back.spec == net.spec);
  CHECK(back.values == net.values);
  write_text(dir / "short.json", [&] {
    nlohmann::json j = to_json(net);
    j["params"].erase(0);
    return j.dump();
  }());
  CHECK_THROWS(load_checkpoint(dir / "short.json"));

  std::mt19937_64 rng(10);
  for (const std::string& name : domain_preset_names()) {
    CAPTURE(name);
    const DomainSpec d = domain_preset(name);
    save_domain(dir / (name + ".json"), d);
    const DomainSpec r = load_domain(dir / (name + ".json"));
    CHECK(r.area() == d.area());
    CHECK(to_json(r) == to_json(d));
    CHECK(to_json(load_domain(name)) == to_json(d));
  }
  CHECK_THROWS(load_domain("not_a_preset"));

  write_text(dir / "lm.json", R"({"regions": [[0, 1, 2], [3]], "targets": ["lines", [[0.5, 0.25], [0.1, -0.2]]]})");
  const LandmarkSet lm = load_landmarks(dir / "lm.json");
  REQUIRE(lm.size() == 2);
  CHECK(lm.targets[0].rows() == 400);
  CHECK(lm.targets[1] == (Points(2, 2) << 0.5, 0.25, 0.1, -0.2).finished());
  CHECK(lm.regions[0] == std::vector<int>{0, 1, 2});
  write_text(dir / "lm_bad.json", R"({"regions": [[0]], "targets": ["circles"]})");
  CHECK_THROWS(load_landmarks(dir / "lm_bad.json"));

  TrainLog log;
  StageRecord r;
  r.stage = 2;
  r.sigma = 0.5 / std::sqrt(2.0);
  r.alpha_initial = 4;
  r.alpha_final = 40;
  r.batch_x = 17;
  r.batch_w = 33;
  r.epochs = 5;
  r.loss.total = 1.0 / 3;
  r.loss.leg = 0.1;
  r.loss.hand = 0.2;
  r.hausdorff = 0.123456789;
  log.stages.push_back(r);
  write_train_log(dir / "log.csv", log);
  const TrainLog lb = read_train_log(dir / "log.csv");
  REQUIRE(lb.stages.size() == 1);
  CHECK(lb.stages[0].sigma == r.sigma);
  CHECK(lb.stages[0].loss.total == r.loss.total);
  CHECK(lb.stages[0].batch_w == 33);
  CHECK(lb.stages[0].hausdorff == r.hausdorff);
  CHECK(std::isnan(lb.stages[0].mean_abs_angle));
}

TEST_CASE("shortest round-trip number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-1e-300) == "-1e-300");
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int t = 0; t < 10000; ++t) {
    double v;
    const std::uint64_t b = bits(rng);
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}
