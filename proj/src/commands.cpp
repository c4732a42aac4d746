#include "pcparam/commands.hpp"

#include "pcparam/boltzmann.hpp"
#include "pcparam/config.hpp"
#include "pcparam/geometry.hpp"
#include "pcparam/io.hpp"
#include "pcparam/meshing.hpp"
#include "pcparam/svg.hpp"
#include "pcparam/synthetic.hpp"
#include "pcparam/train.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>

namespace pcparam {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Audits

AuditSummary audit_boltzmann_random(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(2, 64);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  const double alphas[] = {1.0, 2.0, 5.0, 10.0, 50.0};
  AuditSummary s;
  s.worst_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const int n = size(rng);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = value(rng);
    // Plant repeated extremes.
    const int m = std::uniform_int_distribution<int>(1, std::max(1, n / 4))(rng);
    const int l = std::uniform_int_distribution<int>(1, std::max(1, n / 4))(rng);
    for (int i = 0; i < m; ++i) x(i) = 1.0;
    for (int i = 0; i < l && m + i < n - 1; ++i) x(n - 1 - i) = -1.0;
    std::shuffle(x.data(), x.data() + n, rng);
    if (x.maxCoeff() == x.minCoeff()) continue;
    const double alpha = alphas[t % 5];
    const BoltzmannBoundAudit a = audit_boltzmann_bound(x, alpha);
    ++s.trials;
    if (!a.holds()) ++s.violations;
    s.worst_margin = std::min({s.worst_margin, a.max_bound - a.max_error, a.min_bound - a.min_error});
  }
  return s;
}

AuditSummary audit_theorem_random(int trials, std::uint64_t seed, int points) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  AuditSummary s;
  s.worst_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    Points xy(points, 2);
    for (int i = 0; i < points; ++i) xy.row(i) << u(rng), u(rng);
    TriangleMesh mesh{Points(points, 3), delaunay(xy).mesh.triangles};
    const double amp = 0.2 * u(rng);
    for (int i = 0; i < points; ++i)
      mesh.vertices.row(i) << xy(i, 0), xy(i, 1), amp * std::sin(3.0 * xy(i, 0)) * std::cos(2.0 * xy(i, 1));
    const double scale = 0.5 + u(rng);
    const double jitter = 0.02 * u(rng);
    Points mapped = scale * xy;
    for (int i = 0; i < points; ++i) mapped.row(i) += jitter * Eigen::RowVector2d(noise(rng), noise(rng));
    Eigen::VectorXd lambda_inv(points);
    for (int i = 0; i < points; ++i) lambda_inv(i) = (0.4 + 0.2 * u(rng)) / scale;
    const LegConfig cfg{0.1 + 0.5 * u(rng)};
    const BoundAuditReport r = audit_theorem_bound(mesh, mapped, lambda_pair_from_inverse(lambda_inv), cfg);
    ++s.trials;
    if (!r.holds) ++s.violations;
    s.worst_margin = std::min(s.worst_margin, r.lhs - r.rhs);
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void apply_thread_env() {
  if (const char* v = std::getenv("PCPARAM_THREADS")) {
    const int n = std::atoi(v);
    if (n > 0) Eigen::setNbThreads(n);
  }
}

Points load_cloud(const std::string& path) {
  Points p = read_points(path);
  PointCloud checked(p);
  return p;
}

Points mapped_from(const std::string& map_ckpt, const std::string& mapped_csv, const std::string& cloud) {
  if (!mapped_csv.empty()) return read_points(mapped_csv);
  if (map_ckpt.empty() || cloud.empty()) throw UsageError("give --mapped, or --map together with --cloud");
  const NetworkParams net = load_checkpoint(map_ckpt);
  const Points x = load_cloud(cloud);
  if (net.spec.input_dim != x.cols())
    throw UsageError("checkpoint expects " + std::to_string(net.spec.input_dim) + "D input but '" + cloud + "' is " +
                     std::to_string(x.cols()) + "D");
  return forward(net, x);
}

std::string metrics_csv(const std::vector<std::pair<std::string, double>>& rows) {
  std::ostringstream out;
  out << "metric,value\n";
  for (const auto& [k, v] : rows) out << k << ',' << format_double(v) << '\n';
  return out.str();
}

int cmd_fit(const std::string& config_path, const std::string& output_override, bool print_only, std::ostream& out,
            std::ostream& log) {
  RunConfig cfg = load_run_config(config_path);
  if (!output_override.empty()) cfg.output_dir = output_override;
  RunConfig eff;
  try {
    eff = cfg.effective();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(config_path + ": " + e.what());
  }
  if (print_only) {
    out << to_json(eff).dump(2) << '\n';
    return kExitOk;
  }
  if (eff.input.empty()) throw ConfigError(config_path + ": 'input' is required");

  const Points cloud = load_cloud(eff.input);
  const TrainMode mode = eff.mode;
  std::optional<DomainSpec> domain;
  if (mode != TrainMode::FreeBoundary || !eff.domain.empty()) domain = load_domain(eff.domain);
  std::optional<TriangleMesh> reference;
  if (!eff.reference_mesh.empty()) reference = read_mesh(eff.reference_mesh);
  std::optional<LandmarkSet> landmarks;
  if (!eff.landmarks.empty()) landmarks = load_landmarks(eff.landmarks);
  if (mode == TrainMode::Landmark && !landmarks) throw ConfigError(config_path + ": landmark mode needs 'landmarks'");

  const fs::path dir = eff.output_dir;
  TrainOptions opt;
  opt.mode = mode;
  opt.objective = eff.objective;
  opt.stages = eff.stages;
  opt.optimizer = eff.optimizer;
  opt.map_net = eff.map_net;
  opt.lambda_net = eff.lambda_net;
  opt.fixed_lambda_inv = eff.fixed_lambda_inv;
  opt.domain_pool = eff.domain_pool;
  opt.domain_points = eff.domain_points;
  opt.eval_samples = eff.eval_samples;
  opt.seed = eff.seed;
  opt.on_stage = [&](const StageRecord& r, const NetworkParams& map, const NetworkParams* lambda) {
    log << "stage " << r.stage << ": epochs " << r.epochs << ", batch " << r.batch_x << ", loss "
        << format_double(r.loss.total) << ", hausdorff " << format_double(r.hausdorff) << '\n';
    const std::string stem = "stage_" + std::to_string(r.stage);
    save_checkpoint(dir / "checkpoints" / (stem + "_map.json"), map);
    if (lambda) save_checkpoint(dir / "checkpoints" / (stem + "_lambda.json"), *lambda);
  };

  TrainInputs in;
  in.cloud = &cloud;
  in.domain = domain ? &*domain : nullptr;
  in.landmarks = landmarks ? &*landmarks : nullptr;
  in.reference = reference ? &*reference : nullptr;
  const TrainResult result = train(in, opt);

  write_train_log(dir / "train_log.csv", result.log);
  save_checkpoint(dir / "map.json", result.map_net);
  if (result.lambda_net) save_checkpoint(dir / "lambda.json", *result.lambda_net);
  write_points(dir / "mapped.csv", forward(result.map_net, cloud));
  write_text(dir / "effective_config.json", to_json(eff).dump(2) + "\n");
  log << "wrote " << (dir / "train_log.csv").string() << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& map_ckpt, const std::string& cloud_path, const std::string& mesh_path,
             const std::string& domain_name, Eigen::Index samples, int bins, std::uint64_t seed,
             const std::string& output, const std::string& hist_output, std::ostream& log) {
  const NetworkParams net = load_checkpoint(map_ckpt);
  const Points cloud = load_cloud(cloud_path);
  if (net.spec.input_dim != cloud.cols())
    throw UsageError("checkpoint expects " + std::to_string(net.spec.input_dim) + "D input but the cloud is " +
                     std::to_string(cloud.cols()) + "D");
  const DomainSpec domain = load_domain(domain_name);
  const Points mapped = forward(net, cloud);
  const Points dense = sample_area(domain, samples, seed);
  const Points denser = sample_area(domain, 4 * samples, seed + 1);

  std::vector<std::pair<std::string, double>> rows;
  rows.emplace_back("hausdorff", hausdorff_exact(mapped, dense));
  rows.emplace_back("hausdorff_denser", hausdorff_exact(mapped, denser));
  rows.emplace_back("domain_sample_gap", directed_hausdorff(denser, dense));
  rows.emplace_back("points", static_cast<double>(cloud.rows()));
  if (!mesh_path.empty()) {
    const TriangleMesh ref = read_mesh(mesh_path);
    const AngleDistortionReport rep = angle_distortion(ref, mapped, {bins, -std::numbers::pi, std::numbers::pi});
    rows.emplace_back("mean_abs_angle", rep.mean_abs);
    rows.emplace_back("corners", static_cast<double>(rep.per_corner.size()));
    if (!hist_output.empty()) {
      std::ostringstream h;
      h << "bin_lo,bin_hi,count\n";
      for (std::size_t b = 0; b < rep.histogram.counts.size(); ++b)
        h << format_double(rep.histogram.edges[b]) << ',' << format_double(rep.histogram.edges[b + 1]) << ','
          << rep.histogram.counts[b] << '\n';
      write_text(hist_output, h.str());
      std::ostringstream c;
      c << "triangle,corner,diff\n";
      for (const auto& d : rep.per_corner) c << d.triangle << ',' << d.corner << ',' << format_double(d.diff) << '\n';
      write_text(fs::path(hist_output).replace_extension(".corners.csv"), c.str());
    }
  }
  write_text(output, metrics_csv(rows));
  log << "wrote " << output << '\n';
  return kExitOk;
}

std::vector<double> last_column(const std::string& path) {
  const std::string text = read_text(path);
  std::istringstream in(text);
  std::string line;
  std::vector<double> values;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string cell = line.substr(line.rfind(',') == std::string::npos ? 0 : line.rfind(',') + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      values.push_back(v);
    } catch (const std::exception&) {
      if (lineno == 1) continue;
      throw IoError("'" + path + "' line " + std::to_string(lineno) + ": not a number");
    }
  }
  return values;
}

int dispatch(CLI::App& app, const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
  app.require_subcommand(1);

  // fit
  std::string config_path, output_dir;
  bool print_config = false;
  auto* fit = app.add_subcommand("fit", "Train the parametrization networks from a run config");
  fit->add_option("--config", config_path, "Run config JSON")->required();
  fit->add_option("--output", output_dir, "Override the output directory");
  fit->add_flag("--print-effective-config", print_config, "Print the effective config and exit");

  // eval
  std::string map_ckpt, cloud, mesh, domain = "disk", output, hist_output;
  Eigen::Index samples = 4000;
  int bins = 60;
  std::uint64_t seed = 0;
  auto* eval = app.add_subcommand("eval", "Hausdorff and angle-distortion metrics of a trained map");
  eval->add_option("--map", map_ckpt, "Map checkpoint")->required();
  eval->add_option("--cloud", cloud, "Point cloud (.xyz or .csv)")->required();
  eval->add_option("--mesh", mesh, "Reference mesh (.obj or .off)");
  eval->add_option("--domain", domain, "Domain preset or JSON file");
  eval->add_option("--samples", samples, "Dense domain sample size");
  eval->add_option("--bins", bins, "Angle histogram bins");
  eval->add_option("--seed", seed, "Sampling seed");
  eval->add_option("--output", output, "Metrics CSV")->required();
  eval->add_option("--histogram", hist_output, "Angle histogram CSV");

  // map
  auto* map = app.add_subcommand("map", "Apply a map checkpoint to a cloud");
  map->add_option("--map", map_ckpt, "Map checkpoint")->required();
  map->add_option("--cloud", cloud, "Point cloud")->required();
  map->add_option("--output", output, "Mapped points CSV")->required();

  // boundary
  std::string mapped_csv, svg_output;
  double h = 0.0;
  auto* boundary = app.add_subcommand("boundary", "Boundary loops of a mapped cloud by long-edge pruning");
  boundary->add_option("--map", map_ckpt, "Map checkpoint");
  boundary->add_option("--cloud", cloud, "Point cloud (with --map)");
  boundary->add_option("--mapped", mapped_csv, "Mapped 2D points instead of a checkpoint");
  boundary->add_option("--threshold", h, "Edge length threshold h")->required();
  boundary->add_option("--output", output, "Boundary loops CSV")->required();
  boundary->add_option("--svg", svg_output, "Overlay SVG");

  // reconstruct
  std::string lambda_ckpt, mode = "uniform";
  double target_edge = 0.1;
  auto* recon = app.add_subcommand("reconstruct", "Surface mesh from a parameter-domain mesh and the inverse map");
  recon->add_option("--map", map_ckpt, "Map checkpoint")->required();
  recon->add_option("--lambda", lambda_ckpt, "Inverse-scale checkpoint (lambda mode)");
  recon->add_option("--cloud", cloud, "Point cloud")->required();
  recon->add_option("--domain", domain, "Domain preset or JSON file");
  recon->add_option("--mode", mode, "uniform or lambda")->check(CLI::IsMember({"uniform", "lambda"}));
  recon->add_option("--target-edge", target_edge, "Median parameter-domain edge length");
  recon->add_option("--seed", seed, "Sampling seed");
  recon->add_option("--output", output, "Mesh (.obj or .off)")->required();

  // sample-domain
  Eigen::Index n = 1000;
  bool on_boundary = false, equal = false;
  auto* sample = app.add_subcommand("sample-domain", "Sample points from a parameter domain");
  sample->add_option("--domain", domain, "Domain preset or JSON file");
  sample->add_option("--n", n, "Number of points");
  sample->add_option("--seed", seed, "Seed");
  sample->add_flag("--boundary", on_boundary, "Sample the boundary instead of the area");
  sample->add_flag("--equal", equal, "Equal arc-length spacing on the boundary");
  sample->add_option("--output", output, "Points CSV")->required();

  // plot
  std::string kind, input;
  auto* plot = app.add_subcommand("plot", "Render a training log, mapped cloud or value histogram as SVG");
  plot->add_option("--kind", kind, "stage_lines, scatter or histogram")
      ->required()
      ->check(CLI::IsMember({"stage_lines", "scatter", "histogram"}));
  plot->add_option("--input", input, "Log CSV, points CSV, or values CSV (last column)")->required();
  plot->add_option("--bins", bins, "Histogram bins");
  plot->add_option("--output", output, "SVG file")->required();

  // audit
  std::string audit_kind = "all";
  int trials = 100;
  auto* audit = app.add_subcommand("audit", "Check the soft-extremum and angle-distortion bounds on random instances");
  audit->add_option("--kind", audit_kind, "boltzmann, theorem or all")
      ->check(CLI::IsMember({"boltzmann", "theorem", "all"}));
  audit->add_option("--trials", trials, "Random instances per audit");
  audit->add_option("--seed", seed, "Seed");

  // synth
  std::string synth_kind, mesh_output;
  double spacing = 0.06;
  auto* synth = app.add_subcommand("synth", "Write a synthetic point cloud");
  synth->add_option("--kind", synth_kind, "blob, spike, face, hemisphere or annulus")
      ->required()
      ->check(CLI::IsMember({"blob", "spike", "face", "hemisphere", "annulus"}));
  synth->add_option("--n", n, "Number of points (blob, spike, hemisphere)");
  synth->add_option("--spacing", spacing, "Lattice spacing (face, annulus)");
  synth->add_option("--seed", seed, "Seed");
  synth->add_option("--output", output, "Points file")->required();
  synth->add_option("--mesh", mesh_output, "Mesh file (face)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  app.parse(reversed);

  if (*fit) return cmd_fit(config_path, output_dir, print_config, out, log);
  if (*eval) return cmd_eval(map_ckpt, cloud, mesh, domain, samples, bins, seed, output, hist_output, log);
  if (*map) {
    write_points(output, mapped_from(map_ckpt, "", cloud));
    return kExitOk;
  }
  if (*boundary) {
    if (!(h > 0.0)) throw UsageError("--threshold must be positive");
    const Points mapped = mapped_from(map_ckpt, mapped_csv, cloud);
    if (mapped.cols() != 2) throw UsageError("mapped points must be 2D");
    const TriangleMesh pruned = prune_long_faces(delaunay(mapped).mesh, h);
    if (pruned.num_triangles() == 0)
      throw UsageError("no triangle has all edges shorter than h = " + format_double(h) + "; increase --threshold");
    const auto loops = boundary_edges(pruned);
    write_loops_csv(output, loops, mapped);
    if (!svg_output.empty()) write_text(svg_output, svg_scatter(mapped, loops, "boundary h = " + format_double(h)));
    log << loops.size() << " boundary loop(s)\n";
    return kExitOk;
  }
  if (*recon) {
    const NetworkParams map_net = load_checkpoint(map_ckpt);
    const Points x = load_cloud(cloud);
    std::optional<NetworkParams> lambda_net;
    if (mode == "lambda") {
      if (lambda_ckpt.empty()) throw UsageError("--mode lambda needs --lambda");
      lambda_net = load_checkpoint(lambda_ckpt);
    }
    const TriangleMesh m =
        reconstruct_surface(map_net, lambda_net ? &*lambda_net : nullptr, x, load_domain(domain),
                            mode == "lambda" ? MeshMode::LambdaAdapted : MeshMode::Uniform, target_edge, seed);
    write_mesh(output, m);
    log << m.num_vertices() << " vertices, " << m.num_triangles() << " triangles\n";
    return kExitOk;
  }
  if (*sample) {
    const DomainSpec d = load_domain(domain);
    write_points(output, on_boundary ? sample_boundary(d, n, seed, equal ? BoundarySampling::Equal : BoundarySampling::Random)
                                     : sample_area(d, n, seed));
    return kExitOk;
  }
  if (*plot) {
    std::string svg;
    if (kind == "stage_lines") {
      svg = svg_stage_lines(read_train_log(input), "per-stage metrics");
    } else if (kind == "scatter") {
      svg = svg_scatter(read_points(input, true), {}, "");
    } else {
      if (bins < 1) throw UsageError("--bins must be positive");
      svg = svg_histogram(make_histogram(last_column(input), bins, -std::numbers::pi, std::numbers::pi), "");
    }
    write_text(output, svg);
    return kExitOk;
  }
  if (*audit) {
    int status = kExitOk;
    if (audit_kind != "theorem") {
      const AuditSummary s = audit_boltzmann_random(trials, seed);
      out << "boltzmann: " << s.trials << " trials, " << s.violations << " violations, worst margin "
          << format_double(s.worst_margin) << '\n';
      if (s.violations) status = kExitNumeric;
    }
    if (audit_kind != "boltzmann") {
      const AuditSummary s = audit_theorem_random(trials, seed);
      out << "theorem: " << s.trials << " trials, " << s.violations << " violations, worst margin "
          << format_double(s.worst_margin) << '\n';
      if (s.violations) status = kExitNumeric;
    }
    return status;
  }
  if (*synth) {
    if (synth_kind == "face") {
      const TriangleMesh face = face_like_surface(spacing, seed);
      write_points(output, face.vertices);
      if (!mesh_output.empty()) write_mesh(mesh_output, face);
    } else if (synth_kind == "annulus") {
      write_points(output, annulus_cloud(spacing, 0.4, 1.0, seed));
    } else if (synth_kind == "blob") {
      write_points(output, blob_2d(n, seed));
    } else if (synth_kind == "spike") {
      write_points(output, spike_surface(n, seed));
    } else {
      write_points(output, hemisphere(n, seed));
    }
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
  apply_thread_env();
  CLI::App app{"Neural point-cloud parametrization", "pcparam"};
  try {
    return dispatch(app, args, out, log);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, log) == 0 ? kExitOk : kExitUsage;
  } catch (const NumericError& e) {
    log << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace pcparam
