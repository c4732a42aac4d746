#include "pcparam/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pcparam {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  for (char& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  return f;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  return f;
}

bool parse_number(std::string_view s, double& out) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  if (sep == ' ') {
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
  }
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Points from_rows(const std::vector<std::vector<double>>& rows, const fs::path& path) {
  if (rows.empty()) throw IoError("'" + path.string() + "' contains no points");
  Points p(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  return p;
}

json vec2(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }

Eigen::Vector2d vec2(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected a 2-element coordinate array");
  return {j[0].get<double>(), j[1].get<double>()};
}

json loop_json(const Loop& loop) {
  json arr = json::array();
  for (const auto& s : loop.segments) {
    if (const auto* l = std::get_if<LineSegment>(&s)) {
      arr.push_back({{"type", "line"}, {"from", vec2(l->from)}, {"to", vec2(l->to)}});
    } else {
      const auto& a = std::get<ArcSegment>(s);
      arr.push_back({{"type", "arc"},
                     {"center", vec2(a.center)},
                     {"radius", a.radius},
                     {"start_angle", a.start_angle},
                     {"end_angle", a.end_angle},
                     {"ccw", a.ccw}});
    }
  }
  return arr;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& what) {
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw std::invalid_argument("unknown key '" + k + "' in " + what);
  }
}

Loop loop_from(const json& arr) {
  if (!arr.is_array() || arr.empty()) throw std::invalid_argument("a loop must be a non-empty segment array");
  Loop loop;
  for (const auto& s : arr) {
    const std::string type = s.at("type").get<std::string>();
    if (type == "line") {
      reject_unknown(s, {"type", "from", "to"}, "line segment");
      loop.segments.emplace_back(LineSegment{vec2(s.at("from")), vec2(s.at("to"))});
    } else if (type == "arc") {
      reject_unknown(s, {"type", "center", "radius", "start_angle", "end_angle", "ccw"}, "arc segment");
      loop.segments.emplace_back(ArcSegment{vec2(s.at("center")), s.at("radius").get<double>(),
                                            s.at("start_angle").get<double>(), s.at("end_angle").get<double>(),
                                            s.value("ccw", true)});
    } else {
      throw std::invalid_argument("unknown segment type '" + type + "'");
    }
  }
  return loop;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  auto f = open_out(path);
  f << text;
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
  auto f = open_in(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Points read_points(const fs::path& path, bool allow_empty) {
  auto f = open_in(path);
  const bool csv = lower_ext(path) == ".csv";
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto tokens = split(line, csv ? ',' : ' ');
    std::vector<double> row;
    bool numeric = true;
    for (const auto& t : tokens) {
      double v;
      if (!parse_number(t, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (csv && rows.empty()) continue;  // header
      throw IoError("'" + path.string() + "' line " + std::to_string(lineno) + ": not a numeric record");
    }
    if (row.size() != 2 && row.size() != 3)
      throw IoError("'" + path.string() + "' line " + std::to_string(lineno) + ": expected 2 or 3 coordinates");
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError("'" + path.string() + "' line " + std::to_string(lineno) + ": inconsistent dimension");
    rows.push_back(std::move(row));
  }
  if (rows.empty() && allow_empty) return Points(0, 2);
  Points p = from_rows(rows, path);
  if (!p.allFinite()) throw IoError("'" + path.string() + "' contains non-finite coordinates");
  return p;
}

void write_points(const fs::path& path, const Points& points) {
  std::ostringstream out;
  const bool csv = lower_ext(path) == ".csv";
  if (csv) out << (points.cols() == 3 ? "x,y,z\n" : "x,y\n");
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index k = 0; k < points.cols(); ++k) out << (k ? (csv ? "," : " ") : "") << format_double(points(i, k));
    out << '\n';
  }
  write_text(path, out.str());
}

TriangleMesh read_mesh(const fs::path& path) {
  auto f = open_in(path);
  const std::string ext = lower_ext(path);
  std::vector<std::vector<double>> verts;
  std::vector<std::array<int, 3>> faces;
  std::string line;
  const auto bad = [&](const std::string& why) { return IoError("'" + path.string() + "': " + why); };

  if (ext == ".off") {
    std::vector<std::string> tokens;
    while (std::getline(f, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      for (auto& t : split(line, ' ')) tokens.push_back(t);
    }
    std::size_t pos = 0;
    const auto next = [&]() -> double {
      double v;
      if (pos >= tokens.size() || !parse_number(tokens[pos++], v)) throw bad("malformed OFF data");
      return v;
    };
    if (tokens.empty() || tokens[pos++] != "OFF") throw bad("missing OFF header");
    const auto nv = static_cast<std::size_t>(next()), nf = static_cast<std::size_t>(next());
    next();
    for (std::size_t i = 0; i < nv; ++i) verts.push_back({next(), next(), next()});
    for (std::size_t i = 0; i < nf; ++i) {
      if (static_cast<int>(next()) != 3) throw bad("only triangular faces are supported");
      faces.push_back({static_cast<int>(next()), static_cast<int>(next()), static_cast<int>(next())});
    }
  } else if (ext == ".obj") {
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      const auto tokens = split(line, ' ');
      if (tokens.empty()) continue;
      if (tokens[0] == "v") {
        std::vector<double> v;
        for (std::size_t k = 1; k < tokens.size() && k <= 3; ++k) {
          double x;
          if (!parse_number(tokens[k], x)) throw bad("line " + std::to_string(lineno) + ": bad vertex");
          v.push_back(x);
        }
        if (v.size() != 3) throw bad("line " + std::to_string(lineno) + ": vertex needs 3 coordinates");
        verts.push_back(v);
      } else if (tokens[0] == "f") {
        if (tokens.size() != 4) throw bad("line " + std::to_string(lineno) + ": only triangles are supported");
        std::array<int, 3> t{};
        for (int k = 0; k < 3; ++k) {
          const std::string idx = tokens[static_cast<std::size_t>(k) + 1].substr(0, tokens[static_cast<std::size_t>(k) + 1].find('/'));
          double x;
          if (!parse_number(idx, x)) throw bad("line " + std::to_string(lineno) + ": bad face index");
          const int i = static_cast<int>(x);
          t[k] = i < 0 ? static_cast<int>(verts.size()) + i : i - 1;
        }
        faces.push_back(t);
      }
    }
  } else {
    throw bad("unsupported mesh format (use .obj or .off)");
  }

  TriangleMesh mesh;
  mesh.vertices = from_rows(verts, path);
  mesh.triangles.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (std::size_t k = 0; k < faces.size(); ++k)
    for (int c = 0; c < 3; ++c) mesh.triangles(static_cast<Eigen::Index>(k), c) = faces[k][c];
  try {
    mesh.validate();
  } catch (const std::invalid_argument& e) {
    throw bad(e.what());
  }
  return mesh;
}

void write_mesh(const fs::path& path, const TriangleMesh& mesh) {
  std::ostringstream out;
  const std::string ext = lower_ext(path);
  const auto coords = [&](Eigen::Index i) {
    std::string s;
    for (Eigen::Index k = 0; k < 3; ++k)
      s += (k ? " " : "") + format_double(k < mesh.vertices.cols() ? mesh.vertices(i, k) : 0.0);
    return s;
  };
  if (ext == ".off") {
    out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_triangles() << " 0\n";
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) out << coords(i) << '\n';
    for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t)
      out << "3 " << mesh.triangles(t, 0) << ' ' << mesh.triangles(t, 1) << ' ' << mesh.triangles(t, 2) << '\n';
  } else if (ext == ".obj") {
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) out << "v " << coords(i) << '\n';
    for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t)
      out << "f " << mesh.triangles(t, 0) + 1 << ' ' << mesh.triangles(t, 1) + 1 << ' ' << mesh.triangles(t, 2) + 1
          << '\n';
  } else {
    throw IoError("unsupported mesh format '" + ext + "' (use .obj or .off)");
  }
  write_text(path, out.str());
}

// ---------------------------------------------------------------------------

json to_json(const NetworkParams& params) {
  const NetworkSpec& s = params.spec;
  return {{"version", 1},
          {"spec",
           {{"input_dim", s.input_dim},
            {"hidden_widths", s.hidden_widths},
            {"output_dim", s.output_dim},
            {"output_activation", to_string(s.output_activation)},
            {"omega", s.omega}}},
          {"params", std::vector<double>(params.values.data(), params.values.data() + params.values.size())}};
}

NetworkParams network_from_json(const json& j) {
  if (j.value("version", 0) != 1) throw std::invalid_argument("unsupported checkpoint version");
  const json& s = j.at("spec");
  NetworkParams p;
  p.spec.input_dim = s.at("input_dim").get<int>();
  p.spec.hidden_widths = s.at("hidden_widths").get<std::vector<int>>();
  p.spec.output_dim = s.at("output_dim").get<int>();
  p.spec.output_activation = output_activation_from_string(s.value("output_activation", std::string("none")));
  p.spec.omega = s.value("omega", 1.0);
  const auto values = j.at("params").get<std::vector<double>>();
  p.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  p.validate();
  return p;
}

void save_checkpoint(const fs::path& path, const NetworkParams& params) {
  write_text(path, to_json(params).dump(1) + "\n");
}

NetworkParams load_checkpoint(const fs::path& path) {
  try {
    return network_from_json(json::parse(read_text(path)));
  } catch (const json::exception& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

json to_json(const DomainSpec& domain) {
  json holes = json::array();
  for (const auto& h : domain.holes) holes.push_back(loop_json(h));
  return {{"outer", loop_json(domain.outer)}, {"holes", holes}};
}

DomainSpec domain_from_json(const json& j) {
  reject_unknown(j, {"outer", "holes"}, "domain");
  DomainSpec d;
  d.outer = loop_from(j.at("outer"));
  if (j.contains("holes"))
    for (const auto& h : j.at("holes")) d.holes.push_back(loop_from(h));
  d.validate();
  return d;
}

DomainSpec load_domain(const std::string& preset_or_path) {
  for (const auto& name : domain_preset_names())
    if (name == preset_or_path) return domain_preset(name);
  try {
    return domain_from_json(json::parse(read_text(preset_or_path)));
  } catch (const json::exception& e) {
    throw IoError("'" + preset_or_path + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError("'" + preset_or_path + "': " + e.what());
  }
}

void save_domain(const fs::path& path, const DomainSpec& domain) {
  write_text(path, to_json(domain).dump(2) + "\n");
}

LandmarkSet landmarks_from_json(const json& j) {
  reject_unknown(j, {"regions", "targets"}, "landmarks");
  LandmarkSet set;
  set.regions = j.at("regions").get<std::vector<std::vector<int>>>();
  for (const auto& t : j.at("targets")) {
    if (t.is_string()) {
      if (t.get<std::string>() != "lines") throw std::invalid_argument("unknown target preset " + t.dump());
      set.targets.push_back(landmark_targets_lines());
      continue;
    }
    Points p(static_cast<Eigen::Index>(t.size()), 2);
    for (std::size_t i = 0; i < t.size(); ++i) p.row(static_cast<Eigen::Index>(i)) = vec2(t[i]).transpose();
    set.targets.push_back(p);
  }
  return set;
}

LandmarkSet load_landmarks(const fs::path& path) {
  try {
    return landmarks_from_json(json::parse(read_text(path)));
  } catch (const json::exception& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------

namespace {
constexpr const char* kLogHeader =
    "stage,sigma,alpha_initial,alpha_final,batch_x,batch_w,epochs,loss_total,loss_leg,loss_hand,loss_landmark,"
    "hausdorff,mean_abs_angle,landmark_hausdorff";
}

void write_train_log(const fs::path& path, const TrainLog& log) {
  std::ostringstream out;
  out << kLogHeader << '\n';
  for (const auto& r : log.stages) {
    out << r.stage << ',' << format_double(r.sigma) << ',' << format_double(r.alpha_initial) << ','
        << format_double(r.alpha_final) << ',' << r.batch_x << ',' << r.batch_w << ',' << r.epochs << ','
        << format_double(r.loss.total) << ',' << format_double(r.loss.leg) << ',' << format_double(r.loss.hand) << ','
        << format_double(r.loss.landmark) << ',' << format_double(r.hausdorff) << ','
        << format_double(r.mean_abs_angle) << ',' << format_double(r.landmark_hausdorff) << '\n';
  }
  write_text(path, out.str());
}

TrainLog read_train_log(const fs::path& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("stage,", 0) != 0) throw IoError("'" + path.string() + "' is not a training log");
  TrainLog log;
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto t = split(line, ',');
    if (t.size() != 14) throw IoError("'" + path.string() + "' line " + std::to_string(lineno) + ": expected 14 fields");
    std::array<double, 14> v{};
    for (std::size_t k = 0; k < 14; ++k) {
      if (t[k] == "nan" || t[k] == "-nan") {
        v[k] = std::nan("");
      } else if (!parse_number(t[k], v[k])) {
        throw IoError("'" + path.string() + "' line " + std::to_string(lineno) + ": bad number '" + t[k] + "'");
      }
    }
    StageRecord r;
    r.stage = static_cast<int>(v[0]);
    r.sigma = v[1];
    r.alpha_initial = v[2];
    r.alpha_final = v[3];
    r.batch_x = static_cast<int>(v[4]);
    r.batch_w = static_cast<int>(v[5]);
    r.epochs = static_cast<int>(v[6]);
    r.loss = {v[7], v[8], v[9], v[10]};
    r.hausdorff = v[11];
    r.mean_abs_angle = v[12];
    r.landmark_hausdorff = v[13];
    log.stages.push_back(r);
  }
  return log;
}

void write_loops_csv(const fs::path& path, const std::vector<std::vector<int>>& loops, const Points& points) {
  std::ostringstream out;
  out << "loop,order,vertex,x,y\n";
  for (std::size_t l = 0; l < loops.size(); ++l)
    for (std::size_t k = 0; k < loops[l].size(); ++k) {
      const int v = loops[l][k];
      out << l << ',' << k << ',' << v << ',' << format_double(points(v, 0)) << ',' << format_double(points(v, 1))
          << '\n';
    }
  write_text(path, out.str());
}

}  // namespace pcparam
