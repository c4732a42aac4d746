#include "pcparam/config.hpp"

#include "pcparam/io.hpp"

#include <algorithm>

namespace pcparam {

using nlohmann::json;

namespace {

struct Parser {
  const std::string& text;
  const std::string& source;

  int line_of_key(const std::string& key) const {
    const auto pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    const int line = line_of_key(key);
    throw ConfigError(source + (line > 0 ? ":" + std::to_string(line) : "") + ": " + why);
  }

  void only(const json& j, std::initializer_list<const char*> keys, const std::string& section) const {
    if (!j.is_object()) fail(section, "'" + section + "' must be an object");
    for (const auto& [k, v] : j.items())
      if (std::none_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; }))
        fail(k, "unknown key '" + k + "' in " + section);
  }

  template <class T>
  void get(const json& j, const char* key, T& out) const {
    if (!j.contains(key)) return;
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, std::string("key '") + key + "' has the wrong type");
    }
  }

  NetworkSpec network(const json& j, NetworkSpec spec, const std::string& section) const {
    only(j, {"input_dim", "hidden_widths", "output_dim", "output_activation", "omega"}, section);
    get(j, "input_dim", spec.input_dim);
    get(j, "hidden_widths", spec.hidden_widths);
    get(j, "output_dim", spec.output_dim);
    get(j, "omega", spec.omega);
    if (j.contains("output_activation")) {
      std::string a;
      get(j, "output_activation", a);
      try {
        spec.output_activation = output_activation_from_string(a);
      } catch (const std::invalid_argument& e) {
        fail("output_activation", e.what());
      }
    }
    return spec;
  }
};

json network_json(const NetworkSpec& s) {
  return {{"input_dim", s.input_dim},
          {"hidden_widths", s.hidden_widths},
          {"output_dim", s.output_dim},
          {"output_activation", to_string(s.output_activation)},
          {"omega", s.omega}};
}

}  // namespace

RunConfig RunConfig::effective() const {
  RunConfig e = *this;
  e.objective = effective_objective(mode, objective);
  if (mode == TrainMode::ShapeMatching) e.lambda_net.reset();
  e.objective.validate();
  e.stages.validate();
  e.optimizer.validate();
  e.map_net.validate();
  if (e.lambda_net) e.lambda_net->validate();
  if (!(e.fixed_lambda_inv > 0.0)) throw std::invalid_argument("fixed_lambda_inv must be positive");
  if (e.domain_pool < 0 || e.domain_points < 0 || e.eval_samples < 0)
    throw std::invalid_argument("sample counts must be non-negative");
  return e;
}

json to_json(const RunConfig& c) {
  return {{"mode", to_string(c.mode)},
          {"input", c.input},
          {"reference_mesh", c.reference_mesh},
          {"domain", c.domain},
          {"landmarks", c.landmarks},
          {"output_dir", c.output_dir},
          {"seed", c.seed},
          {"objective", {{"beta1", c.objective.beta1}, {"beta2", c.objective.beta2}, {"beta3", c.objective.beta3}}},
          {"stages",
           {{"epochs", c.stages.epochs},
            {"batch_x", c.stages.batch_x},
            {"batch_w", c.stages.batch_w},
            {"sigma", c.stages.sigma},
            {"alpha_initial", c.stages.alpha_initial},
            {"alpha_final", c.stages.alpha_final},
            {"sigma_min", c.stages.sigma_min},
            {"alpha_max", c.stages.alpha_max},
            {"epochs_min", c.stages.epochs_min}}},
          {"optimizer",
           {{"lr", c.optimizer.lr}, {"rho", c.optimizer.rho}, {"momentum", c.optimizer.momentum}, {"eps", c.optimizer.eps}}},
          {"map_net", network_json(c.map_net)},
          {"lambda_net", c.lambda_net ? network_json(*c.lambda_net) : json(nullptr)},
          {"fixed_lambda_inv", c.fixed_lambda_inv},
          {"domain_pool", c.domain_pool},
          {"domain_points", c.domain_points},
          {"eval_samples", c.eval_samples}};
}

RunConfig parse_run_config(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw ConfigError(source + ":" + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
  }
  const Parser p{text, source};
  p.only(j,
         {"mode", "input", "reference_mesh", "domain", "landmarks", "output_dir", "seed", "objective", "stages",
          "optimizer", "map_net", "lambda_net", "fixed_lambda_inv", "domain_pool", "domain_points", "eval_samples"},
         "config");

  RunConfig c;
  if (j.contains("mode")) {
    std::string m;
    p.get(j, "mode", m);
    try {
      c.mode = train_mode_from_string(m);
    } catch (const std::invalid_argument& e) {
      p.fail("mode", e.what());
    }
  }
  p.get(j, "input", c.input);
  p.get(j, "reference_mesh", c.reference_mesh);
  p.get(j, "domain", c.domain);
  p.get(j, "landmarks", c.landmarks);
  p.get(j, "output_dir", c.output_dir);
  p.get(j, "seed", c.seed);
  if (j.contains("objective")) {
    const json& o = j["objective"];
    p.only(o, {"beta1", "beta2", "beta3"}, "objective");
    p.get(o, "beta1", c.objective.beta1);
    p.get(o, "beta2", c.objective.beta2);
    p.get(o, "beta3", c.objective.beta3);
  }
  if (j.contains("stages")) {
    const json& s = j["stages"];
    p.only(s,
           {"epochs", "batch_x", "batch_w", "sigma", "alpha_initial", "alpha_final", "sigma_min", "alpha_max",
            "epochs_min"},
           "stages");
    p.get(s, "epochs", c.stages.epochs);
    p.get(s, "batch_x", c.stages.batch_x);
    p.get(s, "batch_w", c.stages.batch_w);
    p.get(s, "sigma", c.stages.sigma);
    p.get(s, "alpha_initial", c.stages.alpha_initial);
    p.get(s, "alpha_final", c.stages.alpha_final);
    p.get(s, "sigma_min", c.stages.sigma_min);
    p.get(s, "alpha_max", c.stages.alpha_max);
    p.get(s, "epochs_min", c.stages.epochs_min);
  }
  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    p.only(o, {"lr", "rho", "momentum", "eps"}, "optimizer");
    p.get(o, "lr", c.optimizer.lr);
    p.get(o, "rho", c.optimizer.rho);
    p.get(o, "momentum", c.optimizer.momentum);
    p.get(o, "eps", c.optimizer.eps);
  }
  if (j.contains("map_net")) c.map_net = p.network(j["map_net"], c.map_net, "map_net");
  if (j.contains("lambda_net")) {
    if (j["lambda_net"].is_null())
      c.lambda_net.reset();
    else
      c.lambda_net = p.network(j["lambda_net"], c.lambda_net.value_or(inverse_lambda_net_spec()), "lambda_net");
  }
  p.get(j, "fixed_lambda_inv", c.fixed_lambda_inv);
  p.get(j, "domain_pool", c.domain_pool);
  p.get(j, "domain_points", c.domain_points);
  p.get(j, "eval_samples", c.eval_samples);

  try {
    (void)c.effective();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  RunConfig c = parse_run_config(text, path.string());
  const auto base = path.parent_path();
  const auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).lexically_normal().string();
  };
  resolve(c.input);
  resolve(c.reference_mesh);
  resolve(c.landmarks);
  resolve(c.output_dir);
  const auto names = domain_preset_names();
  if (std::find(names.begin(), names.end(), c.domain) == names.end()) resolve(c.domain);
  return c;
}

}  // namespace pcparam
