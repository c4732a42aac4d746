#pragma once

#include "pcparam/domains.hpp"
#include "pcparam/neural.hpp"
#include "pcparam/optimizer.hpp"
#include "pcparam/types.hpp"

#include "json.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcparam {

/// Unreadable, missing or malformed input file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// XYZ text (whitespace separated, one point per line) or CSV, chosen by
/// extension. Non-numeric leading lines of a CSV are taken as a header.
/// A file without records is an error unless `allow_empty` (then 0 x 2).
Points read_points(const std::filesystem::path& path, bool allow_empty = false);
void write_points(const std::filesystem::path& path, const Points& points);

/// OBJ (v / f records; "f a/b/c" references are accepted) or OFF, by extension.
TriangleMesh read_mesh(const std::filesystem::path& path);
void write_mesh(const std::filesystem::path& path, const TriangleMesh& mesh);

nlohmann::json to_json(const NetworkParams& params);
NetworkParams network_from_json(const nlohmann::json& j);
void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params);
NetworkParams load_checkpoint(const std::filesystem::path& path);

nlohmann::json to_json(const DomainSpec& domain);
DomainSpec domain_from_json(const nlohmann::json& j);
/// A preset name or a path to a domain JSON file.
DomainSpec load_domain(const std::string& preset_or_path);
void save_domain(const std::filesystem::path& path, const DomainSpec& domain);

/// {"regions": [[i, ...], ...], "targets": [[[x, y], ...] | "lines", ...]}
LandmarkSet landmarks_from_json(const nlohmann::json& j);
LandmarkSet load_landmarks(const std::filesystem::path& path);

void write_train_log(const std::filesystem::path& path, const TrainLog& log);
TrainLog read_train_log(const std::filesystem::path& path);

/// Rows of loop, order, vertex, x, y.
void write_loops_csv(const std::filesystem::path& path, const std::vector<std::vector<int>>& loops,
                     const Points& points);

/// Writes a whole file, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Shortest decimal representation that round-trips the double.
std::string format_double(double v);

}  // namespace pcparam
