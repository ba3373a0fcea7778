#pragma once

// JSON / CSV serialization of diagrams, statistics and persistence images.
// Diagram JSON:
//   {"max_dim": k,
//    "points": [{"dim": 0, "birth": 0.0, "death": 1.5},
//               {"dim": 0, "birth": 0.0, "death": null}, ...],
//    "metadata": {...}}
// Essential classes carry "death": null.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "argutopo/detail/numfmt.hpp"
#include "argutopo/error.hpp"
#include "argutopo/features.hpp"
#include "argutopo/tda.hpp"

namespace argutopo {

using Json = nlohmann::ordered_json;

inline Json to_json(const PersistenceDiagram& diagram) {
  Json points = Json::array();
  for (const auto& p : diagram.points) {
    Json jp;
    jp["dim"] = p.dim;
    jp["birth"] = p.birth;
    jp["death"] = p.essential() ? Json(nullptr) : Json(p.death);
    points.push_back(std::move(jp));
  }
  Json meta = Json::object();
  for (const auto& [k, v] : diagram.metadata) meta[k] = v;
  Json out;
  out["max_dim"] = diagram.max_dim;
  out["points"] = std::move(points);
  out["metadata"] = std::move(meta);
  return out;
}

inline PersistenceDiagram diagram_from_json(const Json& j) {
  try {
    PersistenceDiagram d;
    d.max_dim = j.at("max_dim").get<int>();
    for (const auto& jp : j.at("points")) {
      PersistencePoint p;
      p.dim = jp.at("dim").get<int>();
      p.birth = jp.at("birth").get<double>();
      const auto& death = jp.at("death");
      p.death = death.is_null() ? kInfinity : death.get<double>();
      if (p.dim < 0 || p.dim > d.max_dim) throw DataError("diagram point has dimension out of range");
      if (!std::isfinite(p.birth) || p.death < p.birth) {
        throw DataError("diagram point violates birth <= death");
      }
      d.points.push_back(p);
    }
    if (j.contains("metadata")) {
      for (const auto& [k, v] : j.at("metadata").items()) d.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    d.canonicalize();
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("diagram json: ") + e.what());
  }
}

inline PersistenceDiagram read_diagram_json(std::istream& in) {
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("diagram json: ") + e.what());
  }
  return diagram_from_json(j);
}

inline Json to_json(const DiagramStats& stats) {
  Json out;
  out["noise_threshold"] = stats.noise_threshold;
  Json dims = Json::array();
  for (const auto& s : stats.dims) {
    Json js;
    js["dim"] = s.dim;
    js["count"] = s.count;
    js["essential"] = s.essential;
    js["max_persistence"] = s.max_persistence ? Json(*s.max_persistence) : Json(nullptr);
    js["persistence_gap"] = s.persistence_gap ? Json(*s.persistence_gap) : Json(nullptr);
    js["count_above_threshold"] = s.above_threshold;
    dims.push_back(std::move(js));
  }
  out["dimensions"] = std::move(dims);
  return out;
}

/// Metadata for the image's sibling JSON file.
inline Json image_metadata(const PersistenceImage& img) {
  Json out;
  out["dim"] = img.dim;
  out["rows"] = img.rows;
  out["cols"] = img.cols;
  out["sigma"] = img.sigma;
  out["weight"] = img.weight;
  out["extent"] = {{"birth_min", img.extent.birth_min},
                   {"birth_max", img.extent.birth_max},
                   {"persistence_min", img.extent.persistence_min},
                   {"persistence_max", img.extent.persistence_max}};
  out["layout"] = "row-major; rows = persistence ascending, cols = birth ascending";
  return out;
}

inline void write_image_csv(const PersistenceImage& img, std::ostream& out) {
  for (std::size_t r = 0; r < img.rows; ++r) {
    for (std::size_t c = 0; c < img.cols; ++c) {
      if (c) out << ',';
      out << detail::format_real(img(r, c));
    }
    out << '\n';
  }
}

/// Writes `contents` to `path` via a temporary file and rename, so readers
/// never see a partially written file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + tmp.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw DataError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw DataError("cannot move output into place at '" + path.string() + "'");
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace argutopo
