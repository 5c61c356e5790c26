#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "quakesim/geo.hpp"

namespace quakesim::geojson {

using nlohmann::json;

inline json ring_to_json(const geo::Ring& ring) {
  json coords = json::array();
  for (const auto& p : ring) coords.push_back({p.lon, p.lat});
  if (!ring.empty()) coords.push_back({ring.front().lon, ring.front().lat});
  return coords;
}

inline json polygon_geometry(const geo::Polygon& poly) {
  json rings = json::array();
  rings.push_back(ring_to_json(poly.exterior));
  for (const auto& h : poly.holes) rings.push_back(ring_to_json(h));
  return {{"type", "Polygon"}, {"coordinates", rings}};
}

inline json feature(const geo::Polygon& poly, json properties = json::object()) {
  return {{"type", "Feature"}, {"properties", std::move(properties)}, {"geometry", polygon_geometry(poly)}};
}

inline geo::Ring ring_from_json(const json& coords) {
  geo::Ring ring;
  for (const auto& c : coords) {
    require(c.is_array() && c.size() >= 2, ErrorCode::ParseError, "bad GeoJSON position");
    ring.push_back({c[0].get<double>(), c[1].get<double>()});
  }
  return geo::normalize_ring(std::move(ring));
}

/// Accepts a Polygon geometry, a Feature wrapping one, or the first polygon
/// of a MultiPolygon.
inline geo::Polygon polygon_from_json(const json& j) {
  const json* g = &j;
  if (j.value("type", "") == "Feature") g = &j.at("geometry");
  const std::string type = g->value("type", "");
  const json* rings = nullptr;
  if (type == "Polygon") {
    rings = &g->at("coordinates");
  } else if (type == "MultiPolygon") {
    require(!g->at("coordinates").empty(), ErrorCode::ParseError, "empty MultiPolygon");
    rings = &g->at("coordinates").at(0);
  } else {
    throw Error(ErrorCode::ParseError, "unsupported GeoJSON geometry", type);
  }
  require(!rings->empty(), ErrorCode::ParseError, "polygon without rings");
  geo::Ring ext = ring_from_json(rings->at(0));
  std::vector<geo::Ring> holes;
  for (std::size_t i = 1; i < rings->size(); ++i) holes.push_back(ring_from_json(rings->at(i)));
  return geo::Polygon(std::move(ext), std::move(holes));
}

struct NamedPolygon {
  std::string id;
  geo::Polygon polygon;
  json properties;
};

/// Reads a FeatureCollection; each feature's id is taken from `id_property`
/// (falling back to the feature-level "id").
inline std::vector<NamedPolygon> features_from_json(const json& fc, const std::string& id_property) {
  require(fc.value("type", "") == "FeatureCollection", ErrorCode::ParseError,
          "expected FeatureCollection");
  std::vector<NamedPolygon> out;
  for (const auto& f : fc.at("features")) {
    NamedPolygon np;
    const json props = f.value("properties", json::object());
    if (props.contains(id_property)) {
      const auto& v = props.at(id_property);
      np.id = v.is_string() ? v.get<std::string>() : v.dump();
    } else if (f.contains("id")) {
      const auto& v = f.at("id");
      np.id = v.is_string() ? v.get<std::string>() : v.dump();
    } else {
      throw Error(ErrorCode::ParseError, "feature without id", id_property);
    }
    np.polygon = polygon_from_json(f);
    np.properties = props;
    out.push_back(std::move(np));
  }
  return out;
}

inline json feature_collection(const std::vector<json>& features) {
  return {{"type", "FeatureCollection"}, {"features", features}};
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::NotFound, "cannot open file", path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what(), path);
  }
}

inline geo::SpatialWindow window_from_file(const std::string& path) {
  return geo::SpatialWindow(polygon_from_json(read_file(path)));
}

}  // namespace quakesim::geojson
