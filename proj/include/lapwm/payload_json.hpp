#pragma once

// JSON sidecar for payload maps. One document describes a whole clip:
//
//   { "format": "lapwm-payload-map", "version": 1,
//     "frames": [ { "frame": 0, "width": 176, "height": 144,
//                   "strength_a": 4.0, "spread_n": 120, "key": "...",
//                   "positions": [10, ...], "bits": "0110...",
//                   "groups": [ [[block, zigzag], ...], ... ] }, ... ] }

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lapwm/errors.hpp"
#include "lapwm/video_pipeline.hpp"

namespace lapwm {

inline constexpr int kPayloadMapVersion = 1;
inline constexpr const char* kPayloadMapFormat = "lapwm-payload-map";

inline std::string bits_to_string(std::span<const Bit> bits) {
  std::string s;
  s.reserve(bits.size());
  for (Bit b : bits) s.push_back(b == Bit::One ? '1' : '0');
  return s;
}

inline std::vector<Bit> bits_from_string(std::string_view s) {
  std::vector<Bit> bits;
  bits.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw FormatError("bit strings may only contain '0' and '1'");
    bits.push_back(c == '1' ? Bit::One : Bit::Zero);
  }
  return bits;
}

inline nlohmann::json payload_to_json(const PayloadMap& map, std::size_t frame_index) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : map.groups) {
    nlohmann::json coords = nlohmann::json::array();
    for (const CoeffCoord& c : g) coords.push_back({c.block, c.zigzag});
    groups.push_back(std::move(coords));
  }
  return {{"frame", frame_index},
          {"width", map.width},
          {"height", map.height},
          {"strength_a", map.config.strength_a},
          {"spread_n", map.config.spread_n},
          {"key", map.config.key},
          {"positions", map.positions},
          {"bits", bits_to_string(map.bits)},
          {"groups", std::move(groups)}};
}

inline PayloadMap payload_from_json(const nlohmann::json& j) {
  try {
    PayloadMap map;
    map.width = j.at("width").get<int>();
    map.height = j.at("height").get<int>();
    map.config.strength_a = j.at("strength_a").get<double>();
    map.config.spread_n = j.at("spread_n").get<std::size_t>();
    map.config.key = j.at("key").get<std::string>();
    map.positions = j.at("positions").get<std::vector<int>>();
    map.bits = bits_from_string(j.at("bits").get<std::string>());
    for (const auto& g : j.at("groups")) {
      std::vector<CoeffCoord> coords;
      for (const auto& c : g) coords.push_back({c.at(0).get<std::size_t>(), c.at(1).get<int>()});
      map.groups.push_back(std::move(coords));
    }
    if (map.groups.size() != map.bits.size())
      throw FormatError("payload map has " + std::to_string(map.groups.size()) +
                        " groups for " + std::to_string(map.bits.size()) + " bits");
    return map;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed payload map: ") + e.what());
  }
}

inline void write_payload_maps(const std::vector<PayloadMap>& maps, std::ostream& out) {
  nlohmann::json frames = nlohmann::json::array();
  for (std::size_t i = 0; i < maps.size(); ++i) frames.push_back(payload_to_json(maps[i], i));
  const nlohmann::json doc{
      {"format", kPayloadMapFormat}, {"version", kPayloadMapVersion}, {"frames", std::move(frames)}};
  out << doc.dump() << '\n';
  if (!out) throw FormatError("write failed");
}

inline std::vector<PayloadMap> read_payload_maps(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("payload map is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kPayloadMapFormat)
    throw FormatError("not a payload map document");
  if (doc.value("version", 0) != kPayloadMapVersion)
    throw FormatError("unsupported payload map version");
  std::vector<PayloadMap> maps;
  for (const auto& f : doc.at("frames")) maps.push_back(payload_from_json(f));
  return maps;
}

}  // namespace lapwm
