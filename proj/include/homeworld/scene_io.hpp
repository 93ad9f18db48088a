#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "homeworld/json_lines.hpp"
#include "homeworld/world.hpp"

namespace homeworld {

using Json = nlohmann::ordered_json;

inline Json cell_to_json(Cell c) { return Json::array({c.x, c.y}); }

inline Cell cell_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw Error(ErrorCode::ParseError, "cell must be [x, y]");
  return {j[0].get<int>(), j[1].get<int>()};
}

inline Json scene_to_json(const Scene& s) {
  Json j;
  j["grid"] = Json::array({s.grid_w, s.grid_h});
  Json obstacles = Json::array();
  for (const Cell& c : s.obstacles) obstacles.push_back(cell_to_json(c));
  j["obstacles"] = std::move(obstacles);
  Json objects = Json::array();
  for (const auto& o : s.objects) {
    Json jo;
    jo["id"] = o.id;
    jo["class"] = o.cls;
    jo["cell"] = cell_to_json(o.cell);
    Json st = Json::object();
    if (o.state.is_open) st["is_open"] = true;
    if (o.state.is_on) st["is_on"] = true;
    if (o.state.is_sliced) st["is_sliced"] = true;
    if (o.state.is_clean) st["is_clean"] = true;
    if (o.state.is_hot) st["is_hot"] = true;
    if (o.state.is_cold) st["is_cold"] = true;
    jo["state"] = std::move(st);
    jo["contents"] = o.contents;
    objects.push_back(std::move(jo));
  }
  j["objects"] = std::move(objects);
  Json agent;
  agent["cell"] = cell_to_json(s.agent.cell);
  agent["heading"] = std::string(to_string(s.agent.heading));
  if (s.agent.held) agent["held"] = *s.agent.held;
  j["agent"] = std::move(agent);
  j["seed"] = s.rng_seed;
  return j;
}

namespace detail {

inline const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorCode::SceneInvalid, "missing field '" + std::string(key) + "' in " + where, key);
  return j.at(key);
}

inline Scene scene_from_json_unchecked(const Json& j) {
  Scene s;
  const Json& grid = require(j, "grid", "scene");
  if (!grid.is_array() || grid.size() != 2) throw Error(ErrorCode::SceneInvalid, "grid must be [w, h]");
  s.grid_w = grid[0].get<int>();
  s.grid_h = grid[1].get<int>();
  if (j.contains("obstacles"))
    for (const auto& c : j.at("obstacles")) s.obstacles.insert(cell_from_json(c));
  const Json& objects = require(j, "objects", "scene");
  for (const auto& jo : objects) {
    SceneObject o;
    o.id = require(jo, "id", "object").get<std::string>();
    o.cls = require(jo, "class", "object").get<std::string>();
    o.cell = cell_from_json(require(jo, "cell", "object"));
    if (jo.contains("state")) {
      const auto& st = jo.at("state");
      o.state.is_open = st.value("is_open", false);
      o.state.is_on = st.value("is_on", false);
      o.state.is_sliced = st.value("is_sliced", false);
      o.state.is_clean = st.value("is_clean", false);
      o.state.is_hot = st.value("is_hot", false);
      o.state.is_cold = st.value("is_cold", false);
    }
    if (jo.contains("contents")) o.contents = jo.at("contents").get<std::vector<std::string>>();
    s.objects.push_back(std::move(o));
  }
  for (const auto& parent : s.objects)
    for (const auto& child : parent.contents)
      if (SceneObject* c = s.find(child)) {
        if (c->inside_of && *c->inside_of != parent.id)
          throw Error(ErrorCode::SceneInvalid, "'" + child + "' listed in two containers", child);
        c->inside_of = parent.id;
      }
  const Json& agent = require(j, "agent", "scene");
  s.agent.cell = cell_from_json(require(agent, "cell", "agent"));
  s.agent.heading = heading_from_string(agent.value("heading", std::string("N")));
  if (agent.contains("held") && !agent.at("held").is_null()) s.agent.held = agent.at("held").get<std::string>();
  s.rng_seed = j.value("seed", std::uint64_t{0});
  return s;
}

}  // namespace detail

/// Builds and validates a scene from an already-parsed document. Errors carry
/// no line information; use parse_scene() for text input.
inline Scene scene_from_json(const Json& j, const ClassRegistry& reg = default_registry()) {
  Scene s;
  try {
    s = detail::scene_from_json_unchecked(j);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SceneInvalid, e.what());
  }
  auto violations = check_scene(s, reg);
  if (!violations.empty()) throw Error(ErrorCode::SceneInvalid, violations.front().message);
  normalize_cells(s);
  return s;
}

/// Parses scene JSON text. Every error names the 1-based source line of the
/// offending element.
inline Scene parse_scene(const std::string& text, const ClassRegistry& reg = default_registry()) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const int line = line_of_offset(text, e.byte);
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + e.what(), {}, line);
  }
  const JsonLineIndex lines(text);
  Scene s;
  try {
    s = detail::scene_from_json_unchecked(j);
  } catch (const Error& e) {
    const int line = lines.line("/" + e.token());
    throw Error(ErrorCode::SceneInvalid, "line " + std::to_string(line) + ": " + e.what(), e.token(), line);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SceneInvalid, std::string("line 1: ") + e.what(), {}, 1);
  }
  auto violations = check_scene(s, reg);
  if (!violations.empty()) {
    const auto& v = violations.front();
    const int line = v.object_index >= 0 ? lines.line("/objects/" + std::to_string(v.object_index))
                                         : lines.line(v.message.find("agent") != std::string::npos ||
                                                              v.message.find("held") != std::string::npos
                                                          ? "/agent"
                                                          : "/grid");
    throw Error(ErrorCode::SceneInvalid, "line " + std::to_string(line) + ": " + v.message, {}, line);
  }
  normalize_cells(s);
  return s;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Scene load_scene(const std::string& path, const ClassRegistry& reg = default_registry()) {
  return parse_scene(read_text_file(path), reg);
}

inline void save_scene(const Scene& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'", path);
  out << scene_to_json(s).dump(2) << "\n";
}

}  // namespace homeworld
