#pragma once

#include <array>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "homeworld/semantic_map.hpp"
#include "homeworld/world.hpp"

namespace homeworld {

enum class NavStatus { Ok, NoPath, NotMapped, Exhausted };

inline std::string_view to_string(NavStatus s) {
  switch (s) {
    case NavStatus::Ok: return "Ok";
    case NavStatus::NoPath: return "NoPath";
    case NavStatus::NotMapped: return "NotMapped";
    case NavStatus::Exhausted: return "Exhausted";
  }
  return "?";
}

struct NavResult {
  NavStatus status = NavStatus::NoPath;
  std::vector<Action> actions;
  /// Final pose of the path (valid when status is Ok).
  Cell cell;
  Heading heading = Heading::N;

  bool ok() const { return status == NavStatus::Ok; }
};

/// Cells the planner may enter: in bounds and not a mapped obstacle.
/// Unexplored cells count as free.
inline bool passable(const SemanticMap& map, Cell c) {
  return c.x >= 0 && c.y >= 0 && c.x < map.width && c.y < map.height && !map.obstacles().get(c);
}

namespace detail {

/// Breadth-first search over (cell, heading). Each action costs 1; moves are
/// expanded before rotations so straight paths win ties.
template <typename GoalFn>
NavResult pose_search(const SemanticMap& map, Cell from, Heading heading, GoalFn&& is_goal) {
  const int w = map.width, h = map.height;
  NavResult res;
  if (from.x < 0 || from.y < 0 || from.x >= w || from.y >= h) return res;
  auto id = [&](Cell c, Heading hd) { return (c.y * w + c.x) * 4 + static_cast<int>(hd); };
  std::vector<int> parent(static_cast<std::size_t>(w) * h * 4, -2);
  std::vector<std::uint8_t> via(parent.size(), 0);
  std::deque<int> queue;
  const int start = id(from, heading);
  parent[start] = -1;
  queue.push_back(start);
  int found = -1;
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    const Cell c{(s / 4) % w, (s / 4) / w};
    const Heading hd = static_cast<Heading>(s % 4);
    if (is_goal(c, hd)) {
      found = s;
      break;
    }
    const std::array<std::pair<int, std::uint8_t>, 3> next{{
        {passable(map, step_cell(c, hd)) ? id(step_cell(c, hd), hd) : -1, 0},
        {id(c, rotate_right(hd)), 2},
        {id(c, rotate_left(hd)), 1},
    }};
    for (const auto& [n, a] : next) {
      if (n < 0 || parent[n] != -2) continue;
      parent[n] = s;
      via[n] = a;
      queue.push_back(n);
    }
  }
  if (found < 0) return res;
  res.status = NavStatus::Ok;
  res.cell = {(found / 4) % w, (found / 4) / w};
  res.heading = static_cast<Heading>(found % 4);
  for (int s = found; parent[s] != -1; s = parent[s])
    res.actions.push_back(via[s] == 0 ? Action::move() : via[s] == 1 ? Action::left() : Action::right());
  std::reverse(res.actions.begin(), res.actions.end());
  return res;
}

}  // namespace detail

/// Shortest action sequence from `pose` to cell `to`, any final heading.
inline NavResult shortest_path(const SemanticMap& map, const AgentPose& pose, Cell to) {
  if (!passable(map, to)) return {};
  return detail::pose_search(map, pose.cell, pose.heading, [&](Cell c, Heading) { return c == to; });
}

/// Explored free cells with at least one unexplored in-bounds neighbour.
inline std::vector<Cell> frontier_cells(const SemanticMap& map) {
  std::vector<Cell> out;
  const BinaryPlane& ex = map.explored();
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) {
      const Cell c{x, y};
      if (!ex.get(c) || map.obstacles().get(c)) continue;
      for (Heading hd : kHeadings) {
        const Cell n = step_cell(c, hd);
        if (ex.contains(n) && !ex.get(n)) {
          out.push_back(c);
          break;
        }
      }
    }
  return out;
}

/// Nearest reachable frontier cell by action count; Exhausted when none.
inline NavResult next_frontier(const SemanticMap& map, const AgentPose& pose) {
  const BinaryPlane& ex = map.explored();
  auto is_frontier = [&](Cell c) {
    if (!ex.get(c) || map.obstacles().get(c)) return false;
    for (Heading hd : kHeadings) {
      const Cell n = step_cell(c, hd);
      if (ex.contains(n) && !ex.get(n)) return true;
    }
    return false;
  };
  NavResult r = detail::pose_search(map, pose.cell, pose.heading, [&](Cell c, Heading) { return is_frontier(c); });
  if (!r.ok()) r.status = NavStatus::Exhausted;
  return r;
}

/// Next frontier-exploration action: head for the nearest frontier cell, and
/// once there turn toward its unexplored neighbour. nullopt when exhausted.
inline std::optional<Action> explore_step(const SemanticMap& map, const AgentPose& pose) {
  NavResult f = next_frontier(map, pose);
  if (!f.ok()) return std::nullopt;
  if (!f.actions.empty()) return f.actions.front();
  for (Heading hd : kHeadings) {
    const Cell n = step_cell(pose.cell, hd);
    if (map.explored().contains(n) && !map.explored().get(n)) {
      const int turn = (static_cast<int>(hd) - static_cast<int>(pose.heading) + 4) % 4;
      return turn == 3 ? Action::left() : Action::right();
    }
  }
  return std::nullopt;
}

/// True when `target` is within interaction range of `c`, inside the view
/// wedge for heading `hd`, and not hidden behind mapped obstacles.
inline bool can_reach(const SemanticMap& map, Cell c, Heading hd, Cell target) {
  if (chebyshev(c, target) > kInteractionRange || !in_wedge(c, hd, target)) return false;
  return line_of_sight(c, target, [&](Cell m) { return map.obstacles().get(m); });
}

/// Path to the nearest pose from which some cell of `cells` is in range and
/// in view.
inline NavResult goto_cells(const SemanticMap& map, const AgentPose& pose, const std::vector<Cell>& cells) {
  if (cells.empty()) return {NavStatus::NotMapped, {}, {}, Heading::N};
  return detail::pose_search(map, pose.cell, pose.heading, [&](Cell c, Heading hd) {
    for (const Cell& t : cells)
      if (can_reach(map, c, hd, t)) return true;
    return false;
  });
}

inline NavResult goto_class(const SemanticMap& map, const AgentPose& pose, const std::string& cls) {
  const BinaryPlane* p = map.plane_of(cls);
  if (!p || !p->any()) return {NavStatus::NotMapped, {}, {}, Heading::N};
  return goto_cells(map, pose, p->cells());
}

}  // namespace homeworld
