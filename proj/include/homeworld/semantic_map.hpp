#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "homeworld/core.hpp"
#include "homeworld/registry.hpp"
#include "homeworld/similarity.hpp"
#include "homeworld/world.hpp"

namespace homeworld {

/// Dilation radius of the corrective-update neighbourhood (Chebyshev cells).
inline constexpr int kNeighborhoodRadius = 2;
/// Default pixel threshold for confirmed inventory.
inline constexpr int kPixelThreshold = 10;

class BinaryPlane {
 public:
  BinaryPlane() = default;
  BinaryPlane(int w, int h) : w_(w), h_(h), bits_(static_cast<std::size_t>(w) * h, 0) {
    if (w < 0 || h < 0) throw Error(ErrorCode::InvalidArgument, "negative plane size");
  }

  int width() const { return w_; }
  int height() const { return h_; }
  bool contains(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < w_ && c.y < h_; }

  bool get(Cell c) const { return contains(c) && bits_[index(c)] != 0; }
  void set(Cell c, bool v = true) {
    if (contains(c)) bits_[index(c)] = v ? 1 : 0;
  }

  bool any() const { return std::find(bits_.begin(), bits_.end(), 1) != bits_.end(); }
  int count() const { return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1)); }

  std::vector<Cell> cells() const {
    std::vector<Cell> out;
    for (int y = 0; y < h_; ++y)
      for (int x = 0; x < w_; ++x)
        if (bits_[index({x, y})]) out.push_back({x, y});
    return out;
  }

  bool same_shape(const BinaryPlane& o) const { return w_ == o.w_ && h_ == o.h_; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const BinaryPlane&, const BinaryPlane&) = default;

 private:
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * w_ + c.x; }

  int w_ = 0;
  int h_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Cells within Chebyshev distance r of any set cell.
inline BinaryPlane dilate(const BinaryPlane& p, int r) {
  BinaryPlane out(p.width(), p.height());
  for (const Cell& c : p.cells())
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) out.set({c.x + dx, c.y + dy});
  return out;
}

inline constexpr int kObstaclePlane = 0;
inline constexpr int kExploredPlane = 1;

struct SemanticMap {
  int width = 0;
  int height = 0;
  /// Nominal ground size of one cell, in centimetres (metadata only).
  int cell_size_cm = 5;
  std::vector<std::string> tracked;
  std::vector<BinaryPlane> planes;

  SemanticMap() = default;
  SemanticMap(int w, int h, std::vector<std::string> classes) : width(w), height(h), tracked(std::move(classes)) {
    planes.assign(2 + tracked.size(), BinaryPlane(w, h));
  }

  std::optional<int> channel_of(const std::string& cls) const {
    for (std::size_t i = 0; i < tracked.size(); ++i)
      if (tracked[i] == cls) return static_cast<int>(i) + 2;
    return std::nullopt;
  }

  const BinaryPlane& obstacles() const { return planes[kObstaclePlane]; }
  const BinaryPlane& explored() const { return planes[kExploredPlane]; }
  BinaryPlane& obstacles() { return planes[kObstaclePlane]; }
  BinaryPlane& explored() { return planes[kExploredPlane]; }

  /// Class plane, or nullptr when the class is not tracked.
  const BinaryPlane* plane_of(const std::string& cls) const {
    auto ch = channel_of(cls);
    return ch ? &planes[*ch] : nullptr;
  }

  bool has(const std::string& cls) const {
    const BinaryPlane* p = plane_of(cls);
    return p && p->any();
  }

  friend bool operator==(const SemanticMap&, const SemanticMap&) = default;
};

struct LocalMapFrame {
  std::vector<BinaryPlane> local;
  BinaryPlane observed;
  std::map<std::string, int> frame_pixels;

  friend bool operator==(const LocalMapFrame&, const LocalMapFrame&) = default;
};

struct InventoryVector {
  std::set<std::string> present;
  std::set<std::string> confirmed;
  int pixel_threshold = kPixelThreshold;
};

struct Neighborhood {
  BinaryPlane region;
  std::string target_class;
};

inline Neighborhood neighborhood(const SemanticMap& map, const std::string& cls, int r = kNeighborhoodRadius) {
  const BinaryPlane* p = map.plane_of(cls);
  if (!p) return {BinaryPlane(map.width, map.height), cls};
  return {dilate(*p, r), cls};
}

/// Classes mapped for an episode: every large or receptacle class, the goal
/// classes, and small classes scoring at least the Re-Plan threshold against
/// a goal class. Registry order is preserved.
inline std::vector<std::string> select_channels(const std::set<std::string>& goal_classes,
                                                const ClassRegistry& reg = default_registry(),
                                                const SimilarityProvider& sim = builtin_similarity()) {
  if (reg.empty()) throw Error(ErrorCode::InvalidArgument, "empty registry");
  for (const auto& g : goal_classes) reg.at(g);
  std::vector<std::string> out;
  for (const auto& c : reg.classes()) {
    bool keep = c.receptacle || c.large() || goal_classes.count(c.name);
    for (auto it = goal_classes.begin(); !keep && it != goal_classes.end(); ++it)
      keep = sim.knows(c.name) && sim.knows(*it) && sim.score(c.name, *it) >= kReplanThreshold;
    if (keep) out.push_back(c.name);
  }
  return out;
}

/// Rasterises one observation. Cells outside the map are dropped; the
/// agent's own cell counts as observed free space.
inline LocalMapFrame project(const Observation& obs, const AgentPose& pose, const std::vector<std::string>& tracked,
                             int width, int height) {
  LocalMapFrame f;
  f.local.assign(2 + tracked.size(), BinaryPlane(width, height));
  f.observed = BinaryPlane(width, height);
  for (const Cell& c : obs.observed_cells) {
    f.observed.set(c);
    f.local[kExploredPlane].set(c);
  }
  f.observed.set(pose.cell);
  f.local[kExploredPlane].set(pose.cell);
  for (const auto& [c, d] : obs.depth)
    if (f.observed.get(c)) f.local[kObstaclePlane].set(c);
  for (const auto& det : obs.detections) {
    auto it = std::find(tracked.begin(), tracked.end(), det.class_name);
    if (it == tracked.end()) continue;
    const auto ch = 2 + (it - tracked.begin());
    for (const Cell& c : det.cells)
      if (f.observed.get(c)) f.local[ch].set(c);
    int& px = f.frame_pixels[det.class_name];
    px = std::max(px, det.pixel_count);
  }
  return f;
}

/// Merges a frame into the map. Obstacles inside the observed area take the
/// frame's value (the ray hits are ground truth); explored and class planes
/// take the union. For `target`, when its neighbourhood is re-observed and
/// holds no detection of it, the observed part of the neighbourhood takes the
/// frame's values instead, which clears stale entries.
inline SemanticMap update(const SemanticMap& prev, const LocalMapFrame& frame,
                          const std::optional<std::string>& target = std::nullopt, bool correction = true,
                          int radius = kNeighborhoodRadius) {
  if (frame.local.size() != prev.planes.size())
    throw Error(ErrorCode::ShapeMismatch, "channel count differs");
  for (const auto& p : frame.local)
    if (p.width() != prev.width || p.height() != prev.height) throw Error(ErrorCode::ShapeMismatch, "plane size differs");
  if (frame.observed.width() != prev.width || frame.observed.height() != prev.height)
    throw Error(ErrorCode::ShapeMismatch, "observed plane size differs");

  SemanticMap next = prev;
  const int w = prev.width, h = prev.height;
  std::optional<int> target_ch;
  BinaryPlane nbr;
  if (correction && target) {
    target_ch = prev.channel_of(*target);
    if (target_ch) {
      nbr = dilate(prev.planes[*target_ch], radius);
      bool touches = false, seen_inside = false;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const Cell c{x, y};
          if (!nbr.get(c)) continue;
          touches |= frame.observed.get(c);
          seen_inside |= frame.local[*target_ch].get(c);
        }
      if (!touches || seen_inside) target_ch.reset();
    }
  }

  for (std::size_t ch = 0; ch < prev.planes.size(); ++ch) {
    const BinaryPlane& a = prev.planes[ch];
    const BinaryPlane& b = frame.local[ch];
    BinaryPlane& out = next.planes[ch];
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const Cell c{x, y};
        bool v;
        if (static_cast<int>(ch) == kObstaclePlane)
          v = frame.observed.get(c) ? b.get(c) : a.get(c);
        else if (target_ch && static_cast<int>(ch) == *target_ch && nbr.get(c))
          v = frame.observed.get(c) ? b.get(c) : a.get(c);
        else
          v = a.get(c) || b.get(c);
        out.set(c, v);
      }
  }
  return next;
}

inline void merge_pixels(std::map<std::string, int>& history, const std::map<std::string, int>& frame_pixels) {
  for (const auto& [cls, px] : frame_pixels) {
    int& best = history[cls];
    best = std::max(best, px);
  }
}

inline InventoryVector inventory(const SemanticMap& map, const std::map<std::string, int>& pixel_history,
                                 int p = kPixelThreshold) {
  if (p < 0) throw Error(ErrorCode::InvalidArgument, "pixel threshold must be >= 0");
  InventoryVector v;
  v.pixel_threshold = p;
  for (std::size_t i = 0; i < map.tracked.size(); ++i) {
    if (!map.planes[i + 2].any()) continue;
    const auto& cls = map.tracked[i];
    v.present.insert(cls);
    auto it = pixel_history.find(cls);
    if (p == 0 || (it != pixel_history.end() && it->second > p)) v.confirmed.insert(cls);
  }
  return v;
}

// ----------------------------------------------------------------------------
// Snapshot export
// ----------------------------------------------------------------------------

inline void write_pgm(const BinaryPlane& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'", path.string());
  out << "P5\n" << p.width() << " " << p.height() << "\n255\n";
  for (auto b : p.bits()) out.put(static_cast<char>(b ? 255 : 0));
}

/// Writes channel_NN.pgm per plane and manifest.json into `dir`.
inline void export_map(const SemanticMap& map, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.json");
  if (!manifest) throw Error(ErrorCode::Io, "cannot write manifest in '" + dir.string() + "'", dir.string());
  manifest << "{\n  \"width\": " << map.width << ",\n  \"height\": " << map.height
           << ",\n  \"cell_size_cm\": " << map.cell_size_cm << ",\n  \"channels\": [";
  for (std::size_t i = 0; i < map.planes.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "channel_%02zu.pgm", i);
    write_pgm(map.planes[i], dir / name);
    const std::string label = i == 0 ? "obstacles" : i == 1 ? "explored" : map.tracked[i - 2];
    manifest << (i ? ",\n" : "\n") << "    {\"index\": " << i << ", \"class\": \"" << label << "\", \"file\": \"" << name
             << "\"}";
  }
  manifest << "\n  ]\n}\n";
}

}  // namespace homeworld
