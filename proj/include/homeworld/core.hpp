#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace homeworld {

// ----------------------------------------------------------------------------
// Errors
// ----------------------------------------------------------------------------

enum class ErrorCode {
  InvalidArgument,
  SceneInvalid,
  ParseError,
  UnknownClass,
  ShapeMismatch,
  UnsupportedTemplate,
  ArityMismatch,
  NoFeasibleAppliance,
  UnknownVerb,
  UnknownObject,
  UnplannableInstruction,
  Transport,
  MalformedResponse,
  UnmatchablePhrase,
  ServiceError,
  EmptyInventory,
  GenerationFailure,
  IdMismatch,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SceneInvalid: return "SceneInvalid";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UnsupportedTemplate: return "UnsupportedTemplate";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::NoFeasibleAppliance: return "NoFeasibleAppliance";
    case ErrorCode::UnknownVerb: return "UnknownVerb";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::UnplannableInstruction: return "UnplannableInstruction";
    case ErrorCode::Transport: return "Transport";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::UnmatchablePhrase: return "UnmatchablePhrase";
    case ErrorCode::ServiceError: return "ServiceError";
    case ErrorCode::EmptyInventory: return "EmptyInventory";
    case ErrorCode::GenerationFailure: return "GenerationFailure";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code. `token` holds the offending
/// word, class name or index where one exists; `line` is 1-based or 0.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string token = {}, int line = 0)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        token_(std::move(token)),
        line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& token() const noexcept { return token_; }
  int line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::string token_;
  int line_;
};

// ----------------------------------------------------------------------------
// Grid geometry
// ----------------------------------------------------------------------------

/// Grid cell; x grows east, y grows south.
struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(const Cell&, const Cell&) = default;
  // Row-major order (y, then x) so sets of cells iterate like a raster scan.
  friend constexpr std::strong_ordering operator<=>(const Cell& a, const Cell& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

struct CellHash {
  std::size_t operator()(const Cell& c) const noexcept {
    return std::hash<std::int64_t>{}((static_cast<std::int64_t>(c.y) << 32) ^ static_cast<std::uint32_t>(c.x));
  }
};

enum class Heading { N = 0, E = 1, S = 2, W = 3 };

inline constexpr Heading kHeadings[] = {Heading::N, Heading::E, Heading::S, Heading::W};

inline constexpr Cell heading_vector(Heading h) {
  switch (h) {
    case Heading::N: return {0, -1};
    case Heading::E: return {1, 0};
    case Heading::S: return {0, 1};
    case Heading::W: return {-1, 0};
  }
  return {0, 0};
}

inline constexpr Heading rotate_left(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 3) % 4); }
inline constexpr Heading rotate_right(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 1) % 4); }

inline constexpr Cell step_cell(Cell c, Heading h) {
  auto d = heading_vector(h);
  return {c.x + d.x, c.y + d.y};
}

inline std::string_view to_string(Heading h) {
  switch (h) {
    case Heading::N: return "N";
    case Heading::E: return "E";
    case Heading::S: return "S";
    case Heading::W: return "W";
  }
  return "?";
}

inline Heading heading_from_string(std::string_view s) {
  if (s == "N") return Heading::N;
  if (s == "E") return Heading::E;
  if (s == "S") return Heading::S;
  if (s == "W") return Heading::W;
  throw Error(ErrorCode::InvalidArgument, "bad heading '" + std::string(s) + "'", std::string(s));
}

inline int chebyshev(Cell a, Cell b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

/// Interaction range, in cells (Chebyshev).
inline constexpr int kInteractionRange = 3;
/// Forward view range, in cells.
inline constexpr int kViewRange = 15;

/// 90 degree view wedge: 1 <= forward <= range and |lateral| <= forward.
inline bool in_wedge(Cell from, Heading h, Cell target, int range = kViewRange) {
  const Cell d{target.x - from.x, target.y - from.y};
  const Cell f = heading_vector(h);
  const int forward = d.x * f.x + d.y * f.y;
  const int lateral = d.x * f.y - d.y * f.x;
  return forward >= 1 && forward <= range && std::abs(lateral) <= forward;
}

/// Bresenham line of sight. Endpoints are never tested; every intermediate
/// cell must satisfy !blocked(cell).
template <typename BlockedFn>
bool line_of_sight(Cell from, Cell to, BlockedFn&& blocked) {
  int x0 = from.x, y0 = from.y;
  const int dx = std::abs(to.x - x0), dy = -std::abs(to.y - y0);
  const int sx = x0 < to.x ? 1 : -1, sy = y0 < to.y ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (x0 == to.x && y0 == to.y) return true;
    const int e2 = 2 * err;
    if (e2 >= dy) { err += dy; x0 += sx; }
    if (e2 <= dx) { err += dx; y0 += sy; }
    if (x0 == to.x && y0 == to.y) return true;
    if (blocked(Cell{x0, y0})) return false;
  }
}

// ----------------------------------------------------------------------------
// Deterministic randomness
// ----------------------------------------------------------------------------

// std:: distributions are implementation-defined; these helpers are not.
using Rng = std::mt19937_64;

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n), by rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do { v = rng(); } while (v >= limit);
  return v % n;
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace homeworld
