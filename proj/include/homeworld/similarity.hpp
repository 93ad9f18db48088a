#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "homeworld/bundled_data.hpp"
#include "homeworld/core.hpp"

namespace homeworld {

/// Re-Plan acceptance threshold; a candidate must score strictly above it.
inline constexpr double kReplanThreshold = 0.7;

using Vector = std::vector<double>;

/// Parses a `class,v1..vN` table. Rows must all have the same width.
inline std::map<std::string, Vector> parse_class_vectors(const std::string& csv) {
  std::map<std::string, Vector> out;
  std::istringstream in(csv);
  std::string row;
  int line = 0;
  std::size_t width = 0;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    if (line == 1 && row.rfind("class,", 0) == 0) continue;
    std::istringstream fields(row);
    std::string name, cell;
    std::getline(fields, name, ',');
    Vector v;
    while (std::getline(fields, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad number '" + cell + "'", cell, line);
      }
    }
    if (width == 0) width = v.size();
    if (v.empty() || v.size() != width)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": wrong column count", name, line);
    out[name] = std::move(v);
  }
  return out;
}

inline double cosine(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "vector widths differ");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Embedding backend: maps terms to vectors, one per term, same order.
using EmbedFn = std::function<std::vector<Vector>(const std::vector<std::string>&)>;

/// Scores class pairs in [0, 1]. The builtin kind reads the bundled table;
/// the external kind asks `embed` for vectors and caches them.
class SimilarityProvider {
 public:
  enum class Kind { Builtin, External };

  SimilarityProvider() = default;

  static SimilarityProvider from_vectors(std::map<std::string, Vector> vectors) {
    SimilarityProvider p;
    p.vectors_ = std::move(vectors);
    return p;
  }

  static SimilarityProvider external(EmbedFn embed) {
    SimilarityProvider p;
    p.kind_ = Kind::External;
    p.embed_ = std::move(embed);
    return p;
  }

  Kind kind() const { return kind_; }
  const std::map<std::string, Vector>& vectors() const { return vectors_; }

  void set_override(const std::string& a, const std::string& b, double score) {
    if (score < 0.0 || score > 1.0) throw Error(ErrorCode::InvalidArgument, "override score outside [0,1]");
    overrides_[key(a, b)] = score;
  }

  bool knows(const std::string& cls) const { return kind_ == Kind::External || vectors_.count(cls) != 0; }

  double score(const std::string& a, const std::string& b) const {
    if (a == b) return 1.0;
    if (auto it = overrides_.find(key(a, b)); it != overrides_.end()) return it->second;
    const double c = cosine(vector_of(a), vector_of(b));
    return std::clamp(c, 0.0, 1.0);
  }

  /// Prefetches vectors for `terms` in one external call. No-op for builtin.
  void warm(const std::vector<std::string>& terms) const {
    if (kind_ != Kind::External) return;
    std::vector<std::string> missing;
    for (const auto& t : terms)
      if (!vectors_.count(t) && std::find(missing.begin(), missing.end(), t) == missing.end()) missing.push_back(t);
    if (missing.empty()) return;
    std::vector<Vector> got;
    try {
      got = embed_(missing);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ServiceError, e.what());
    }
    if (got.size() != missing.size()) throw Error(ErrorCode::ServiceError, "embedding count does not match term count");
    for (std::size_t i = 0; i < missing.size(); ++i) vectors_[missing[i]] = std::move(got[i]);
  }

 private:
  static std::pair<std::string, std::string> key(const std::string& a, const std::string& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  }

  const Vector& vector_of(const std::string& cls) const {
    if (auto it = vectors_.find(cls); it != vectors_.end()) return it->second;
    if (kind_ == Kind::External) {
      warm({cls});
      return vectors_.at(cls);
    }
    throw Error(ErrorCode::UnknownClass, "no vector for class '" + cls + "'", cls);
  }

  Kind kind_ = Kind::Builtin;
  mutable std::map<std::string, Vector> vectors_;
  std::map<std::pair<std::string, std::string>, double> overrides_;
  EmbedFn embed_;
};

/// Provider backed by the bundled class_vectors_v1 table.
inline const SimilarityProvider& builtin_similarity() {
  static const SimilarityProvider p = SimilarityProvider::from_vectors(parse_class_vectors(bundled::kClassVectorsCsv));
  return p;
}

/// Scores `v` against each candidate.
inline std::map<std::string, double> similarity(const std::string& v, const std::set<std::string>& candidates,
                                                const SimilarityProvider& provider = builtin_similarity()) {
  if (candidates.empty()) throw Error(ErrorCode::InvalidArgument, "no candidates");
  if (!provider.knows(v)) throw Error(ErrorCode::UnknownClass, "no vector for class '" + v + "'", v);
  std::vector<std::string> terms{v};
  terms.insert(terms.end(), candidates.begin(), candidates.end());
  provider.warm(terms);
  std::map<std::string, double> out;
  for (const auto& c : candidates) out[c] = provider.score(v, c);
  return out;
}

}  // namespace homeworld
