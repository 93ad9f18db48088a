#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "homeworld/bundled_data.hpp"
#include "homeworld/core.hpp"
#include "homeworld/registry.hpp"

namespace homeworld {

struct Lexicon {
  std::string version;
  /// Verb phrase (lowercase, space separated) -> binary verb name.
  std::vector<std::pair<std::string, std::string>> verbs;
  std::set<std::string> toggle_verbs;
  std::set<std::string> determiners;
  std::set<std::string> qualifiers;
  std::set<std::string> prepositions;
  std::map<std::string, std::string> synonyms;
  std::map<std::string, int> numbers;
};

inline Lexicon parse_lexicon(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  Lexicon lx;
  try {
    lx.version = j.at("version").get<std::string>();
    for (const auto& v : j.at("verbs")) lx.verbs.emplace_back(v.at("phrase").get<std::string>(), v.at("verb").get<std::string>());
    lx.toggle_verbs = j.at("toggle_verbs").get<std::set<std::string>>();
    lx.determiners = j.at("determiners").get<std::set<std::string>>();
    lx.qualifiers = j.at("qualifiers").get<std::set<std::string>>();
    lx.prepositions = j.at("prepositions").get<std::set<std::string>>();
    lx.synonyms = j.at("synonyms").get<std::map<std::string, std::string>>();
    lx.numbers = j.at("numbers").get<std::map<std::string, int>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("lexicon: ") + e.what());
  }
  // Longest phrases first so "pick up" wins over "pick".
  std::stable_sort(lx.verbs.begin(), lx.verbs.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  return lx;
}

inline const Lexicon& default_lexicon() {
  static const Lexicon lx = parse_lexicon(bundled::kLexiconJson);
  return lx;
}

inline std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

/// Lowercases, turns punctuation into spaces and splits on whitespace.
inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || ch == '\'') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline std::string join(const std::vector<std::string>& words, std::size_t from = 0, std::size_t to = std::string::npos) {
  std::string out;
  to = std::min(to, words.size());
  for (std::size_t i = from; i < to; ++i) {
    if (!out.empty()) out += ' ';
    out += words[i];
  }
  return out;
}

/// "SinkBasin" -> "sink basin", "TVStand" -> "tv stand", "CD" -> "cd".
inline std::string noun_of(const std::string& cls) {
  std::string out;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const char c = cls[i];
    const bool upper = std::isupper(static_cast<unsigned char>(c));
    if (upper && i > 0) {
      const bool prev_lower = std::islower(static_cast<unsigned char>(cls[i - 1]));
      const bool next_lower = i + 1 < cls.size() && std::islower(static_cast<unsigned char>(cls[i + 1]));
      const bool prev_upper = std::isupper(static_cast<unsigned char>(cls[i - 1]));
      if (prev_lower || (prev_upper && next_lower)) out += ' ';
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

inline std::string plural_of(const std::string& noun) {
  const auto ends = [&](const char* s) {
    const std::string suf(s);
    return noun.size() >= suf.size() && noun.compare(noun.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends("knife")) return noun.substr(0, noun.size() - 2) + "ves";
  if (ends("s") || ends("sh") || ends("ch") || ends("x") || ends("to")) return noun + "es";
  return noun + "s";
}

/// Resolves a noun phrase to a registry class: synonym table first, then the
/// class name compared without spaces or case, then simple plural stripping.
/// Returns an empty string when nothing matches.
inline std::string resolve_noun(const std::string& noun, const ClassRegistry& reg = default_registry(),
                                const Lexicon& lx = default_lexicon()) {
  auto try_one = [&](const std::string& n) -> std::string {
    if (auto it = lx.synonyms.find(n); it != lx.synonyms.end() && reg.contains(it->second)) return it->second;
    std::string compact;
    for (char c : n)
      if (c != ' ') compact += c;
    for (const auto& c : reg.classes())
      if (lowercase(c.name) == compact) return c.name;
    return {};
  };
  if (noun.empty()) return {};
  if (auto r = try_one(noun); !r.empty()) return r;
  const auto strip = [&](std::size_t n, const std::string& add) {
    return noun.size() > n ? noun.substr(0, noun.size() - n) + add : std::string();
  };
  if (noun.size() > 3 && noun.compare(noun.size() - 3, 3, "ves") == 0)
    if (auto r = try_one(strip(3, "fe")); !r.empty()) return r;
  if (noun.size() > 2 && noun.compare(noun.size() - 2, 2, "es") == 0)
    if (auto r = try_one(strip(2, "")); !r.empty()) return r;
  if (noun.size() > 1 && noun.back() == 's')
    if (auto r = try_one(strip(1, "")); !r.empty()) return r;
  return {};
}

}  // namespace homeworld
