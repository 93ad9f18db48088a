#pragma once

#include <regex>
#include <string>

#include "homeworld/planning.hpp"

namespace homeworld {

struct Instruction {
  std::string text;
  std::optional<std::string> prefix;
};

struct ParsedInstruction {
  TaskSpec spec;
  PrefixAssertions prefix;
};

namespace detail {

inline std::string resolve_or_throw(const std::string& noun, const ClassRegistry& reg, const Lexicon& lx) {
  std::string n = noun;
  // trim
  while (!n.empty() && n.back() == ' ') n.pop_back();
  while (!n.empty() && n.front() == ' ') n.erase(n.begin());
  std::string c = resolve_noun(n, reg, lx);
  if (c.empty()) throw Error(ErrorCode::UnplannableInstruction, "unknown object '" + n + "'", n);
  return c;
}

inline std::string normalize_instruction(const std::string& text) {
  std::string s = join(tokenize(text));
  // keep commas out; tokenize already dropped punctuation
  for (const char* lead : {"how to ", "how do i ", "how can i ", "please ", "can you ", "could you "})
    if (s.rfind(lead, 0) == 0) s = s.substr(std::string(lead).size());
  return s;
}

/// Splits "there is a stove and no microwave ..." clauses off the front.
/// Returns the remaining instruction.
inline std::string split_prefix(const std::string& text, PrefixAssertions& out, const ClassRegistry& reg,
                                const Lexicon& lx) {
  // Sentences are split on '.', ';' and '?' before normalisation.
  std::vector<std::string> sentences;
  std::string cur;
  for (char c : text) {
    if (c == '.' || c == ';' || c == '?') {
      sentences.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  sentences.push_back(cur);
  std::string rest;
  for (auto& raw : sentences) {
    auto words = tokenize(raw);
    if (words.empty()) continue;
    const bool prefix = words.size() >= 2 && words[0] == "there" && (words[1] == "is" || words[1] == "are");
    if (!prefix) {
      // "there is a stove and no microwave, how to heat an apple" in one sentence
      if (!rest.empty()) rest += " ";
      rest += raw;
      continue;
    }
    // Items separated by "and" or commas; a trailing "how to ..." belongs to the instruction.
    std::size_t i = 2;
    std::vector<std::string> item;
    auto flush = [&] {
      if (item.empty()) return;
      bool absent = false;
      std::vector<std::string> noun;
      for (const auto& w : item) {
        if (w == "no" || w == "not" || w == "without") absent = true;
        else if (!lx.determiners.count(w) && w != "is" && w != "are" && w != "there") noun.push_back(w);
      }
      item.clear();
      if (noun.empty()) return;
      const std::string cls = resolve_or_throw(join(noun), reg, lx);
      (absent ? out.absent : out.present).insert(cls);
    };
    for (; i < words.size(); ++i) {
      if (words[i] == "how" || words[i] == "please") break;
      if (words[i] == "and" || words[i] == "but") { flush(); continue; }
      item.push_back(words[i]);
    }
    flush();
    if (i < words.size()) {
      if (!rest.empty()) rest += " ";
      rest += join(words, i);
    }
  }
  return rest;
}

}  // namespace detail

/// Parses the built-in instruction patterns (the twelve task types, "from
/// the X" source clauses and "there is ..." prefixes). Throws
/// UnplannableInstruction when nothing matches.
inline ParsedInstruction parse_instruction(const std::string& text, const ClassRegistry& reg = default_registry(),
                                           const Lexicon& lx = default_lexicon()) {
  ParsedInstruction out;
  const std::string body = detail::normalize_instruction(detail::split_prefix(text, out.prefix, reg, lx));
  if (body.empty()) throw Error(ErrorCode::UnplannableInstruction, "empty instruction");

  auto R = [&](const std::string& cls) { return detail::resolve_or_throw(cls, reg, lx); };
  auto number = [&](const std::string& w) {
    if (auto it = lx.numbers.find(w); it != lx.numbers.end()) return it->second;
    if (w == "the") return 1;
    return std::atoi(w.c_str());
  };

  static const std::string D = "(?:(?:a|an|the|some|two|three|four) )?";
  static const std::string N = "([a-z][a-z ]*?)";
  static const std::string P = "(?:in|on|into|onto|inside|to|at)";
  static const std::string PUT = "(?:put|place|set|move|bring|take)";
  static const std::string THEN = "(?: and| then| and then)";
  std::smatch m;

  // slice a tomato, put the knife in the sink and put the sliced tomato in the fridge
  static const std::regex slice_re("^(?:slice|cut) " + D + N + "(?: " + PUT + " the knife " + P + " " + D + N + ")?" +
                                   THEN + "? " + PUT + " (?:it|them|the sliced " + N + "|the slices) " + P + " " + D +
                                   N + "$");
  if (std::regex_match(body, m, slice_re)) {
    out.spec.type = TaskType::PickAndPlace;
    out.spec.objects = {R(m[1]), R(m[4])};
    out.spec.slice = true;
    if (m[2].matched) out.spec.knife_dest = R(m[2]);
    return out;
  }

  // heat a sliced tomato in a plate and put the plate on the table
  static const std::regex stack_temp_re("^(heat|warm|cool|chill) " + D + "sliced " + N + " (?:in|on|with) " + D + N +
                                        THEN + " " + PUT + " (?:it|the " + N + ") " + P + " " + D + N + "$");
  if (std::regex_match(body, m, stack_temp_re)) {
    const bool heat = m[1] == "heat" || m[1] == "warm";
    out.spec.type = heat ? TaskType::StackAndHeatAndPlace : TaskType::StackAndCoolAndPlace;
    out.spec.objects = {R(m[2]), R(m[3]), R(m[5])};
    return out;
  }

  // put two knives in a plate and put the plate in the sink
  // put a credit card in a box and put the box on a shelf
  static const std::regex stack_re("^" + PUT + " (a|an|the|one|two) " + N + "(?: from " + D + N + ")? " + P + " " + D +
                                   N + THEN + " " + PUT + " (?:it|the " + N + ") " + P + " " + D + N + "$");
  if (std::regex_match(body, m, stack_re)) {
    const int n = number(m[1]);
    out.spec.type = n == 2 ? TaskType::PickTwoAndStackAndPlace : TaskType::StackAndPlace;
    out.spec.objects = {R(m[2]), R(m[4]), R(m[6])};
    if (m[3].matched) out.spec.source = R(m[3]);
    return out;
  }

  // clean two spoons and put them on the counter
  static const std::regex clean_two_re("^(?:clean|rinse|wash) two " + N + "(?: from " + D + N + ")?" + THEN + " " +
                                       PUT + " (?:them|it|the " + N + ") " + P + " " + D + N + "$");
  if (std::regex_match(body, m, clean_two_re)) {
    out.spec.type = TaskType::PickTwoAndCleanAndPlace;
    out.spec.objects = {R(m[1]), R(m[4])};
    if (m[2].matched) out.spec.source = R(m[2]);
    return out;
  }

  // heat an apple with the microwave and put it on the table
  static const std::regex temp_re("^(clean|rinse|wash|heat|warm|cool|chill) " + D + N + "(?: from " + D + N + ")?" +
                                  "(?: (?:with|in|on|using) " + D + "(microwave|stove|stove burner|burner))?" +
                                  "(?:" + THEN + "? " + PUT + " (?:it|the " + N + ") " + P + " " + D + N + ")?$");
  if (std::regex_match(body, m, temp_re)) {
    const std::string v = m[1];
    out.spec.type = (v == "clean" || v == "rinse" || v == "wash") ? TaskType::CleanAndPlace
                    : (v == "heat" || v == "warm")                 ? TaskType::HeatAndPlace
                                                                   : TaskType::CoolAndPlace;
    out.spec.objects = {R(m[2])};
    if (m[3].matched) out.spec.source = R(m[3]);
    if (m[4].matched) {
      if (out.spec.type != TaskType::HeatAndPlace)
        throw Error(ErrorCode::UnplannableInstruction, "appliance clause only applies to heating", m[4]);
      out.spec.heat_appliance = R(m[4]);
    }
    if (m[6].matched) out.spec.objects.push_back(R(m[6]));
    return out;
  }

  // examine a box under the floor lamp
  static const std::regex examine_re("^(?:examine|look at|inspect|check) " + D + N + "(?: from " + D + N + ")?" +
                                     " (?:under|by|with|in) (?:the light of )?" + D + N + "$");
  if (std::regex_match(body, m, examine_re)) {
    out.spec.type = TaskType::ExamineInLight;
    out.spec.objects = {R(m[1]), R(m[3])};
    if (m[2].matched) out.spec.source = R(m[2]);
    return out;
  }

  // put four books on the desk / put an apple from the fridge in the garbage can
  static const std::regex pick_re("^" + PUT + " (a|an|the|one|two|three|four) " + N + "(?: from " + D + N + ")? " + P +
                                  " " + D + N + "$");
  if (std::regex_match(body, m, pick_re)) {
    const int n = number(m[1]);
    out.spec.type = n == 2 ? TaskType::PickTwoAndPlace : n == 3 ? TaskType::PickThreeAndPlace : TaskType::PickAndPlace;
    out.spec.count = out.spec.type == TaskType::PickAndPlace ? n : 1;
    out.spec.objects = {R(m[2]), R(m[4])};
    if (m[3].matched) out.spec.source = R(m[3]);
    return out;
  }

  throw Error(ErrorCode::UnplannableInstruction, "no built-in pattern matches '" + body + "'", body);
}

inline std::string render_prefix(const PrefixAssertions& p) {
  if (p.empty()) return {};
  std::string s = "There is";
  bool first = true;
  for (const auto& c : p.present) {
    s += (first ? " a " : " and a ") + noun_of(c);
    first = false;
  }
  for (const auto& c : p.absent) {
    s += (first ? " no " : " and no ") + noun_of(c);
    first = false;
  }
  return s + ".";
}

/// Instruction text the parser maps back to `spec`.
inline std::string render_instruction(const TaskSpec& spec, const PrefixAssertions& prefix = {}) {
  const auto& o = spec.objects;
  auto the = [](const std::string& c) { return "the " + noun_of(c); };
  auto a = [](const std::string& c) {
    const std::string n = noun_of(c);
    return std::string(std::string("aeiou").find(n[0]) != std::string::npos ? "an " : "a ") + n;
  };
  auto from = [&] { return spec.source ? " from " + the(*spec.source) : std::string(); };
  auto prep = [](const std::string& r) { return std::string(put_preposition(r)); };
  static const char* words[] = {"", "a", "two", "three", "four"};
  std::string s;
  switch (spec.type) {
    case TaskType::PickAndPlace:
    case TaskType::PickTwoAndPlace:
    case TaskType::PickThreeAndPlace: {
      if (spec.slice) {
        s = "slice " + a(o[0]);
        if (spec.knife_dest) s += ", put the knife " + prep(*spec.knife_dest) + " " + the(*spec.knife_dest) + ",";
        s += " and put the sliced " + noun_of(o[0]) + " " + prep(o[1]) + " " + the(o[1]);
        break;
      }
      const int n = multiplicity(spec);
      s = "put " + (n == 1 ? a(o[0]) : std::string(words[n]) + " " + plural_of(noun_of(o[0]))) + from() + " " +
          prep(o[1]) + " " + the(o[1]);
      break;
    }
    case TaskType::StackAndPlace:
      s = "put " + a(o[0]) + from() + " in " + a(o[1]) + " and put the " + noun_of(o[1]) + " " + prep(o[2]) + " " +
          the(o[2]);
      break;
    case TaskType::PickTwoAndStackAndPlace:
      s = "put two " + plural_of(noun_of(o[0])) + from() + " in " + a(o[1]) + " and put the " + noun_of(o[1]) + " " +
          prep(o[2]) + " " + the(o[2]);
      break;
    case TaskType::CleanAndPlace:
    case TaskType::HeatAndPlace:
    case TaskType::CoolAndPlace: {
      const std::string verb = spec.type == TaskType::CleanAndPlace  ? "clean"
                               : spec.type == TaskType::HeatAndPlace ? "heat"
                                                                     : "cool";
      s = verb + " " + a(o[0]) + from();
      if (spec.type == TaskType::HeatAndPlace && spec.heat_appliance != "Microwave")
        s += " on the " + noun_of(spec.heat_appliance);
      if (o.size() == 2) s += " and put it " + prep(o[1]) + " " + the(o[1]);
      break;
    }
    case TaskType::ExamineInLight: s = "examine " + a(o[0]) + from() + " under " + the(o[1]); break;
    case TaskType::PickTwoAndCleanAndPlace:
      s = "clean two " + plural_of(noun_of(o[0])) + from() + " and put them " + prep(o[1]) + " " + the(o[1]);
      break;
    case TaskType::StackAndHeatAndPlace:
    case TaskType::StackAndCoolAndPlace:
      s = std::string(spec.type == TaskType::StackAndHeatAndPlace ? "heat" : "cool") + " a sliced " + noun_of(o[0]) +
          " in " + a(o[1]) + " and put the " + noun_of(o[1]) + " " + prep(o[2]) + " " + the(o[2]);
      break;
  }
  const std::string pre = render_prefix(prefix);
  return pre.empty() ? s : pre + " " + s;
}

}  // namespace homeworld
