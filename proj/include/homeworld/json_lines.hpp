#pragma once

#include <cctype>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>

namespace homeworld {

/// Maps JSON pointers ("/objects/2/cell") to the 1-based line on which the
/// value starts. Expects syntactically valid JSON; nlohmann/json does not
/// keep source positions, so loaders use this for error reporting.
class JsonLineIndex {
 public:
  explicit JsonLineIndex(std::string_view text) : text_(text) {
    skip_ws();
    if (pos_ < text_.size()) value("");
  }

  /// Line of `pointer`, falling back to its nearest recorded ancestor.
  int line(std::string pointer) const {
    while (true) {
      if (auto it = lines_.find(pointer); it != lines_.end()) return it->second;
      if (pointer.empty()) return 1;
      pointer.erase(pointer.rfind('/'));
    }
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string string_token() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
        out.push_back(text_[pos_ + 1]);
        pos_ += 2;
        continue;
      }
      if (text_[pos_] == '\n') ++line_;
      out.push_back(text_[pos_++]);
    }
    ++pos_;  // closing quote
    return out;
  }

  void value(const std::string& pointer) {
    skip_ws();
    if (pos_ >= text_.size()) return;
    lines_.emplace(pointer, line_);
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '}') { ++pos_; return; }
      while (pos_ < text_.size()) {
        skip_ws();
        std::string key = string_token();
        skip_ws();
        ++pos_;  // ':'
        value(pointer + "/" + key);
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') { ++pos_; continue; }
        ++pos_;  // '}'
        return;
      }
    } else if (c == '[') {
      ++pos_;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ']') { ++pos_; return; }
      for (int i = 0; pos_ < text_.size(); ++i) {
        value(pointer + "/" + std::to_string(i));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') { ++pos_; continue; }
        ++pos_;  // ']'
        return;
      }
    } else if (c == '"') {
      string_token();
    } else {
      while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}' && text_[pos_] != ']' &&
             !std::isspace(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

inline int line_of_offset(std::string_view text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace homeworld
