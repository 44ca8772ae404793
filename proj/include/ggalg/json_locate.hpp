//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cctype>
#include <cstddef>
#include <iterator>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ggalg/error.hpp"

namespace ggalg {

struct TextPosition {
  std::size_t line = 1;
  std::size_t column = 1;
};

// 1-based line and column (in bytes) of a byte offset.
inline TextPosition position_of(const std::string& text, std::size_t offset) {
  TextPosition p;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++p.line;
      p.column = 1;
    } else {
      ++p.column;
    }
  }
  return p;
}

namespace detail {

// Reports how far the parser has read through `consumed`.
struct TrackingIterator {
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  const char* base = nullptr;
  std::size_t* consumed = nullptr;

  reference operator*() const { return *p; }
  TrackingIterator& operator++() {
    ++p;
    *consumed = static_cast<std::size_t>(p - base);
    return *this;
  }
  TrackingIterator operator++(int) {
    auto t = *this;
    ++*this;
    return t;
  }
  bool operator==(const TrackingIterator& o) const { return p == o.p; }
};

inline std::string escape_pointer_token(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

class LocatingSax {
 public:
  using json = nlohmann::json;

  LocatingSax(const std::string& text, const std::size_t& consumed, std::map<std::string, std::size_t>& out)
      : text_(text), consumed_(consumed), out_(out) {}

  bool null() { return scalar(literal_start()); }
  bool boolean(bool) { return scalar(literal_start()); }
  bool number_integer(json::number_integer_t) { return scalar(number_start()); }
  bool number_unsigned(json::number_unsigned_t) { return scalar(number_start()); }
  bool number_float(json::number_float_t, const json::string_t&) { return scalar(number_start()); }
  bool string(json::string_t&) { return scalar(string_start()); }
  bool binary(json::binary_t&) { return scalar(consumed_); }
  bool start_object(std::size_t) { return open(false); }
  bool start_array(std::size_t) { return open(true); }
  bool key(json::string_t& k) {
    stack_.back().key = k;
    return true;
  }
  bool end_object() { return close(); }
  bool end_array() { return close(); }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) { return false; }

 private:
  struct Frame {
    bool array = false;
    std::size_t next = 0;
    std::string key;
  };

  std::string pointer() const {
    std::string out;
    for (const auto& f : stack_) out += "/" + (f.array ? std::to_string(f.next) : escape_pointer_token(f.key));
    return out;
  }
  void after_value() {
    if (!stack_.empty() && stack_.back().array) ++stack_.back().next;
  }
  bool scalar(std::size_t start) {
    out_.emplace(pointer(), start);
    after_value();
    return true;
  }
  bool open(bool array) {
    out_.emplace(pointer(), consumed_ == 0 ? 0 : consumed_ - 1);
    stack_.push_back({array, 0, {}});
    return true;
  }
  bool close() {
    stack_.pop_back();
    after_value();
    return true;
  }

  // The lexer reads one character past a number before reporting it.
  std::size_t number_start() const {
    auto numeric = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.' || c == 'e' || c == 'E'; };
    std::size_t i = consumed_;
    if (i > 0 && !numeric(text_[i - 1])) --i;
    while (i > 0 && numeric(text_[i - 1])) --i;
    return i;
  }
  std::size_t literal_start() const {
    std::size_t i = consumed_;
    while (i > 0 && std::isalpha(static_cast<unsigned char>(text_[i - 1]))) --i;
    return i;
  }
  std::size_t string_start() const {
    if (consumed_ < 2) return 0;
    for (std::size_t i = consumed_ - 1; i-- > 0;) {
      if (text_[i] != '"') continue;
      std::size_t slashes = 0;
      while (slashes < i && text_[i - 1 - slashes] == '\\') ++slashes;
      if (slashes % 2 == 0) return i;
    }
    return 0;
  }

  const std::string& text_;
  const std::size_t& consumed_;
  std::map<std::string, std::size_t>& out_;
  std::vector<Frame> stack_;
};

}  // namespace detail

// A parsed JSON document that remembers where each value starts, so that
// semantic errors can name a line and column.
class LocatedJson {
 public:
  using json = nlohmann::json;

  // Throws ParseError on malformed JSON.
  explicit LocatedJson(std::string text) : text_(std::move(text)) {
    try {
      root_ = json::parse(text_);
    } catch (const json::parse_error& e) {
      const std::size_t at = e.byte == 0 ? 0 : e.byte - 1;
      const auto p = position_of(text_, at);
      std::string what = e.what();
      if (auto colon = what.rfind(": "); colon != std::string::npos) what = what.substr(colon + 2);
      throw ParseError("malformed JSON: " + what, p.line, p.column);
    }
    std::size_t consumed = 0;
    detail::TrackingIterator first{text_.data(), text_.data(), &consumed};
    detail::TrackingIterator last{text_.data() + text_.size(), text_.data(), &consumed};
    detail::LocatingSax sax(text_, consumed, starts_);
    json::sax_parse(first, last, &sax);
  }

  const json& root() const { return root_; }
  const std::string& text() const { return text_; }

  // Position of the value at `pointer`, or of its nearest located ancestor.
  TextPosition position(std::string pointer) const {
    for (;;) {
      auto it = starts_.find(pointer);
      if (it != starts_.end()) return position_of(text_, it->second);
      if (pointer.empty()) return {};
      pointer.erase(pointer.rfind('/'));
    }
  }

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    const auto p = position(pointer);
    throw ParseError(message, p.line, p.column);
  }

 private:
  std::string text_;
  json root_;
  std::map<std::string, std::size_t> starts_;
};

}  // namespace ggalg
