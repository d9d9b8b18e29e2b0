#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "gpaplan/error.hpp"

namespace gpaplan::ppddl {

struct SourcePos {
  int line = 1;
  int column = 1;
};

// PDDL is case-insensitive; atoms are lower-cased on read.
struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  SourcePos pos;

  bool is_atom() const { return !is_list; }
  bool is_atom(std::string_view text) const { return !is_list && atom == text; }
  bool head_is(std::string_view text) const {
    return is_list && !items.empty() && items.front().is_atom(text);
  }
};

inline std::string where(const SourcePos& pos) {
  return "line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column);
}

class SExprReader {
 public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_blank();
    while (i_ < text_.size()) {
      out.push_back(read());
      skip_blank();
    }
    return out;
  }

 private:
  std::string_view text_;
  std::size_t i_ = 0;
  SourcePos pos_;

  void advance() {
    if (text_[i_] == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    ++i_;
  }

  void skip_blank() {
    while (i_ < text_.size()) {
      const char c = text_[i_];
      if (c == ';') {
        while (i_ < text_.size() && text_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    SExpr e;
    e.pos = pos_;
    const char c = text_[i_];
    if (c == ')') throw Error(ErrorCode::Syntax, "unexpected ')' at " + where(pos_));
    if (c == '(') {
      e.is_list = true;
      advance();
      skip_blank();
      while (true) {
        if (i_ >= text_.size())
          throw Error(ErrorCode::Syntax, "unterminated list opened at " + where(e.pos));
        if (text_[i_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
        skip_blank();
      }
      return e;
    }
    while (i_ < text_.size()) {
      const char d = text_[i_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      e.atom.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(d))));
      advance();
    }
    return e;
  }
};

inline std::vector<SExpr> read_sexprs(std::string_view text) { return SExprReader(text).read_all(); }

}  // namespace gpaplan::ppddl
