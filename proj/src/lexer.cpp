// Copyright 2026 The softlogic Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lexer.hpp"

#include <cctype>
#include <charconv>

namespace psl::detail {

namespace {

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token tok;
      tok.loc = {line_, column()};
      tok.line_start = line_start_;
      line_start_ = false;
      if (pos_ >= text_.size()) {
        tok.kind = Tok::kEnd;
        out.push_back(tok);
        return out;
      }
      lex_one(tok);
      out.push_back(std::move(tok));
    }
  }

 private:
  std::size_t column() const { return pos_ - line_begin_ + 1; }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void newline() {
    ++line_;
    line_begin_ = pos_;
    line_start_ = true;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++pos_;
        newline();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '/' && peek(1) == '*') {
        const SourceLocation start{line_, column()};
        pos_ += 2;
        for (;;) {
          if (pos_ >= text_.size()) throw ParseError(start, "unterminated block comment");
          if (text_[pos_] == '*' && peek(1) == '/') {
            pos_ += 2;
            break;
          }
          if (text_[pos_] == '\n') {
            ++pos_;
            newline();
          } else {
            ++pos_;
          }
        }
      } else {
        return;
      }
    }
  }

  void lex_one(Token& tok) {
    const char c = peek();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
      tok.kind = Tok::kIdent;
      tok.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_number(tok);
      return;
    }
    if (c == '"' || c == '\'') {
      lex_string(tok, c);
      return;
    }
    auto two = [&](char second) { return peek(1) == second; };
    auto emit = [&](Tok kind, std::size_t len) {
      tok.kind = kind;
      tok.text = std::string(text_.substr(pos_, len));
      pos_ += len;
    };
    switch (c) {
      case ':': return emit(Tok::kColon, 1);
      case '.': return emit(Tok::kDot, 1);
      case '^': return emit(Tok::kCaret, 1);
      case ',': return emit(Tok::kComma, 1);
      case '(': return emit(Tok::kLParen, 1);
      case ')': return emit(Tok::kRParen, 1);
      case '[': return emit(Tok::kLBracket, 1);
      case ']': return emit(Tok::kRBracket, 1);
      case '{': return emit(Tok::kLBrace, 1);
      case '}': return emit(Tok::kRBrace, 1);
      case '+': return emit(Tok::kPlus, 1);
      case '*': return emit(Tok::kStar, 1);
      case '/': return emit(Tok::kSlash, 1);
      case '@': return emit(Tok::kAt, 1);
      case '?': return emit(Tok::kQuestion, 1);
      case '~': return emit(Tok::kBang, 1);
      case '=': return emit(Tok::kEq, 1);
      case '-': return two('>') ? emit(Tok::kImplies, 2) : emit(Tok::kMinus, 1);
      case '|': return two('|') ? emit(Tok::kPipe, 2) : emit(Tok::kPipe, 1);
      case '&': return two('&') ? emit(Tok::kAmp, 2) : emit(Tok::kAmp, 1);
      case '!': return two('=') ? emit(Tok::kNotEq, 2) : emit(Tok::kBang, 1);
      case '<':
        if (two('=')) return emit(Tok::kLessEq, 2);
        if (two('-') || two('<')) return emit(Tok::kImpliedBy, 2);
        break;
      case '>':
        if (two('=')) return emit(Tok::kGreaterEq, 2);
        if (two('>')) return emit(Tok::kImplies, 2);
        break;
      default:
        break;
    }
    throw ParseError(tok.loc, std::string("unexpected character '") + c + "'");
  }

  void lex_number(Token& tok) {
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    // A dot only belongs to the number when a digit follows; `1 .` and `1.`
    // end hard rules.
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t ahead = 1;
      if (peek(1) == '+' || peek(1) == '-') ahead = 2;
      if (std::isdigit(static_cast<unsigned char>(peek(ahead)))) {
        pos_ += ahead;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      }
    }
    tok.kind = Tok::kNumber;
    tok.text = std::string(text_.substr(start, pos_ - start));
    const auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.number);
    if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
      throw ParseError(tok.loc, "malformed number '" + tok.text + "'");
    }
  }

  void lex_string(Token& tok, char quote) {
    ++pos_;
    std::string value;
    for (;;) {
      if (pos_ >= text_.size() || peek() == '\n') throw ParseError(tok.loc, "unterminated constant");
      char c = text_[pos_++];
      if (c == quote) break;
      if (c == '\\') {
        if (pos_ >= text_.size()) throw ParseError(tok.loc, "unterminated constant");
        c = text_[pos_++];
      }
      value += c;
    }
    tok.kind = Tok::kString;
    tok.text = std::move(value);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_begin_ = 0;
  bool line_start_ = true;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

std::string describe(const Token& token) {
  switch (token.kind) {
    case Tok::kEnd:
      return "end of input";
    case Tok::kIdent:
      return "identifier '" + token.text + "'";
    case Tok::kNumber:
      return "number " + token.text;
    case Tok::kString:
      return "constant \"" + token.text + "\"";
    default:
      return "'" + token.text + "'";
  }
}

}  // namespace psl::detail
