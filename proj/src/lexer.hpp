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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "psl/error.hpp"

namespace psl::detail {

enum class Tok {
  kIdent,
  kNumber,
  kString,
  kColon,
  kDot,
  kCaret,
  kComma,
  kLParen,
  kRParen,
  kLBracket,
  kRBracket,
  kLBrace,
  kRBrace,
  kPlus,
  kMinus,
  kStar,
  kSlash,
  kAt,
  kPipe,
  kAmp,
  kBang,
  kNotEq,
  kLessEq,
  kGreaterEq,
  kEq,
  kImplies,    // -> or >>
  kImpliedBy,  // <- or <<
  kQuestion,
  kEnd,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;  // identifier, unescaped string, or the raw lexeme
  double number = 0.0;
  SourceLocation loc;
  bool line_start = false;  // first token on its line
};

// `||` and `&&` lex as single kPipe / kAmp tokens flagged by their text; `~`
// lexes as kBang. Comments are `//` to end of line and `/* ... */`.
std::vector<Token> tokenize(std::string_view text);

std::string describe(const Token& token);

}  // namespace psl::detail
