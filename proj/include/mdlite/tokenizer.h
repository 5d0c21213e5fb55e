#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mdlite/error.h"

namespace mdlite {

struct Token {
  std::string text;
  /// 0-based byte column of the first character of `text` in the source
  /// line. For a quoted token this is the column just after the opening quote.
  std::size_t column = 0;
  bool quoted = false;

  /// Span to highlight when this token is at fault; quoted tokens include
  /// their quotes.
  CaretSpan span() const {
    return quoted ? CaretSpan{column - 1, column + text.size() + 1}
                  : CaretSpan{column, column + text.size()};
  }
};

struct TokenStream {
  std::vector<Token> tokens;
  std::string source_line;
  int line_number = 0;

  bool empty() const { return tokens.empty(); }
  std::size_t size() const { return tokens.size(); }
  const Token& operator[](std::size_t i) const { return tokens[i]; }
};

/// Splits a single logical line into whitespace-separated tokens. Comments
/// are dropped, double-quoted groups become one token, and non-ASCII bytes
/// are rejected.
TokenStream tokenize(std::string_view line, int line_number = 0);

struct LogicalLine {
  std::string text;
  /// Number of the first physical line.
  int line_number = 0;
};

/// Merges `&` continuations, drops blank and comment-only lines.
std::vector<LogicalLine> split_logical_lines(std::string_view text);

/// Reads `path` and splits it; IoFailure is reported as E-IO.
std::vector<LogicalLine> read_logical_lines(const std::string& path);

/// Replaces `${name}` references. Unknown names raise E-UNDEFINED-VAR with
/// the caret on the reference.
std::string expand_variables(std::string_view line, const std::map<std::string, std::string>& vars);

}  // namespace mdlite
