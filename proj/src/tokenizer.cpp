#include "mdlite/tokenizer.h"

#include <fmt/format.h>

#include "mdlite/utils.h"

namespace mdlite {

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

}  // namespace

TokenStream tokenize(std::string_view line, int line_number) {
  TokenStream ts;
  ts.source_line = std::string(line);
  ts.line_number = line_number;

  if (std::size_t bad = utils::first_non_ascii(line); bad != std::string_view::npos) {
    throw EngineError(codes::non_ascii, "non-ASCII character in input", CaretSpan{bad, bad + 1});
  }

  const std::string body = utils::strip_comment(line);
  std::size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && is_blank(body[i])) ++i;
    if (i >= body.size()) break;
    if (body[i] == '"') {
      const std::size_t open = i;
      const std::size_t close = body.find('"', open + 1);
      if (close == std::string::npos) {
        throw EngineError(codes::unterminated_quote, "unterminated quoted string",
                          CaretSpan{open, line.size()});
      }
      ts.tokens.push_back({body.substr(open + 1, close - open - 1), open + 1, true});
      i = close + 1;
      continue;
    }
    const std::size_t start = i;
    while (i < body.size() && !is_blank(body[i])) ++i;
    ts.tokens.push_back({body.substr(start, i - start), start, false});
  }
  return ts;
}

std::vector<LogicalLine> split_logical_lines(std::string_view text) {
  std::vector<LogicalLine> out;
  std::string pending;
  int pending_start = 0;
  bool continuing = false;
  int number = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(pos, nl - pos);
    const bool at_end = nl >= text.size();
    pos = nl + 1;
    if (at_end && raw.empty()) break;
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

    std::string piece(raw);
    if (!continuing) pending_start = number;

    std::string stripped = piece;
    while (!stripped.empty() && is_blank(stripped.back())) stripped.pop_back();
    const bool continues = !stripped.empty() && stripped.back() == '&';
    if (continues) {
      stripped.pop_back();
      while (!stripped.empty() && is_blank(stripped.back())) stripped.pop_back();
      piece = stripped;
    }

    if (continuing) {
      std::string lead = piece;
      std::size_t b = 0;
      while (b < lead.size() && is_blank(lead[b])) ++b;
      lead.erase(0, b);
      if (!pending.empty() && !lead.empty()) pending.push_back(' ');
      pending += lead;
    } else {
      pending = piece;
    }
    continuing = continues;
    if (continuing) continue;

    if (!utils::trim(utils::strip_comment(pending)).empty()) {
      out.push_back({pending, pending_start});
    }
    pending.clear();
  }
  if (continuing && !utils::trim(utils::strip_comment(pending)).empty()) {
    out.push_back({pending, pending_start});
  }
  return out;
}

std::vector<LogicalLine> read_logical_lines(const std::string& path) {
  std::string text;
  try {
    text = utils::read_file(path);
  } catch (const std::exception& ex) {
    throw EngineError(codes::io_failure, ex.what());
  }
  return split_logical_lines(text);
}

std::string expand_variables(std::string_view line, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(line.size());
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '$' && i + 1 < line.size() && line[i + 1] == '{') {
      const std::size_t close = line.find('}', i + 2);
      if (close == std::string_view::npos) {
        throw EngineError(codes::undefined_variable, "unterminated variable reference",
                          CaretSpan{i, line.size()});
      }
      const std::string name(line.substr(i + 2, close - i - 2));
      auto it = vars.find(name);
      if (it == vars.end()) {
        throw EngineError(codes::undefined_variable, fmt::format("variable '{}' is not defined", name),
                          CaretSpan{i, close + 1});
      }
      out += it->second;
      i = close + 1;
      continue;
    }
    out.push_back(line[i]);
    ++i;
  }
  return out;
}

}  // namespace mdlite
