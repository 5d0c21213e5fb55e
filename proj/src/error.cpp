#include "mdlite/error.h"

#include <algorithm>
#include <cstdlib>

#include <fmt/format.h>

#ifndef MDLITE_ERROR_DOC_BASE
#define MDLITE_ERROR_DOC_BASE "https://mdlite.readthedocs.io/en/latest/"
#endif

namespace mdlite {

std::string error_doc_base() {
  if (const char* env = std::getenv("MDLITE_ERROR_DOCS"); env && *env) return env;
  return MDLITE_ERROR_DOC_BASE;
}

std::string doc_url_for(std::string_view code) {
  std::string base = error_doc_base();
  if (!base.empty() && base.back() != '/') base.push_back('/');
  return fmt::format("{}errors/{}", base, code);
}

EngineError::EngineError(std::string_view code, std::string message)
    : std::runtime_error(message), code_(code), message_(std::move(message)) {}

EngineError::EngineError(std::string_view code, std::string message, CaretSpan caret)
    : EngineError(code, std::move(message)) {
  caret_ = caret;
}

EngineError& EngineError::with_context(std::string raw_line, std::optional<std::string> expanded,
                                       std::optional<int> line_number) {
  if (expanded && *expanded == raw_line) expanded.reset();
  source_line_ = std::move(raw_line);
  expanded_line_ = std::move(expanded);
  line_number_ = line_number;
  if (caret_) {
    const std::string& target = expanded_line_ ? *expanded_line_ : *source_line_;
    const std::size_t n = target.size();
    caret_->start = std::min(caret_->start, n);
    caret_->end = std::clamp(caret_->end, caret_->start, n);
    if (caret_->width() == 0) caret_.reset();
  }
  return *this;
}

EngineError& EngineError::with_caret(CaretSpan caret) {
  caret_ = caret;
  return *this;
}

EngineError& EngineError::with_line_number(int line_number) {
  line_number_ = line_number;
  return *this;
}

std::string render_error(const EngineError& e) {
  std::string out = fmt::format("ERROR: {} [{}]\n", e.message(), e.code());
  if (e.source_line()) {
    const std::string prefix =
        e.line_number() ? fmt::format("line {}: ", *e.line_number()) : std::string("input: ");
    out += prefix + *e.source_line() + "\n";
    if (e.expanded_line()) out += prefix + *e.expanded_line() + "\n";
    if (e.caret()) {
      out += std::string(prefix.size() + e.caret()->start, ' ');
      out += std::string(e.caret()->width(), '^');
      out += "\n";
    }
  }
  out += fmt::format("see: {}\n", e.doc_url());
  return out;
}

}  // namespace mdlite
