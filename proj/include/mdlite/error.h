#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mdlite {

/// Stable error identifiers. Each one maps to a documentation anchor via
/// doc_url_for().
namespace codes {
inline constexpr std::string_view unknown_command = "E-UNKNOWN-CMD";
inline constexpr std::string_view bad_argument = "E-BAD-ARG";
inline constexpr std::string_view arg_count = "E-ARG-COUNT";
inline constexpr std::string_view unterminated_quote = "E-UNTERMINATED-QUOTE";
inline constexpr std::string_view non_ascii = "E-NON-ASCII";
inline constexpr std::string_view undefined_variable = "E-UNDEFINED-VAR";
inline constexpr std::string_view unknown_style = "E-UNKNOWN-STYLE";
inline constexpr std::string_view duplicate_style = "E-DUPLICATE-STYLE";
inline constexpr std::string_view no_style = "E-NO-STYLE";
inline constexpr std::string_view missing_coeff = "E-MISSING-COEFF";
inline constexpr std::string_view no_box = "E-NO-BOX";
inline constexpr std::string_view box_exists = "E-BOX-EXISTS";
inline constexpr std::string_view box_too_small = "E-BOX-TOO-SMALL";
inline constexpr std::string_view no_integrator = "E-NO-INTEGRATOR";
inline constexpr std::string_view corrupt_restart = "E-CORRUPT-RESTART";
inline constexpr std::string_view parse_failure = "E-PARSE";
inline constexpr std::string_view io_failure = "E-IO";
inline constexpr std::string_view unsupported = "E-UNSUPPORTED";
inline constexpr std::string_view bad_range = "E-BAD-RANGE";
inline constexpr std::string_view table_range = "E-TABLE-RANGE";
inline constexpr std::string_view step_limit = "E-STEP-LIMIT";
inline constexpr std::string_view plugin_failure = "E-PLUGIN";
inline constexpr std::string_view unknown_key = "E-UNKNOWN-KEY";
inline constexpr std::string_view unknown_array = "E-UNKNOWN-ARRAY";
inline constexpr std::string_view invalid_handle = "E-INVALID-HANDLE";
inline constexpr std::string_view bad_flag = "E-BAD-FLAG";
inline constexpr std::string_view internal = "E-INTERNAL";
}  // namespace codes

/// Half-open byte range [start, end) within a source line.
struct CaretSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t width() const { return end - start; }
};

/// Base URL for error documentation: `MDLITE_ERROR_DOCS` from the environment
/// if set, else the value compiled in.
std::string error_doc_base();
std::string doc_url_for(std::string_view code);

/// Every user-facing failure in the engine. Carries enough context to point
/// at the offending word of the input line.
class EngineError : public std::runtime_error {
 public:
  EngineError(std::string_view code, std::string message);
  EngineError(std::string_view code, std::string message, CaretSpan caret);

  const std::string& code() const { return code_; }
  const std::string& message() const { return message_; }
  std::string doc_url() const { return doc_url_for(code_); }

  const std::optional<std::string>& source_line() const { return source_line_; }
  /// Line after `${var}` expansion, when it differs from the raw one.
  const std::optional<std::string>& expanded_line() const { return expanded_line_; }
  const std::optional<int>& line_number() const { return line_number_; }
  const std::optional<CaretSpan>& caret() const { return caret_; }

  bool has_context() const { return source_line_.has_value(); }

  /// Attaches the line the caret refers to. Carets beyond the end of the
  /// line are clipped.
  EngineError& with_context(std::string raw_line, std::optional<std::string> expanded,
                            std::optional<int> line_number);
  EngineError& with_caret(CaretSpan caret);
  EngineError& with_line_number(int line_number);

 private:
  std::string code_;
  std::string message_;
  std::optional<std::string> source_line_;
  std::optional<std::string> expanded_line_;
  std::optional<int> line_number_;
  std::optional<CaretSpan> caret_;
};

/// Multi-line rendering:
///
///     ERROR: <message> [<code>]
///     line N: <raw line>
///     line N: <expanded line>     (only after variable substitution)
///             ^^^^                (under the last shown line)
///     see: <doc url>
std::string render_error(const EngineError& e);

}  // namespace mdlite
