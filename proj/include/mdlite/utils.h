#pragma once

// String, number and path helpers shared by the whole engine.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mdlite::utils {

/// Result of a strict numeric parse.
struct ParsedNumber {
  enum class Kind { integer, real };
  double value = 0.0;
  std::int64_t int_value = 0;
  Kind kind = Kind::real;

  bool is_integer() const { return kind == Kind::integer; }
};

/// Thrown when a token does not match the numeric grammar. `position` is
/// the byte offset of the first character that broke the match.
class NotANumber : public std::invalid_argument {
 public:
  NotANumber(std::string token, std::size_t position);
  const std::string& token() const { return token_; }
  std::size_t position() const { return position_; }

 private:
  std::string token_;
  std::size_t position_;
};

std::string trim_and_compress(std::string_view s);
std::string trim(std::string_view s);

/// Removes everything from the first `#` that is not inside double quotes.
std::string strip_comment(std::string_view s);

/// Accepts `[+-]?(d+(.d*)?|.d+)([eE][+-]?d+)?` over the whole token. No
/// locale, no hex, no inf/nan.
ParsedNumber parse_real(std::string_view s);

/// Like parse_real but requires the integer form.
std::int64_t parse_int(std::string_view s);

enum class Case { upper, lower };
std::string case_fold(std::string_view s, Case direction);

/// Single-space join.
std::string join(const std::vector<std::string>& parts, std::string_view sep = " ");

std::vector<std::string> split_words(std::string_view s);

/// Byte offset of the first non-ASCII byte, or npos.
std::size_t first_non_ascii(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

/// Round-trip formatting: 17 significant digits, `%.17g` style.
std::string format_exact(double d);

/// `%.15g` style, used for thermo output.
std::string format_thermo(double d);

std::string path_join(std::string_view dir, std::string_view file);

/// Reads a whole file; throws std::runtime_error on failure.
std::string read_file(const std::string& path);

}  // namespace mdlite::utils
