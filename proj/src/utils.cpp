#include "mdlite/utils.h"

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace mdlite::utils {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

NotANumber::NotANumber(std::string token, std::size_t position)
    : std::invalid_argument(fmt::format("'{}' is not a valid number", token)),
      token_(std::move(token)),
      position_(position) {}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string trim_and_compress(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return std::string(s.substr(0, i));
  }
  return std::string(s);
}

ParsedNumber parse_real(std::string_view s) {
  std::size_t i = 0;
  const std::size_t n = s.size();
  bool integral = true;
  if (i < n && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t mantissa_digits = 0;
  while (i < n && is_digit(s[i])) ++i, ++mantissa_digits;
  if (i < n && s[i] == '.') {
    integral = false;
    ++i;
    while (i < n && is_digit(s[i])) ++i, ++mantissa_digits;
  }
  if (mantissa_digits == 0) throw NotANumber(std::string(s), i);
  if (i < n && (s[i] == 'e' || s[i] == 'E')) {
    integral = false;
    ++i;
    if (i < n && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < n && is_digit(s[i])) ++i, ++exp_digits;
    if (exp_digits == 0) throw NotANumber(std::string(s), i);
  }
  if (i != n) throw NotANumber(std::string(s), i);

  // from_chars rejects a leading '+'
  std::string_view body = s;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);

  ParsedNumber out;
  if (integral) {
    std::int64_t iv = 0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), iv);
    if (ec == std::errc() && ptr == body.data() + body.size()) {
      out.kind = ParsedNumber::Kind::integer;
      out.int_value = iv;
      out.value = static_cast<double>(iv);
      if (iv == 0 && body.front() == '-') out.value = -0.0;
      return out;
    }
    // out of int64 range: fall through to a real
  }
  double dv = 0.0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), dv);
  if (ec != std::errc() || ptr != body.data() + body.size()) {
    throw NotANumber(std::string(s), static_cast<std::size_t>(ptr - s.data()));
  }
  out.kind = ParsedNumber::Kind::real;
  out.value = dv;
  return out;
}

std::int64_t parse_int(std::string_view s) {
  ParsedNumber p = parse_real(s);
  if (!p.is_integer()) {
    std::size_t pos = s.find_first_of(".eE");
    throw NotANumber(std::string(s), pos == std::string_view::npos ? 0 : pos);
  }
  return p.int_value;
}

std::string case_fold(std::string_view s, Case direction) {
  std::string out(s);
  for (char& c : out) {
    if (direction == Case::lower && c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (direction == Case::upper && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t b = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > b) out.emplace_back(s.substr(b, i - b));
  }
  return out;
}

std::size_t first_non_ascii(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (static_cast<unsigned char>(s[i]) > 0x7f) return i;
  }
  return std::string_view::npos;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.starts_with(prefix); }
bool ends_with(std::string_view s, std::string_view suffix) { return s.ends_with(suffix); }

std::string format_exact(double d) { return fmt::format("{:.17g}", d); }
std::string format_thermo(double d) { return fmt::format("{:.15g}", d); }

std::string path_join(std::string_view dir, std::string_view file) {
  if (dir.empty() || (!file.empty() && file.front() == '/')) return std::string(file);
  return (std::filesystem::path(dir) / std::filesystem::path(file)).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw std::runtime_error(fmt::format("error reading file '{}'", path));
  return ss.str();
}

}  // namespace mdlite::utils
