#include "mdlite/args.h"

#include <cmath>

#include <fmt/format.h>

#include "mdlite/utils.h"

namespace mdlite {

const Token& Args::token(std::size_t i) const {
  if (i >= tokens_.size()) fail_command(codes::arg_count, "missing argument");
  return tokens_[i];
}

double Args::real(std::size_t i, std::string_view what) const {
  const Token& t = token(i);
  try {
    double v = utils::parse_real(t.text).value;
    if (!std::isfinite(v)) fail(i, codes::bad_argument, fmt::format("{} '{}' is out of range", what, t.text));
    return v;
  } catch (const utils::NotANumber&) {
    fail(i, codes::bad_argument, fmt::format("expected a number for {} but found '{}'", what, t.text));
  }
}

double Args::positive_real(std::size_t i, std::string_view what) const {
  double v = real(i, what);
  if (!(v > 0.0)) fail(i, codes::bad_argument, fmt::format("{} must be > 0 but is {}", what, word(i)));
  return v;
}

double Args::nonnegative_real(std::size_t i, std::string_view what) const {
  double v = real(i, what);
  if (v < 0.0) fail(i, codes::bad_argument, fmt::format("{} must be >= 0 but is {}", what, word(i)));
  return v;
}

std::int64_t Args::integer(std::size_t i, std::string_view what) const {
  const Token& t = token(i);
  try {
    return utils::parse_int(t.text);
  } catch (const utils::NotANumber&) {
    fail(i, codes::bad_argument, fmt::format("expected an integer for {} but found '{}'", what, t.text));
  }
}

std::pair<int, int> Args::type_range(std::size_t i, int ntypes, std::string_view what) const {
  const std::string& s = word(i);
  auto parse_bound = [&](std::string_view part, int fallback) -> int {
    if (part.empty()) return fallback;
    try {
      std::int64_t v = utils::parse_int(part);
      if (v < 1 || v > ntypes) {
        fail(i, codes::bad_argument, fmt::format("{} {} is outside 1..{}", what, v, ntypes));
      }
      return static_cast<int>(v);
    } catch (const utils::NotANumber&) {
      fail(i, codes::bad_argument, fmt::format("invalid {} '{}'", what, s));
    }
  };
  const std::size_t star = s.find('*');
  if (star == std::string::npos) {
    int v = parse_bound(s, 0);
    return {v, v};
  }
  if (s.find('*', star + 1) != std::string::npos) fail(i, codes::bad_argument, fmt::format("invalid {} '{}'", what, s));
  int lo = parse_bound(std::string_view(s).substr(0, star), 1);
  int hi = parse_bound(std::string_view(s).substr(star + 1), ntypes);
  if (lo > hi) fail(i, codes::bad_argument, fmt::format("empty {} range '{}'", what, s));
  return {lo, hi};
}

bool Args::yes_no(std::size_t i, std::string_view what) const {
  const std::string& s = word(i);
  if (s == "yes" || s == "on") return true;
  if (s == "no" || s == "off") return false;
  fail(i, codes::bad_argument, fmt::format("expected yes or no for {} but found '{}'", what, s));
}

Args Args::tail(std::size_t first) const {
  if (first >= tokens_.size()) return Args(std::span<const Token>(), anchor_);
  return Args(tokens_.subspan(first), anchor_);
}

void Args::expect_count(std::size_t lo, std::size_t hi, std::string_view usage) const {
  if (tokens_.size() < lo) {
    fail_command(codes::arg_count, fmt::format("too few arguments; usage: {}", usage));
  }
  if (tokens_.size() > hi) {
    fail(hi, codes::arg_count, fmt::format("too many arguments; usage: {}", usage));
  }
}

void Args::fail(std::size_t i, std::string_view code, std::string message) const {
  if (i >= tokens_.size()) throw EngineError(code, std::move(message), anchor_);
  throw EngineError(code, std::move(message), tokens_[i].span());
}

void Args::fail_command(std::string_view code, std::string message) const {
  throw EngineError(code, std::move(message), anchor_);
}

}  // namespace mdlite
