#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "mdlite/error.h"
#include "mdlite/tokenizer.h"

namespace mdlite {

/// A window over the tokens of one command. Index 0 is the first argument
/// after whatever the window was sliced from. Every accessor that rejects a
/// value throws EngineError with the caret on the offending token.
class Args {
 public:
  Args() = default;
  Args(std::span<const Token> tokens, CaretSpan anchor) : tokens_(tokens), anchor_(anchor) {}

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const Token& token(std::size_t i) const;
  const std::string& word(std::size_t i) const { return token(i).text; }

  double real(std::size_t i, std::string_view what) const;
  double positive_real(std::size_t i, std::string_view what) const;
  double nonnegative_real(std::size_t i, std::string_view what) const;
  std::int64_t integer(std::size_t i, std::string_view what) const;
  /// Accepts `*`, `N`, `N*`, `*N`, `N*M`; result is clamped to [1, ntypes].
  std::pair<int, int> type_range(std::size_t i, int ntypes, std::string_view what) const;
  bool yes_no(std::size_t i, std::string_view what) const;

  /// Arguments from `first` on.
  Args tail(std::size_t first) const;

  /// Throws E-ARG-COUNT unless size() is within [lo, hi].
  void expect_count(std::size_t lo, std::size_t hi, std::string_view usage) const;

  [[noreturn]] void fail(std::size_t i, std::string_view code, std::string message) const;
  /// Caret on the command word the window was made for.
  [[noreturn]] void fail_command(std::string_view code, std::string message) const;

 private:
  std::span<const Token> tokens_;
  CaretSpan anchor_{};
};

}  // namespace mdlite
