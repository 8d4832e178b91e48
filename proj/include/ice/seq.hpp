#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ice {

using Token = std::uint8_t;

/// Ordered set of single-character symbols; symbol i encodes token i.
class Alphabet {
 public:
  explicit Alphabet(std::string symbols);

  std::size_t size() const { return symbols_.size(); }
  char symbol(Token t) const { return symbols_.at(t); }
  std::optional<Token> index(char c) const;
  const std::string& symbols() const { return symbols_; }

  bool operator==(const Alphabet&) const = default;

 private:
  std::string symbols_;
  std::vector<std::int16_t> lookup_;  // char -> token, -1 if absent
};

struct Sequence {
  std::vector<Token> tokens;

  Sequence() = default;
  explicit Sequence(std::vector<Token> t) : tokens(std::move(t)) {}
  Sequence(std::size_t length, Token fill) : tokens(length, fill) {}

  std::size_t size() const { return tokens.size(); }
  Token operator[](std::size_t i) const { return tokens[i]; }
  Token& operator[](std::size_t i) { return tokens[i]; }

  auto operator<=>(const Sequence&) const = default;
  bool operator==(const Sequence&) const = default;
};

/// Per-position mutability. Immutable positions hold the reference token in
/// every sequence the pipeline produces.
class RegionMask {
 public:
  explicit RegionMask(std::vector<bool> mutable_flags);

  /// Length `length` with positions [start, start+count) immutable.
  static RegionMask with_immutable_span(std::size_t length, std::size_t start, std::size_t count);
  static RegionMask all_mutable(std::size_t length);

  std::size_t size() const { return flags_.size(); }
  bool is_mutable(std::size_t i) const { return flags_.at(i); }
  const std::vector<std::size_t>& mutable_positions() const { return mutable_; }
  std::size_t n_mutable() const { return mutable_.size(); }

  bool operator==(const RegionMask& o) const { return flags_ == o.flags_; }

 private:
  std::vector<bool> flags_;
  std::vector<std::size_t> mutable_;
};

struct Edit {
  std::size_t position = 0;
  Token new_token = 0;
};

/// nullopt when the sequence is valid, otherwise a description naming the
/// first offending position.
std::optional<std::string> validate_sequence(const Sequence& seq, const Alphabet& alphabet,
                                             std::size_t expected_len);

/// Throws std::invalid_argument on immutable, duplicate, out-of-range or no-op edits.
Sequence apply_edits(const Sequence& seq, std::span<const Edit> edits, const RegionMask& mask);

/// Unit-cost insert/delete/substitute edit distance.
std::size_t levenshtein(std::span<const Token> a, std::span<const Token> b);
inline std::size_t levenshtein(const Sequence& a, const Sequence& b) {
  return levenshtein(std::span<const Token>(a.tokens), std::span<const Token>(b.tokens));
}

std::size_t hamming(const Sequence& a, const Sequence& b);

/// Positions where a and b differ, ascending. Sizes must match.
std::vector<std::size_t> diff_positions(const Sequence& a, const Sequence& b);

/// True when every immutable position of `seq` matches `reference`.
bool preserves_immutable(const Sequence& seq, const Sequence& reference, const RegionMask& mask);

Sequence parse_sequence(std::string_view text, const Alphabet& alphabet);
std::string format_sequence(const Sequence& seq, const Alphabet& alphabet);

}  // namespace ice
