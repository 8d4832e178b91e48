#include "ice/seq.hpp"

#include <algorithm>
#include <stdexcept>

namespace ice {

Alphabet::Alphabet(std::string symbols) : symbols_(std::move(symbols)), lookup_(256, -1) {
  if (symbols_.size() < 2) throw std::invalid_argument("alphabet needs at least 2 symbols");
  if (symbols_.size() > 255) throw std::invalid_argument("alphabet larger than 255 symbols");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    auto c = static_cast<unsigned char>(symbols_[i]);
    if (c == '\t' || c == '\n' || c == '\r' || c == ' ' || c == '#')
      throw std::invalid_argument("alphabet symbol collides with file syntax");
    if (lookup_[c] != -1) throw std::invalid_argument(std::string("duplicate alphabet symbol '") + symbols_[i] + "'");
    lookup_[c] = static_cast<std::int16_t>(i);
  }
}

std::optional<Token> Alphabet::index(char c) const {
  auto v = lookup_[static_cast<unsigned char>(c)];
  if (v < 0) return std::nullopt;
  return static_cast<Token>(v);
}

RegionMask::RegionMask(std::vector<bool> mutable_flags) : flags_(std::move(mutable_flags)) {
  for (std::size_t i = 0; i < flags_.size(); ++i)
    if (flags_[i]) mutable_.push_back(i);
}

RegionMask RegionMask::with_immutable_span(std::size_t length, std::size_t start, std::size_t count) {
  if (start + count > length) throw std::invalid_argument("immutable span exceeds sequence length");
  std::vector<bool> flags(length, true);
  for (std::size_t i = start; i < start + count; ++i) flags[i] = false;
  return RegionMask(std::move(flags));
}

RegionMask RegionMask::all_mutable(std::size_t length) { return RegionMask(std::vector<bool>(length, true)); }

std::optional<std::string> validate_sequence(const Sequence& seq, const Alphabet& alphabet,
                                             std::size_t expected_len) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] >= alphabet.size())
      return "token index " + std::to_string(seq[i]) + " out of range at position " + std::to_string(i);
  }
  if (seq.size() != expected_len)
    return "length " + std::to_string(seq.size()) + " != expected " + std::to_string(expected_len);
  return std::nullopt;
}

Sequence apply_edits(const Sequence& seq, std::span<const Edit> edits, const RegionMask& mask) {
  if (mask.size() != seq.size()) throw std::invalid_argument("mask length does not match sequence");
  Sequence out = seq;
  std::vector<bool> touched(seq.size(), false);
  for (const auto& e : edits) {
    if (e.position >= seq.size()) throw std::invalid_argument("edit position out of range");
    if (!mask.is_mutable(e.position))
      throw std::invalid_argument("edit at immutable position " + std::to_string(e.position));
    if (touched[e.position])
      throw std::invalid_argument("duplicate edit position " + std::to_string(e.position));
    if (seq[e.position] == e.new_token)
      throw std::invalid_argument("no-op edit at position " + std::to_string(e.position));
    touched[e.position] = true;
    out[e.position] = e.new_token;
  }
  return out;
}

std::size_t levenshtein(std::span<const Token> a, std::span<const Token> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t hamming(const Sequence& a, const Sequence& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

std::vector<std::size_t> diff_positions(const Sequence& a, const Sequence& b) {
  if (a.size() != b.size()) throw std::invalid_argument("diff_positions: length mismatch");
  std::vector<std::size_t> d;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) d.push_back(i);
  return d;
}

bool preserves_immutable(const Sequence& seq, const Sequence& reference, const RegionMask& mask) {
  if (seq.size() != reference.size() || seq.size() != mask.size()) return false;
  for (std::size_t i = 0; i < seq.size(); ++i)
    if (!mask.is_mutable(i) && seq[i] != reference[i]) return false;
  return true;
}

Sequence parse_sequence(std::string_view text, const Alphabet& alphabet) {
  Sequence s;
  s.tokens.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    auto t = alphabet.index(text[i]);
    if (!t) throw std::invalid_argument("unknown symbol '" + std::string(1, text[i]) + "' at position " + std::to_string(i));
    s.tokens.push_back(*t);
  }
  return s;
}

std::string format_sequence(const Sequence& seq, const Alphabet& alphabet) {
  std::string out;
  out.reserve(seq.size());
  for (auto t : seq.tokens) out.push_back(alphabet.symbol(t));
  return out;
}

}  // namespace ice
