#include "ice/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ice::io {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error("cannot parse number '" + std::string(s) + "'");
  return v;
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error("cannot parse integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  static constexpr char digits[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[v & 0xf];
    v >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

namespace {

bool next_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    return true;
  }
  return false;
}

std::string require_line(std::istream& is, std::string_view what) {
  std::string line;
  if (!next_line(is, line)) throw std::runtime_error("unexpected end of file while reading " + std::string(what));
  return line;
}

std::string keyed(std::istream& is, std::string_view key) {
  auto line = require_line(is, key);
  auto sp = line.find(' ');
  if (sp == std::string::npos || std::string_view(line).substr(0, sp) != key)
    throw std::runtime_error("expected '" + std::string(key) + " <value>', got '" + line + "'");
  return line.substr(sp + 1);
}

}  // namespace

std::vector<std::string> read_data_lines(std::istream& is) {
  std::vector<std::string> lines;
  std::string line;
  while (next_line(is, line)) lines.push_back(line);
  return lines;
}

std::string read_config_hash(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  constexpr std::string_view prefix = "# config_hash=";
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
    if (!line.empty() && line[0] != '#') break;
  }
  return {};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void expect_header(std::istream& is, std::string_view magic, int version) {
  auto line = require_line(is, magic);
  const std::string want = std::string(magic) + " " + std::to_string(version);
  if (line != want) throw std::runtime_error("bad header: expected '" + want + "', got '" + line + "'");
}

void write_sequences(std::ostream& os, std::span<const Sequence> seqs, const Alphabet& alphabet) {
  for (const auto& s : seqs) os << format_sequence(s, alphabet) << '\n';
}

std::vector<Sequence> read_sequences(std::istream& is, const Alphabet& alphabet) {
  std::vector<Sequence> out;
  for (const auto& line : read_data_lines(is)) out.push_back(parse_sequence(line, alphabet));
  return out;
}

void write_labeled(std::ostream& os, std::span<const LabeledExample> examples, const Alphabet& alphabet) {
  for (const auto& e : examples) os << format_sequence(e.seq, alphabet) << '\t' << format_double(e.z) << '\n';
}

std::vector<LabeledExample> read_labeled(std::istream& is, const Alphabet& alphabet) {
  std::vector<LabeledExample> out;
  for (const auto& line : read_data_lines(is)) {
    auto f = split_tabs(line);
    if (f.size() != 2) throw std::runtime_error("labeled line needs 2 tab-separated fields: '" + line + "'");
    out.push_back({parse_sequence(f[0], alphabet), parse_double(f[1])});
  }
  return out;
}

void write_landscape(std::ostream& os, const Landscape& landscape) {
  const auto& sh = landscape.shape();
  const std::size_t A = sh.alphabet_size;
  os << "ICE-LANDSCAPE 1\n";
  os << "length " << sh.length << '\n';
  os << "alphabet_size " << A << '\n';
  os << "seed " << landscape.seed() << '\n';
  os << "additive_scale " << format_double(sh.additive_scale) << '\n';
  os << "epistatic_scale " << format_double(sh.epistatic_scale) << '\n';
  os << "pairs " << landscape.pairs().size() << '\n';
  for (auto [i, j] : landscape.pairs()) os << i << '\t' << j << '\n';
  os << "additive " << sh.length << '\n';
  auto add = landscape.additive();
  for (std::size_t i = 0; i < sh.length; ++i) {
    for (std::size_t a = 0; a < A; ++a) os << (a ? "\t" : "") << format_double(add[i * A + a]);
    os << '\n';
  }
  os << "epistatic " << landscape.pairs().size() << '\n';
  auto epi = landscape.epistatic();
  for (std::size_t p = 0; p < landscape.pairs().size(); ++p) {
    for (std::size_t k = 0; k < A * A; ++k) os << (k ? "\t" : "") << format_double(epi[p * A * A + k]);
    os << '\n';
  }
}

Landscape read_landscape(std::istream& is) {
  expect_header(is, "ICE-LANDSCAPE", 1);
  Landscape::Shape sh;
  sh.length = parse_u64(keyed(is, "length"));
  sh.alphabet_size = parse_u64(keyed(is, "alphabet_size"));
  const std::uint64_t seed = parse_u64(keyed(is, "seed"));
  sh.additive_scale = parse_double(keyed(is, "additive_scale"));
  sh.epistatic_scale = parse_double(keyed(is, "epistatic_scale"));
  const std::size_t n_pairs = parse_u64(keyed(is, "pairs"));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::size_t p = 0; p < n_pairs; ++p) {
    auto f = split_tabs(require_line(is, "pair"));
    if (f.size() != 2) throw std::runtime_error("landscape pair line needs 2 fields");
    pairs.emplace_back(static_cast<std::uint32_t>(parse_u64(f[0])), static_cast<std::uint32_t>(parse_u64(f[1])));
  }
  sh.n_pairs = n_pairs;
  const std::size_t A = sh.alphabet_size;
  if (parse_u64(keyed(is, "additive")) != sh.length) throw std::runtime_error("landscape additive row count mismatch");
  std::vector<double> add;
  for (std::size_t i = 0; i < sh.length; ++i) {
    auto line = require_line(is, "additive row");
    auto f = split_tabs(line);
    if (f.size() != A) throw std::runtime_error("landscape additive row has wrong width");
    for (auto v : f) add.push_back(parse_double(v));
  }
  if (parse_u64(keyed(is, "epistatic")) != n_pairs) throw std::runtime_error("landscape epistatic row count mismatch");
  std::vector<double> epi;
  for (std::size_t p = 0; p < n_pairs; ++p) {
    auto line = require_line(is, "epistatic row");
    auto f = split_tabs(line);
    if (f.size() != A * A) throw std::runtime_error("landscape epistatic row has wrong width");
    for (auto v : f) epi.push_back(parse_double(v));
  }
  return Landscape(sh, seed, std::move(add), std::move(pairs), std::move(epi));
}

}  // namespace ice::io
