#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ice/landscape.hpp"
#include "ice/seq.hpp"

namespace ice::io {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);
double parse_double(std::string_view s);
std::uint64_t parse_u64(std::string_view s);

std::vector<std::string_view> split_tabs(std::string_view line);
std::string hex64(std::uint64_t v);

/// Reads non-empty lines, skipping comment lines that start with '#'.
std::vector<std::string> read_data_lines(std::istream& is);

/// Value of a "# config_hash=<hex>" header line, or empty when absent.
std::string read_config_hash(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Expects the next line to read "<magic> <version>".
void expect_header(std::istream& is, std::string_view magic, int version);

// Dataset files.
void write_sequences(std::ostream& os, std::span<const Sequence> seqs, const Alphabet& alphabet);
std::vector<Sequence> read_sequences(std::istream& is, const Alphabet& alphabet);
void write_labeled(std::ostream& os, std::span<const LabeledExample> examples, const Alphabet& alphabet);
std::vector<LabeledExample> read_labeled(std::istream& is, const Alphabet& alphabet);

void write_landscape(std::ostream& os, const Landscape& landscape);
Landscape read_landscape(std::istream& is);

}  // namespace ice::io
