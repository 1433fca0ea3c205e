#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wfsvm {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Parses a complete token as a double; throws ParseError naming `what`.
double parse_double(std::string_view token, std::string_view what);
long long parse_int(std::string_view token, std::string_view what);

std::vector<std::string_view> split_whitespace(std::string_view line);
std::vector<std::string_view> split_char(std::string_view line, char sep);
std::vector<std::string_view> split_lines(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
std::vector<unsigned char> read_binary_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);
void write_binary_file(const std::filesystem::path& path, const std::vector<unsigned char>& content);

} // namespace wfsvm
