#pragma once
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mofbind::text {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split_whitespace(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char delimiter);

/// Strict conversion: the whole token must be a number.
std::optional<double> to_double(std::string_view s);
std::optional<long> to_long(std::string_view s);

std::string read_file(const std::string &path);
void write_file(const std::string &path, std::string_view contents);

std::string lower(std::string_view s);

} // namespace mofbind::text
