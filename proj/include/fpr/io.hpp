#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

namespace fpr {

/// Ordered JSON keeps keys in insertion order so written files are golden-testable.
using Json = nlohmann::ordered_json;

namespace io {

Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

/// Writes UTF-8 text, appending a trailing newline when missing. Parent
/// directories are created.
void write_text_file(const std::filesystem::path& path, std::string_view content);
void write_json_file(const std::filesystem::path& path, const Json& doc);

std::string dump(const Json& doc);

/// Rejects keys outside `allowed`; `where` names the object in messages.
void require_keys_subset(const Json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where);
const Json& require_field(const Json& obj, std::string_view key, const std::string& where);
double number_field(const Json& obj, std::string_view key, const std::string& where);
double number_or(const Json& obj, std::string_view key, double fallback, const std::string& where);
std::string string_field(const Json& obj, std::string_view key, const std::string& where);
bool bool_or(const Json& obj, std::string_view key, bool fallback, const std::string& where);

/// Plain decimal formatting for CSV output (shortest round-trip form).
std::string format_number(double value);

}  // namespace io
}  // namespace fpr
