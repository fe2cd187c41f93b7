#include "fpr/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fpr/error.hpp"

namespace fpr::io {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::schema, "'" + path.string() + "': malformed JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write '" + path.string() + "'");
  out << content;
  if (content.empty() || content.back() != '\n') out << '\n';
  if (!out) fail(ErrorKind::io, "write failed for '" + path.string() + "'");
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  write_text_file(path, dump(doc));
}

void require_keys_subset(const Json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  if (!obj.is_object()) fail(ErrorKind::schema, where + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (auto key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail(ErrorKind::schema, where + ": unknown field '" + item.key() + "'");
  }
}

const Json& require_field(const Json& obj, std::string_view key, const std::string& where) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    fail(ErrorKind::schema, where + ": missing field '" + std::string(key) + "'");
  }
  return *it;
}

double number_field(const Json& obj, std::string_view key, const std::string& where) {
  const Json& v = require_field(obj, key, where);
  if (!v.is_number()) {
    fail(ErrorKind::schema, where + "." + std::string(key) + ": expected a number");
  }
  return v.get<double>();
}

double number_or(const Json& obj, std::string_view key, double fallback,
                 const std::string& where) {
  if (!obj.contains(std::string(key))) return fallback;
  return number_field(obj, key, where);
}

std::string string_field(const Json& obj, std::string_view key, const std::string& where) {
  const Json& v = require_field(obj, key, where);
  if (!v.is_string()) {
    fail(ErrorKind::schema, where + "." + std::string(key) + ": expected a string");
  }
  return v.get<std::string>();
}

bool bool_or(const Json& obj, std::string_view key, bool fallback, const std::string& where) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) {
    fail(ErrorKind::schema, where + "." + std::string(key) + ": expected a boolean");
  }
  return it->get<bool>();
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace fpr::io
