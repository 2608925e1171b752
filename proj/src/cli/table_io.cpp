#include "drs/table_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "drs/error.hpp"

namespace drs {
namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::int64_t json_count(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) fail(ErrorCode::ParseError, where + "field '" + key + "' is missing");
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    fail(ErrorCode::ParseError, where + "field '" + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

LabeledTable table_from_json(const json& obj, const std::string& where) {
  if (!obj.is_object()) fail(ErrorCode::ParseError, where + "expected an object with x11, x10, x01");
  LabeledTable out;
  out.table = validate_table(json_count(obj, "x11", where), json_count(obj, "x10", where),
                             json_count(obj, "x01", where));
  if (obj.contains("label")) {
    if (!obj.at("label").is_string()) fail(ErrorCode::ParseError, where + "field 'label' must be a string");
    out.label = obj.at("label").get<std::string>();
  }
  return out;
}

std::vector<LabeledTable> parse_json_tables(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number.
    const auto offset = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n');
    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": malformed JSON");
  }
  std::vector<LabeledTable> out;
  if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      out.push_back(table_from_json(doc[i], "entry " + std::to_string(i + 1) + ": "));
    }
    if (out.empty()) fail(ErrorCode::ParseError, "no tables in input");
  } else {
    out.push_back(table_from_json(doc, ""));
  }
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field += ch;
    }
  }
  fields.push_back(trim(field));
  return fields;
}

std::vector<LabeledTable> parse_csv_tables(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) fail(ErrorCode::ParseError, "input is empty");

  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto c11 = column("x11");
  const auto c10 = column("x10");
  const auto c01 = column("x01");
  const auto clabel = column("label");
  for (const auto& [name, col] : {std::pair{"x11", c11}, {"x10", c10}, {"x01", c01}}) {
    if (!col) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": header lacks column '" + name + "'");
    }
  }

  std::vector<LabeledTable> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where = "line " + std::to_string(line_no) + ", ";
    if (fields.size() != header.size()) {
      fail(ErrorCode::ParseError, where + "expected " + std::to_string(header.size()) + " fields, found " +
                                      std::to_string(fields.size()));
    }
    auto count = [&](std::size_t col, const char* name) {
      const std::string& f = fields[col];
      std::int64_t value = 0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
        fail(ErrorCode::ParseError, where + "field '" + name + "': '" + f + "' is not an integer");
      }
      return value;
    };
    LabeledTable t;
    t.table = validate_table(count(*c11, "x11"), count(*c10, "x10"), count(*c01, "x01"));
    if (clabel) t.label = fields[*clabel];
    out.push_back(std::move(t));
  }
  if (out.empty()) fail(ErrorCode::ParseError, "no data rows after the header");
  return out;
}

}  // namespace

std::vector<LabeledTable> parse_tables(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) fail(ErrorCode::ParseError, "input is empty");
  if (text[first] == '{' || text[first] == '[') return parse_json_tables(text);
  return parse_csv_tables(text);
}

std::vector<LabeledTable> read_tables(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tables(buf.str());
}

}  // namespace drs
