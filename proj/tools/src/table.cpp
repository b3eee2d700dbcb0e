#include "mmdelay/table.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace mmdelay::cli {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("table row width does not match the header");
  rows.push_back(std::move(row));
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "jsonl") return Format::jsonl;
  throw std::invalid_argument("unknown output format '" + name + "' (expected csv or jsonl)");
}

std::string format_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::int64_t v) const { return fmt::format("{}", v); }
    std::string operator()(double v) const { return fmt::format("{:.12g}", v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

nlohmann::json cell_json(const Cell& cell) {
  struct Visitor {
    nlohmann::json operator()(std::monostate) const { return nullptr; }
    nlohmann::json operator()(std::int64_t v) const { return v; }
    // Reals go through the same 12-digit text as CSV so both formats agree.
    nlohmann::json operator()(double v) const {
      if (!std::isfinite(v)) return format_cell(v);
      return nlohmann::json::parse(format_cell(v));
    }
    nlohmann::json operator()(bool v) const { return v; }
    nlohmann::json operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

}  // namespace

void write_csv(std::ostream& out, const Table& table) {
  out << "# " << table.units << "\r\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << csv_field(table.columns[i]);
  out << "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(format_cell(row[i]));
    out << "\r\n";
  }
}

void write_jsonl(std::ostream& out, const Table& table) {
  nlohmann::ordered_json meta;
  meta["meta"] = {{"command", table.command}, {"units", table.units}, {"columns", table.columns}};
  out << meta.dump() << '\n';
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
    out << obj.dump() << '\n';
  }
}

void write_table(std::ostream& out, const Table& table, Format format) {
  if (format == Format::csv) {
    write_csv(out, table);
  } else {
    write_jsonl(out, table);
  }
}

namespace {

// One RFC-4180 record; quoted fields may span lines.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get(c);
      break;
    } else if (c == '\n') {
      break;
    } else {
      field += c;
    }
  }
  if (quoted) throw std::runtime_error("csv: unterminated quoted field");
  fields.push_back(std::move(field));
  return true;
}

}  // namespace

ParsedTable read_csv(std::istream& in) {
  ParsedTable table;
  std::vector<std::string> fields;
  if (in.peek() == '#') {
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.comment = line.size() >= 2 ? line.substr(2) : "";
  }
  if (!read_record(in, table.columns)) throw std::runtime_error("csv: missing header");
  while (read_record(in, fields)) {
    if (fields.size() != table.columns.size()) throw std::runtime_error("csv: row width does not match the header");
    table.rows.push_back(fields);
  }
  return table;
}

ParsedTable read_jsonl(std::istream& in) {
  ParsedTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("jsonl: missing meta line");
  const auto meta = nlohmann::json::parse(line).at("meta");
  table.comment = meta.at("units").get<std::string>();
  table.columns = meta.at("columns").get<std::vector<std::string>>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto obj = nlohmann::ordered_json::parse(line);
    if (obj.size() != table.columns.size()) throw std::runtime_error("jsonl: row width does not match the header");
    std::vector<std::string> row;
    for (const auto& column : table.columns) {
      const auto& v = obj.at(column);
      if (v.is_null()) {
        row.emplace_back();
      } else if (v.is_string()) {
        row.push_back(v.get<std::string>());
      } else if (v.is_boolean()) {
        row.emplace_back(v.get<bool>() ? "true" : "false");
      } else if (v.is_number_integer()) {
        row.push_back(fmt::format("{}", v.get<std::int64_t>()));
      } else {
        row.push_back(fmt::format("{:.12g}", v.get<double>()));
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace mmdelay::cli
