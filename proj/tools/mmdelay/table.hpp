#pragma once

// Result tables shared by every subcommand, with CSV and JSON-lines codecs.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace mmdelay::cli {

using Cell = std::variant<std::monostate, std::int64_t, double, bool, std::string>;

struct Table {
  std::string command;
  std::string units;  // echoed as the leading comment / meta line
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

enum class Format { csv, jsonl };

Format parse_format(const std::string& name);

/// Text form of a cell: integers in decimal, reals with 12 significant
/// digits, booleans as true/false, empty cells as "".
std::string format_cell(const Cell& cell);

/// CSV: "# <units>" comment, header, rows; RFC-4180 quoting where needed.
void write_csv(std::ostream& out, const Table& table);
/// JSON lines: one meta object, then one object per row keyed by column.
void write_jsonl(std::ostream& out, const Table& table);
void write_table(std::ostream& out, const Table& table, Format format);

/// Parsed back as text cells; used to check the emitted schema.
struct ParsedTable {
  std::string comment;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

ParsedTable read_csv(std::istream& in);
ParsedTable read_jsonl(std::istream& in);

}  // namespace mmdelay::cli
