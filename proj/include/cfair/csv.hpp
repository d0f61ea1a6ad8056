#pragma once

// Minimal RFC-4180 style CSV reader/writer. Quoted fields may contain the
// delimiter, doubled quotes and line breaks.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cfair/error.hpp"

namespace cfair::csv {

using Record = std::vector<std::string>;

struct Table {
  Record header;
  std::vector<Record> rows;
};

inline std::vector<Record> parse_records(std::string_view text, char delim) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;

  auto end_field = [&] {
    current.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A trailing blank line yields a record with one empty field; skip it.
    if (!(current.size() == 1 && current[0].empty())) records.push_back(std::move(current));
    current.clear();
  };

  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;  // UTF-8 BOM

  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delim) {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw DataError("csv: unterminated quoted field");
  if (field_started || !field.empty() || !current.empty()) end_record();
  return records;
}

/// Picks ',' unless the header line contains ';' but no ',' (UCI exports).
inline char sniff_delimiter(std::string_view text) {
  const auto eol = text.find_first_of("\r\n");
  const auto header = text.substr(0, eol);
  if (header.find(',') == std::string_view::npos && header.find(';') != std::string_view::npos) return ';';
  return ',';
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Table parse(std::string_view text) {
  auto records = parse_records(text, sniff_delimiter(text));
  Table t;
  if (records.empty()) return t;
  t.header = std::move(records.front());
  t.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r].size() != t.header.size())
      throw DataError("csv: row " + std::to_string(r + 1) + " has " + std::to_string(t.rows[r].size()) +
                      " fields, header has " + std::to_string(t.header.size()));
  }
  return t;
}

inline Table read(const std::string& path) { return parse(read_file(path)); }

inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string format_record(const Record& r) {
  std::string line;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) line.push_back(',');
    line += escape(r[i]);
  }
  line.push_back('\n');
  return line;
}

/// Shortest text that round-trips the double exactly.
inline std::string format_double(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace cfair::csv
