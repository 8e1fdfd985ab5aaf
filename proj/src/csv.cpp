#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "survml/data.hpp"

namespace survml {
namespace {

std::string_view trim(std::string_view s) {
  auto not_space = [](char c) { return !std::isspace(static_cast<unsigned char>(c)); };
  auto b = std::find_if(s.begin(), s.end(), not_space);
  auto e = std::find_if(s.rbegin(), std::make_reverse_iterator(b), not_space).base();
  return {b, e};
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

struct Field {
  std::string text;
  bool quoted = false;
};

// Splits the whole document into records; quoted fields may contain commas,
// doubled quotes and line breaks.
std::vector<std::vector<Field>> tokenize(std::string_view doc) {
  std::vector<std::vector<Field>> records;
  std::vector<Field> record;
  Field field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field = Field{};
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A blank line is a single empty unquoted field; skip it.
    if (!(record.size() == 1 && record[0].text.empty() && !record[0].quoted)) {
      records.push_back(std::move(record));
    }
    record.clear();
  };

  for (std::size_t i = 0; i < doc.size(); ++i) {
    const char c = doc[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < doc.size() && doc[i + 1] == '"') {
          field.text.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.text.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started || std::all_of(field.text.begin(), field.text.end(), [](char ch) {
              return ch == ' ' || ch == '\t';
            })) {
          field.text.clear();
          field.quoted = true;
          in_quotes = true;
          field_started = true;
        } else {
          field.text.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < doc.size() && doc[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.text.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) {
    throw ParseError("unterminated quoted field starting before line " + std::to_string(line));
  }
  if (field_started || !field.text.empty() || field.quoted || !record.empty()) end_record();
  return records;
}

}  // namespace

bool is_missing_token(std::string_view text) {
  const auto t = trim(text);
  return t.empty() || iequals(t, "na") || iequals(t, "nan") || iequals(t, "null");
}

std::optional<std::size_t> RawTable::find_column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

std::size_t RawTable::column_index(const std::string& name) const {
  if (auto idx = find_column(name)) return *idx;
  throw SchemaError("column not found: " + name);
}

RawTable RawTable::select_rows(std::span<const std::size_t> idx) const {
  RawTable out;
  out.header = header;
  out.rows.reserve(idx.size());
  for (auto i : idx) out.rows.push_back(rows.at(i));
  return out;
}

RawTable load_csv(std::istream& source, const ColumnRoles& roles) {
  std::string doc{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  std::string_view view = doc;
  if (view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);

  auto records = tokenize(view);
  if (records.empty()) throw ParseError("CSV has no header row");

  RawTable table;
  std::set<std::string> seen;
  for (auto& f : records.front()) {
    std::string name{trim(f.text)};
    if (!seen.insert(name).second) throw SchemaError("duplicate column name: " + name);
    table.header.push_back(std::move(name));
  }

  const std::size_t width = table.header.size();
  table.rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& rec = records[r];
    if (rec.size() != width) {
      throw ParseError("row " + std::to_string(r) + " has " + std::to_string(rec.size()) +
                       " cells, expected " + std::to_string(width));
    }
    std::vector<Cell> row;
    row.reserve(width);
    for (auto& f : rec) {
      if (is_missing_token(f.text)) {
        row.emplace_back(std::nullopt);
      } else {
        row.emplace_back(f.quoted ? std::move(f.text) : std::string(trim(f.text)));
      }
    }
    table.rows.push_back(std::move(row));
  }

  if (!roles.target.empty()) table.column_index(roles.target);
  if (roles.id_column) table.column_index(*roles.id_column);
  for (const auto& d : roles.drop) table.column_index(d);
  return table;
}

RawTable load_csv_file(const std::filesystem::path& path, const ColumnRoles& roles) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load_csv(in, roles);
}

}  // namespace survml
