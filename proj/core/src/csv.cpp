#include "csv.hpp"

#include <istream>
#include <ostream>

namespace polar::csv {

std::vector<Row> parse(std::istream& in) {
  std::vector<Row> rows;
  Row current;
  std::string field;
  bool in_quotes = false;
  bool any_char = false;  // true once the current record has any content

  auto end_field = [&] {
    current.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    rows.push_back(std::move(current));
    current.clear();
    any_char = false;
  };

  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        any_char = true;
        break;
      case ',':
        end_field();
        any_char = true;
        break;
      case '\r':
        // swallowed; the following \n ends the record
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        any_char = true;
        break;
    }
  }
  if (any_char || !field.empty() || !current.empty()) {
    end_record();
  }
  return rows;
}

std::string escape(std::string_view field) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!field.empty() && (field.front() == ' ' || field.back() == ' ')) {
    needs_quotes = true;
  }
  if (!needs_quotes) {
    return std::string(field);
  }
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') {
      out.push_back('"');
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) {
      out << ',';
    }
    out << escape(row[i]);
  }
  out << '\n';
}

}  // namespace polar::csv
