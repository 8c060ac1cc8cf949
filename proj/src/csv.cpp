#include "cfx/csv.hpp"

#include "cfx/error.hpp"

namespace cfx::csv {

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {
    if (text_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
  }

  bool done() const { return pos_ >= text_.size(); }
  std::size_t line() const { return line_; }

  // Reads one record; returns false at end of input.
  bool next(std::vector<std::string>& fields) {
    fields.clear();
    if (done()) return false;
    std::string field;
    bool quoted = false;
    while (true) {
      if (pos_ >= text_.size()) {
        if (quoted) fail("unterminated quoted field");
        fields.push_back(std::move(field));
        return true;
      }
      char c = text_[pos_];
      if (quoted) {
        if (c == '"') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            field.push_back('"');
            pos_ += 2;
          } else {
            quoted = false;
            ++pos_;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
          ++pos_;
        }
        continue;
      }
      switch (c) {
        case '"':
          if (!field.empty()) fail("quote inside unquoted field");
          quoted = true;
          ++pos_;
          break;
        case ',':
          fields.push_back(std::move(field));
          field.clear();
          ++pos_;
          break;
        case '\r':
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') ++pos_;
          [[fallthrough]];
        case '\n':
          ++pos_;
          ++line_;
          fields.push_back(std::move(field));
          return true;
        default:
          // Characters after a closing quote are tolerated and appended.
          field.push_back(c);
          ++pos_;
      }
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line_) + ": " + what);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

bool is_blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && fields.front().empty();
}

}  // namespace

Table parse(std::string_view text) {
  Reader reader(text);
  Table table;
  if (!reader.next(table.header) || is_blank(table.header)) {
    throw Error(ErrorCode::MalformedCsv, "missing header row");
  }
  for (const auto& name : table.header) {
    if (name.empty()) throw Error(ErrorCode::MalformedCsv, "empty column name in header");
  }
  const std::size_t width = table.header.size();
  std::vector<std::string> fields;
  while (true) {
    const std::size_t line = reader.line();
    if (!reader.next(fields)) break;
    // Blank lines carry no record unless the table has a single column.
    if (is_blank(fields) && width > 1) continue;
    if (fields.size() != width) {
      throw Error(ErrorCode::MalformedCsv,
                  "line " + std::to_string(line) + ": expected " + std::to_string(width) +
                      " fields, found " + std::to_string(fields.size()));
    }
    table.rows.push_back(fields);
  }
  return table;
}

std::string escape_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void append_record(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape_field(fields[i]);
  }
  out.push_back('\n');
}

}  // namespace cfx::csv
