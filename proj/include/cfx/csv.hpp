#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cfx::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180 reader: comma delimiter, `"` quoting with `""` escapes, LF or CRLF
// record ends, embedded newlines inside quotes. A leading UTF-8 BOM is
// skipped. Throws Error(MalformedCsv) on ragged rows, an empty or missing
// header, or an unterminated quote.
Table parse(std::string_view text);

std::string escape_field(std::string_view field);
void append_record(std::string& out, const std::vector<std::string>& fields);

}  // namespace cfx::csv
