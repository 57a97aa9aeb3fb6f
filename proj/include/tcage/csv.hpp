#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tcage::csv {

/// Splits one record. Double-quoted fields may contain the delimiter and
/// `""` escapes; surrounding whitespace of unquoted fields is trimmed.
std::vector<std::string> split_line(std::string_view line, char delimiter = ',');

/// Quotes a field only when it contains the delimiter, a quote or a newline.
std::string escape(std::string_view field, char delimiter = ',');

struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

/// Line-oriented reader; blank lines are skipped and `\r` is stripped.
class Reader {
public:
    explicit Reader(std::istream& in, char delimiter = ',') : in_(in), delimiter_(delimiter) {}

    std::optional<Row> next();

private:
    std::istream& in_;
    char delimiter_;
    std::size_t line_ = 0;
};

/// Index of `name` in `header`, compared case-insensitively after trimming.
std::optional<std::size_t> find_column(const std::vector<std::string>& header, std::string_view name);

}  // namespace tcage::csv
