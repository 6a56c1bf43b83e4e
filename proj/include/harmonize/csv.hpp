#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace harmonize::csv {

/// Streaming RFC-4180 reader. Accepts LF or CRLF line ends, quoted fields
/// with embedded separators/newlines, and a leading UTF-8 BOM.
class Reader {
public:
    explicit Reader(std::istream& in);

    /// Reads the next record into `fields`. Returns false at end of input.
    /// Throws Error{BadFormat} on an unterminated quoted field.
    bool next(std::vector<std::string>& fields);

    /// 0-based index of the record most recently returned by next().
    std::size_t record_index() const noexcept { return record_ - 1; }

private:
    int peek();
    int get();
    void fill();

    std::istream& in_;
    std::vector<char> buf_;
    std::size_t pos_ = 0;
    std::size_t len_ = 0;
    std::size_t record_ = 0;
    bool first_ = true;
};

/// Parses a whole in-memory document.
std::vector<std::vector<std::string>> parse_document(std::string_view text);

bool needs_quoting(std::string_view field) noexcept;
void write_field(std::ostream& out, std::string_view field);
void write_row(std::ostream& out, std::span<const std::string> fields);

}  // namespace harmonize::csv
