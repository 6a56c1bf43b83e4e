#include "harmonize/csv.hpp"

#include <sstream>

#include "harmonize/error.hpp"

namespace harmonize::csv {

Reader::Reader(std::istream& in) : in_(in), buf_(1 << 16) {}

void Reader::fill() {
    in_.read(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    len_ = static_cast<std::size_t>(in_.gcount());
    pos_ = 0;
}

int Reader::peek() {
    if (pos_ == len_) {
        if (!in_) return -1;
        fill();
        if (len_ == 0) return -1;
    }
    return static_cast<unsigned char>(buf_[pos_]);
}

int Reader::get() {
    int c = peek();
    if (c >= 0) ++pos_;
    return c;
}

bool Reader::next(std::vector<std::string>& fields) {
    fields.clear();
    if (first_) {
        first_ = false;
        if (peek() == 0xEF) {
            // Only a complete BOM is skipped; anything else is data.
            std::string lead;
            lead += static_cast<char>(get());
            if (peek() == 0xBB) {
                lead += static_cast<char>(get());
                if (peek() == 0xBF) {
                    get();
                    lead.clear();
                }
            }
            if (!lead.empty()) {
                fields.emplace_back(std::move(lead));
            }
        }
    }
    if (fields.empty() && peek() < 0) return false;
    if (fields.empty()) fields.emplace_back();

    ++record_;
    bool quoted = false;
    bool field_started_quoted = false;
    while (true) {
        int c = get();
        if (c < 0) {
            if (quoted) {
                throw io_error("BadFormat", "unterminated quoted field",
                               "record " + std::to_string(record_ - 1));
            }
            return true;
        }
        std::string& field = fields.back();
        if (quoted) {
            if (c == '"') {
                if (peek() == '"') {
                    get();
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += static_cast<char>(c);
            }
            continue;
        }
        switch (c) {
            case ',':
                fields.emplace_back();
                field_started_quoted = false;
                break;
            case '\r':
                if (peek() == '\n') get();
                return true;
            case '\n':
                return true;
            case '"':
                if (field.empty() && !field_started_quoted) {
                    quoted = true;
                    field_started_quoted = true;
                } else {
                    field += '"';
                }
                break;
            default:
                field += static_cast<char>(c);
        }
    }
}

std::vector<std::vector<std::string>> parse_document(std::string_view text) {
    std::istringstream in{std::string(text)};
    Reader reader(in);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> fields;
    while (reader.next(fields)) rows.push_back(fields);
    return rows;
}

bool needs_quoting(std::string_view field) noexcept {
    return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

void write_field(std::ostream& out, std::string_view field) {
    if (!needs_quoting(field)) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

void write_row(std::ostream& out, std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        write_field(out, fields[i]);
    }
    out << '\n';
}

}  // namespace harmonize::csv
