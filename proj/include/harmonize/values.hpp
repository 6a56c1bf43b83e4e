#pragma once

#include <string>
#include <string_view>
#include <variant>

namespace harmonize {

/// The three-valued missing-data taxonomy. Not user-extensible.
enum class NACode : char { A = 'a', B = 'b', C = 'c' };

/// "not applicable", "missing" or "not asked".
std::string_view na_meaning(NACode code) noexcept;
char na_letter(NACode code) noexcept;
/// Accepts 'a', 'b' or 'c'.
bool na_from_letter(char c, NACode& out) noexcept;

struct Category {
    std::string code;
    bool operator==(const Category&) const = default;
};
struct Number {
    double value = 0.0;
    bool operator==(const Number&) const = default;
};
struct Copied {
    std::string raw;
    bool operator==(const Copied&) const = default;
};
struct MissingValue {
    NACode code = NACode::B;
    bool operator==(const MissingValue&) const = default;
};

/// One recoded cell. NA is a distinct alternative, never the string "NA".
class OutputValue {
public:
    using Storage = std::variant<Category, Number, Copied, MissingValue>;

    OutputValue() : value_(MissingValue{}) {}
    OutputValue(Storage v) : value_(std::move(v)) {}

    static OutputValue category(std::string code) { return OutputValue(Category{std::move(code)}); }
    static OutputValue number(double v) { return OutputValue(Number{v}); }
    static OutputValue copied(std::string raw) { return OutputValue(Copied{std::move(raw)}); }
    static OutputValue na(NACode code = NACode::B) { return OutputValue(MissingValue{code}); }

    bool is_na() const noexcept { return std::holds_alternative<MissingValue>(value_); }
    NACode na_code() const { return std::get<MissingValue>(value_).code; }
    const Storage& storage() const noexcept { return value_; }

    /// Text written to output files: NA as "NA(x)", numbers shortest form.
    std::string render() const;

    bool operator==(const OutputValue&) const = default;

private:
    Storage value_;
};

std::string debug_string(const OutputValue& v);

}  // namespace harmonize
