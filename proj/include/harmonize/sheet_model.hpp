#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "harmonize/values.hpp"

namespace harmonize {

enum class VariableType { Categorical, Continuous };

std::string_view to_string(VariableType t) noexcept;
std::optional<VariableType> parse_variable_type(std::string_view s) noexcept;

/// Source binding cell. Three encodings share one column:
///   `db1::colA, db2::colB, colDefault`   per-database names plus a bare default
///   `[colDefault]`                       bracketed default (recodeflow style)
///   `DerivedVar::[c1, c2]`               component list of a derived variable
struct VariableStart {
    std::vector<std::pair<std::string, std::string>> per_database;
    std::optional<std::string> default_name;
    std::vector<std::string> derived_components;

    bool is_derived() const noexcept { return !derived_components.empty(); }
    /// Source column for `database`, falling back to the default.
    std::optional<std::string> resolve(std::string_view database) const;

    bool operator==(const VariableStart&) const = default;
};

/// Throws Error{BadType} when the cell is malformed.
VariableStart parse_variable_start(std::string_view text);
std::string to_string(const VariableStart& vs);

struct VariableEntry {
    std::string variable;
    std::string label;
    std::string label_long;
    std::string section;
    VariableType variable_type = VariableType::Categorical;
    std::string units;
    std::vector<std::string> database_start;
    VariableStart variable_start;
    std::vector<std::string> extras;  // aligned with VariableSheet::extra_columns

    bool operator==(const VariableEntry&) const = default;
};

struct VariableSheet {
    std::vector<std::string> extra_columns;
    std::vector<VariableEntry> entries;

    const VariableEntry* find(std::string_view variable) const;
    bool operator==(const VariableSheet&) const = default;
};

enum class RuleKind { ValueSet, Interval, Else, Copy, ExplicitNA };

struct Bound {
    double value = 0.0;
    bool closed = true;
    bool operator==(const Bound&) const = default;
};

/// Source-side rule of one details row (the recStart cell).
struct MatchRule {
    RuleKind kind = RuleKind::Else;
    std::vector<std::string> values;  // ValueSet, trimmed, duplicate-free
    Bound low;                        // Interval
    Bound high;
    NACode na_code = NACode::B;  // ExplicitNA

    static MatchRule value_set(std::vector<std::string> values);
    static MatchRule interval(double low, double high, bool low_closed = true, bool high_closed = true);
    static MatchRule otherwise();
    static MatchRule copy();
    static MatchRule explicit_na(NACode code);

    /// `trimmed` is the trimmed source text; `numeric` its parse, if any.
    bool matches(std::string_view trimmed, std::optional<double> numeric) const noexcept;

    bool operator==(const MatchRule&) const = default;
};

/// Never throws on any input other than Error{UnparseableRule}.
MatchRule parse_match_rule(std::string_view text);
std::string to_string(const MatchRule& rule);

/// Target-side value of one details row (the recEnd cell).
struct RecEnd {
    enum class Kind { Category, Copy, NA, Function };
    Kind kind = Kind::Category;
    std::string text;  // category code or function name
    NACode na_code = NACode::B;

    bool operator==(const RecEnd&) const = default;
};

RecEnd parse_rec_end(std::string_view text);
std::string to_string(const RecEnd& r);

struct DetailsRow {
    std::string variable;
    VariableType type_end = VariableType::Categorical;
    VariableType type_start = VariableType::Categorical;
    std::vector<std::string> database_start;
    VariableStart variable_start;
    RecEnd rec_end;
    std::string cat_label;
    std::string cat_label_long;
    std::string units;
    MatchRule rec_start;
    std::string notes;
    std::vector<std::string> extras;  // aligned with DetailsSheet::extra_columns

    bool is_derived() const noexcept { return variable_start.is_derived(); }
    bool operator==(const DetailsRow&) const = default;
};

struct DetailsSheet {
    std::vector<std::string> extra_columns;
    std::vector<DetailsRow> rows;  // order is significant: first match wins

    bool operator==(const DetailsSheet&) const = default;
};

/// Canonical column orders used by the serializers.
const std::vector<std::string>& variable_sheet_columns();
const std::vector<std::string>& details_sheet_columns();

VariableSheet parse_variable_sheet(std::string_view csv_text);
DetailsSheet parse_details_sheet(std::string_view csv_text);

std::string serialize_variable_sheet(const VariableSheet& vs);
std::string serialize_details_sheet(const DetailsSheet& ds);

/// Builds one details row from column name -> cell text (missing keys are
/// empty). Used by the service to append rows. Row number is for messages.
DetailsRow make_details_row(const std::vector<std::pair<std::string, std::string>>& cells,
                            const std::vector<std::string>& extra_columns, std::size_t row_number = 0);

/// Empty string when the rule kinds agree with typeStart/typeEnd, otherwise
/// a description of the mismatch.
std::string type_consistency_issue(const DetailsRow& row);

enum class Severity { Error, Warning };

struct Finding {
    Severity severity = Severity::Error;
    std::string sheet;   // "variables" or "details"
    std::size_t row = 0; // 1-based data row, 0 when not row-specific
    std::string column;
    std::string message;

    bool operator==(const Finding&) const = default;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool ok() const noexcept;
    std::size_t error_count() const noexcept;
    std::size_t warning_count() const noexcept;
    bool operator==(const ValidationReport&) const = default;
};

ValidationReport validate_sheets(const VariableSheet& vs, const DetailsSheet& ds);

std::string to_text(const ValidationReport& report);

}  // namespace harmonize
