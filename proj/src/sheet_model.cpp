#include "harmonize/sheet_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "harmonize/csv.hpp"
#include "harmonize/error.hpp"
#include "harmonize/text.hpp"

namespace harmonize {

std::string_view to_string(VariableType t) noexcept {
    return t == VariableType::Continuous ? "continuous" : "categorical";
}

std::optional<VariableType> parse_variable_type(std::string_view s) noexcept {
    s = trim(s);
    if (s == "categorical") return VariableType::Categorical;
    if (s == "continuous") return VariableType::Continuous;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// variableStart

std::optional<std::string> VariableStart::resolve(std::string_view database) const {
    for (const auto& [db, name] : per_database) {
        if (db == database) return name;
    }
    return default_name;
}

namespace {

constexpr std::string_view kDerivedPrefix = "DerivedVar::";

bool has_duplicates(const std::vector<std::string>& v) {
    std::set<std::string_view> seen;
    for (const auto& s : v) {
        if (!seen.insert(s).second) return true;
    }
    return false;
}

}  // namespace

VariableStart parse_variable_start(std::string_view text) {
    auto t = trim(text);
    VariableStart out;
    if (t.empty()) throw validation_error("BadValue", "variableStart is empty");

    if (t.starts_with(kDerivedPrefix)) {
        auto rest = trim(t.substr(kDerivedPrefix.size()));
        if (rest.size() < 2 || rest.front() != '[' || rest.back() != ']') {
            throw validation_error("BadType", "DerivedVar:: must be followed by [component, ...]: " + std::string(t));
        }
        out.derived_components = split_trimmed(rest.substr(1, rest.size() - 2), ',');
        if (out.derived_components.empty()) {
            throw validation_error("BadType", "DerivedVar::[] needs at least one component");
        }
        for (const auto& c : out.derived_components) {
            if (c.empty()) throw validation_error("BadType", "empty derived component in " + std::string(t));
        }
        if (has_duplicates(out.derived_components)) {
            throw validation_error("BadType", "duplicate derived component in " + std::string(t));
        }
        return out;
    }

    for (auto& piece : split_trimmed(t, ',')) {
        if (piece.empty()) throw validation_error("BadType", "empty entry in variableStart: " + std::string(t));
        auto sep = piece.find("::");
        if (sep != std::string::npos) {
            std::string db(trim(std::string_view(piece).substr(0, sep)));
            std::string name(trim(std::string_view(piece).substr(sep + 2)));
            if (db.empty() || name.empty()) {
                throw validation_error("BadType", "malformed db::name pair: " + piece);
            }
            for (const auto& existing : out.per_database) {
                if (existing.first == db) {
                    throw validation_error("BadType", "database '" + db + "' bound twice in variableStart");
                }
            }
            out.per_database.emplace_back(std::move(db), std::move(name));
            continue;
        }
        std::string name = piece;
        if (name.size() >= 2 && name.front() == '[' && name.back() == ']') {
            name = std::string(trim(std::string_view(name).substr(1, name.size() - 2)));
        }
        if (name.empty()) throw validation_error("BadType", "empty default in variableStart");
        if (out.default_name) throw validation_error("BadType", "more than one default in variableStart: " + std::string(t));
        out.default_name = std::move(name);
    }
    return out;
}

std::string to_string(const VariableStart& vs) {
    if (vs.is_derived()) return std::string(kDerivedPrefix) + "[" + join(vs.derived_components, ", ") + "]";
    std::vector<std::string> parts;
    for (const auto& [db, name] : vs.per_database) parts.push_back(db + "::" + name);
    if (vs.default_name) parts.push_back(*vs.default_name);
    return join(parts, ", ");
}

const VariableEntry* VariableSheet::find(std::string_view variable) const {
    for (const auto& e : entries) {
        if (e.variable == variable) return &e;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Match rules

MatchRule MatchRule::value_set(std::vector<std::string> values) {
    MatchRule r;
    r.kind = RuleKind::ValueSet;
    r.values = std::move(values);
    return r;
}

MatchRule MatchRule::interval(double low, double high, bool low_closed, bool high_closed) {
    MatchRule r;
    r.kind = RuleKind::Interval;
    r.low = {low, low_closed};
    r.high = {high, high_closed};
    return r;
}

MatchRule MatchRule::otherwise() { return MatchRule{}; }

MatchRule MatchRule::copy() {
    MatchRule r;
    r.kind = RuleKind::Copy;
    return r;
}

MatchRule MatchRule::explicit_na(NACode code) {
    MatchRule r;
    r.kind = RuleKind::ExplicitNA;
    r.na_code = code;
    return r;
}

bool MatchRule::matches(std::string_view trimmed, std::optional<double> numeric) const noexcept {
    switch (kind) {
        case RuleKind::ValueSet:
            return std::find(values.begin(), values.end(), trimmed) != values.end();
        case RuleKind::Interval: {
            if (!numeric) return false;
            double x = *numeric;
            bool above = low.closed ? x >= low.value : x > low.value;
            bool below = high.closed ? x <= high.value : x < high.value;
            return above && below;
        }
        case RuleKind::Else:
            return true;
        case RuleKind::Copy:
            return numeric.has_value();
        case RuleKind::ExplicitNA: {
            if (trimmed.size() == 5 && trimmed.starts_with("NA(") && trimmed[4] == ')') {
                return trimmed[3] == na_letter(na_code);
            }
            return trimmed.size() == 5 && trimmed.starts_with("NA::") && trimmed[4] == na_letter(na_code);
        }
    }
    return false;
}

namespace {

Error unparseable(std::string_view text, const std::string& why) {
    return validation_error("UnparseableRule", "cannot parse rule '" + std::string(text) + "': " + why);
}

std::optional<double> parse_bound(std::string_view s) {
    s = trim(s);
    if (s == "inf" || s == "Inf" || s == "+inf" || s == "+Inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-Inf") return -std::numeric_limits<double>::infinity();
    return parse_number(s);
}

std::string format_bound(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_number(v);
}

bool parse_na_token(std::string_view t, NACode& code) {
    return t.size() == 5 && t.starts_with("NA::") && na_from_letter(t[4], code);
}

// Comma-separated tokens; double quotes protect commas, "" escapes a quote.
std::vector<std::string> split_value_list(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    bool in_quotes = false;
    bool was_quoted = false;
    auto flush = [&] {
        std::string token = was_quoted ? current : std::string(trim(current));
        if (token.empty() && !was_quoted) throw unparseable(text, "empty value in list");
        if (token.empty()) throw unparseable(text, "empty quoted value");
        out.push_back(std::move(token));
        current.clear();
        was_quoted = false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            if (!trim(current).empty() || was_quoted) throw unparseable(text, "stray quote");
            current.clear();
            in_quotes = true;
            was_quoted = true;
        } else if (c == ',') {
            flush();
        } else if (was_quoted) {
            if (c != ' ' && c != '\t') throw unparseable(text, "text after closing quote");
        } else {
            current += c;
        }
    }
    if (in_quotes) throw unparseable(text, "unterminated quote");
    flush();
    return out;
}

bool value_needs_quotes(const std::string& v) {
    if (v.empty() || v.find_first_of(",\"") != std::string::npos) return true;
    if (trim(v).size() != v.size()) return true;
    if (v == "else" || v == "copy") return true;
    NACode code;
    if (parse_na_token(v, code)) return true;
    return v.front() == '[' || v.front() == '(';
}

}  // namespace

MatchRule parse_match_rule(std::string_view text) {
    auto t = trim(text);
    if (t.empty()) throw unparseable(text, "empty rule");
    if (t == "else") return MatchRule::otherwise();
    if (t == "copy") return MatchRule::copy();
    NACode code;
    if (parse_na_token(t, code)) return MatchRule::explicit_na(code);
    if (t.starts_with("NA::")) throw unparseable(text, "NA code must be a, b or c");

    if (t.front() == '[' || t.front() == '(') {
        char close = t.back();
        if (close != ']' && close != ')') throw unparseable(text, "interval must end with ] or )");
        auto inner = t.substr(1, t.size() - 2);
        auto comma = inner.find(',');
        if (comma == std::string_view::npos || inner.find(',', comma + 1) != std::string_view::npos) {
            throw unparseable(text, "interval needs exactly two bounds");
        }
        auto low = parse_bound(inner.substr(0, comma));
        auto high = parse_bound(inner.substr(comma + 1));
        if (!low || !high) throw unparseable(text, "interval bounds must be numbers");
        if (*low > *high) throw unparseable(text, "interval low bound exceeds high bound");
        return MatchRule::interval(*low, *high, t.front() == '[', close == ']');
    }

    auto values = split_value_list(t);
    if (has_duplicates(values)) throw unparseable(text, "duplicate value in list");
    return MatchRule::value_set(std::move(values));
}

std::string to_string(const MatchRule& rule) {
    switch (rule.kind) {
        case RuleKind::Else: return "else";
        case RuleKind::Copy: return "copy";
        case RuleKind::ExplicitNA: return std::string("NA::") + na_letter(rule.na_code);
        case RuleKind::Interval:
            return std::string(rule.low.closed ? "[" : "(") + format_bound(rule.low.value) + "," +
                   format_bound(rule.high.value) + (rule.high.closed ? "]" : ")");
        case RuleKind::ValueSet: {
            std::string out;
            for (std::size_t i = 0; i < rule.values.size(); ++i) {
                if (i) out += ',';
                const auto& v = rule.values[i];
                if (!value_needs_quotes(v)) {
                    out += v;
                    continue;
                }
                out += '"';
                for (char c : v) {
                    if (c == '"') out += '"';
                    out += c;
                }
                out += '"';
            }
            return out;
        }
    }
    return "else";
}

RecEnd parse_rec_end(std::string_view text) {
    auto t = trim(text);
    RecEnd r;
    if (t.empty()) throw validation_error("UnparseableRule", "recEnd is empty");
    NACode code;
    if (t == "copy") {
        r.kind = RecEnd::Kind::Copy;
    } else if (parse_na_token(t, code)) {
        r.kind = RecEnd::Kind::NA;
        r.na_code = code;
    } else if (t.starts_with("Func::")) {
        r.kind = RecEnd::Kind::Function;
        r.text = std::string(trim(t.substr(6)));
        if (r.text.empty()) throw validation_error("UnparseableRule", "Func:: needs a function name");
    } else {
        r.kind = RecEnd::Kind::Category;
        r.text = std::string(t);
    }
    return r;
}

std::string to_string(const RecEnd& r) {
    switch (r.kind) {
        case RecEnd::Kind::Copy: return "copy";
        case RecEnd::Kind::NA: return std::string("NA::") + na_letter(r.na_code);
        case RecEnd::Kind::Function: return "Func::" + r.text;
        case RecEnd::Kind::Category: return r.text;
    }
    return r.text;
}

// ---------------------------------------------------------------------------
// Sheets

const std::vector<std::string>& variable_sheet_columns() {
    static const std::vector<std::string> cols = {"variable", "label", "labelLong", "section",
                                                  "variableType", "units", "databaseStart", "variableStart"};
    return cols;
}

const std::vector<std::string>& details_sheet_columns() {
    static const std::vector<std::string> cols = {"variable", "typeEnd", "typeStart", "databaseStart",
                                                  "variableStart", "recEnd", "catLabel", "catLabelLong",
                                                  "units", "recStart", "notes"};
    return cols;
}

namespace {

/// Column lookup over one header; unknown columns become extras.
class Header {
public:
    Header(const std::vector<std::string>& header, const std::vector<std::string>& known,
           const std::vector<std::string>& required, std::string_view sheet) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            std::string name(trim(header[i]));
            if (index_.contains(name)) {
                throw validation_error("DuplicateColumn", std::string(sheet) + " sheet repeats column '" + name + "'",
                                       std::string(sheet) + " header");
            }
            index_[name] = i;
            if (std::find(known.begin(), known.end(), name) == known.end()) {
                extra_names_.push_back(name);
                extra_index_.push_back(i);
            }
        }
        for (const auto& r : required) {
            if (!index_.contains(r)) {
                throw validation_error("MissingColumn", std::string(sheet) + " sheet is missing column '" + r + "'",
                                       std::string(sheet) + " header");
            }
        }
        width_ = header.size();
    }

    std::string get(const std::vector<std::string>& fields, const std::string& column) const {
        auto it = index_.find(column);
        if (it == index_.end() || it->second >= fields.size()) return {};
        return std::string(trim(fields[it->second]));
    }

    std::vector<std::string> extras(const std::vector<std::string>& fields) const {
        std::vector<std::string> out;
        for (auto i : extra_index_) out.emplace_back(i < fields.size() ? std::string(trim(fields[i])) : std::string());
        return out;
    }

    const std::vector<std::string>& extra_names() const { return extra_names_; }
    std::size_t width() const { return width_; }

private:
    std::map<std::string, std::size_t> index_;
    std::vector<std::string> extra_names_;
    std::vector<std::size_t> extra_index_;
    std::size_t width_ = 0;
};

bool blank_record(const std::vector<std::string>& fields) {
    return std::all_of(fields.begin(), fields.end(), [](const std::string& f) { return trim(f).empty(); });
}

std::string where(std::string_view sheet, std::size_t row, std::string_view column) {
    return std::string(sheet) + " row " + std::to_string(row) + (column.empty() ? "" : " " + std::string(column));
}

// Re-tags an error thrown by a cell parser with its sheet location.
template <class F>
auto at_cell(std::string_view sheet, std::size_t row, std::string_view column, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.error_class(), e.code(), where(sheet, row, column) + ": " + e.what(), where(sheet, row, column));
    }
}

VariableType parse_type_cell(const std::string& text, std::string_view sheet, std::size_t row,
                             std::string_view column) {
    auto t = parse_variable_type(text);
    if (!t) {
        throw validation_error("BadType",
                               where(sheet, row, column) + ": expected categorical or continuous, got '" + text + "'",
                               where(sheet, row, column));
    }
    return *t;
}

std::vector<std::string> parse_databases(const std::string& text, std::string_view sheet, std::size_t row) {
    auto dbs = split_trimmed(text, ',');
    if (dbs.empty() || std::any_of(dbs.begin(), dbs.end(), [](const std::string& d) { return d.empty(); })) {
        throw validation_error("BadValue", where(sheet, row, "databaseStart") + ": needs at least one database name",
                               where(sheet, row, "databaseStart"));
    }
    if (has_duplicates(dbs)) {
        throw validation_error("BadValue", where(sheet, row, "databaseStart") + ": duplicate database name",
                               where(sheet, row, "databaseStart"));
    }
    return dbs;
}

std::vector<std::vector<std::string>> data_records(std::string_view csv_text, std::string_view sheet,
                                                   std::vector<std::string>& header) {
    auto records = csv::parse_document(csv_text);
    if (records.empty()) {
        throw validation_error("MissingColumn", std::string(sheet) + " sheet has no header row",
                               std::string(sheet) + " header");
    }
    header = std::move(records.front());
    records.erase(records.begin());
    return records;
}

void check_width(const std::vector<std::string>& fields, const Header& h, std::string_view sheet, std::size_t row) {
    if (fields.size() > h.width()) {
        throw validation_error("BadFormat",
                               where(sheet, row, "") + ": " + std::to_string(fields.size()) + " fields but header has " +
                                   std::to_string(h.width()),
                               where(sheet, row, ""));
    }
}

DetailsRow details_row_from(const std::vector<std::string>& fields, const Header& h, std::size_t row) {
    constexpr std::string_view sheet = "details";
    DetailsRow r;
    r.variable = h.get(fields, "variable");
    if (r.variable.empty()) {
        throw validation_error("BadValue", where(sheet, row, "variable") + ": variable is empty",
                               where(sheet, row, "variable"));
    }
    r.type_end = parse_type_cell(h.get(fields, "typeEnd"), sheet, row, "typeEnd");
    r.type_start = parse_type_cell(h.get(fields, "typeStart"), sheet, row, "typeStart");
    r.database_start = parse_databases(h.get(fields, "databaseStart"), sheet, row);
    r.variable_start = at_cell(sheet, row, "variableStart", [&] { return parse_variable_start(h.get(fields, "variableStart")); });
    r.rec_end = at_cell(sheet, row, "recEnd", [&] { return parse_rec_end(h.get(fields, "recEnd")); });
    r.cat_label = h.get(fields, "catLabel");
    r.cat_label_long = h.get(fields, "catLabelLong");
    r.units = h.get(fields, "units");
    r.rec_start = at_cell(sheet, row, "recStart", [&] { return parse_match_rule(h.get(fields, "recStart")); });
    r.notes = h.get(fields, "notes");
    r.extras = h.extras(fields);
    if (auto issue = type_consistency_issue(r); !issue.empty()) {
        throw validation_error("InconsistentTypes", where(sheet, row, "") + ": " + issue, where(sheet, row, ""));
    }
    return r;
}

const std::vector<std::string> kVariableRequired = {"variable", "variableType", "databaseStart", "variableStart"};
const std::vector<std::string> kDetailsRequired = {"variable", "typeEnd", "typeStart", "databaseStart",
                                                   "variableStart", "recEnd", "recStart"};

}  // namespace

VariableSheet parse_variable_sheet(std::string_view csv_text) {
    constexpr std::string_view sheet = "variables";
    std::vector<std::string> header_fields;
    auto records = data_records(csv_text, sheet, header_fields);
    Header h(header_fields, variable_sheet_columns(), kVariableRequired, sheet);

    VariableSheet vs;
    vs.extra_columns = h.extra_names();
    std::map<std::string, std::size_t> first_row;
    std::size_t row = 0;
    for (const auto& fields : records) {
        ++row;
        if (blank_record(fields)) continue;
        check_width(fields, h, sheet, row);
        VariableEntry e;
        e.variable = h.get(fields, "variable");
        if (e.variable.empty()) {
            throw validation_error("BadValue", where(sheet, row, "variable") + ": variable is empty",
                                   where(sheet, row, "variable"));
        }
        if (auto [it, inserted] = first_row.emplace(e.variable, row); !inserted) {
            throw validation_error("DuplicateVariable",
                                   "variable '" + e.variable + "' defined on rows " + std::to_string(it->second) +
                                       " and " + std::to_string(row),
                                   where(sheet, row, "variable"));
        }
        e.label = h.get(fields, "label");
        e.label_long = h.get(fields, "labelLong");
        e.section = h.get(fields, "section");
        e.variable_type = parse_type_cell(h.get(fields, "variableType"), sheet, row, "variableType");
        e.units = h.get(fields, "units");
        e.database_start = parse_databases(h.get(fields, "databaseStart"), sheet, row);
        e.variable_start = at_cell(sheet, row, "variableStart", [&] { return parse_variable_start(h.get(fields, "variableStart")); });
        e.extras = h.extras(fields);
        vs.entries.push_back(std::move(e));
    }
    return vs;
}

DetailsSheet parse_details_sheet(std::string_view csv_text) {
    constexpr std::string_view sheet = "details";
    std::vector<std::string> header_fields;
    auto records = data_records(csv_text, sheet, header_fields);
    Header h(header_fields, details_sheet_columns(), kDetailsRequired, sheet);

    DetailsSheet ds;
    ds.extra_columns = h.extra_names();
    std::size_t row = 0;
    for (const auto& fields : records) {
        ++row;
        if (blank_record(fields)) continue;
        check_width(fields, h, sheet, row);
        ds.rows.push_back(details_row_from(fields, h, row));
    }
    return ds;
}

DetailsRow make_details_row(const std::vector<std::pair<std::string, std::string>>& cells,
                            const std::vector<std::string>& extra_columns, std::size_t row_number) {
    std::vector<std::string> header = details_sheet_columns();
    header.insert(header.end(), extra_columns.begin(), extra_columns.end());
    std::vector<std::string> fields(header.size());
    for (const auto& [name, value] : cells) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw validation_error("UnknownColumn", "details sheet has no column '" + name + "'", name);
        }
        fields[static_cast<std::size_t>(it - header.begin())] = value;
    }
    Header h(header, details_sheet_columns(), kDetailsRequired, "details");
    return details_row_from(fields, h, row_number);
}

std::string serialize_variable_sheet(const VariableSheet& vs) {
    std::ostringstream out;
    std::vector<std::string> header = variable_sheet_columns();
    header.insert(header.end(), vs.extra_columns.begin(), vs.extra_columns.end());
    csv::write_row(out, header);
    std::vector<std::string> fields;
    for (const auto& e : vs.entries) {
        fields = {e.variable,
                  e.label,
                  e.label_long,
                  e.section,
                  std::string(to_string(e.variable_type)),
                  e.units,
                  join(e.database_start, ", "),
                  to_string(e.variable_start)};
        for (std::size_t i = 0; i < vs.extra_columns.size(); ++i) {
            fields.push_back(i < e.extras.size() ? e.extras[i] : std::string());
        }
        csv::write_row(out, fields);
    }
    return out.str();
}

std::string serialize_details_sheet(const DetailsSheet& ds) {
    std::ostringstream out;
    std::vector<std::string> header = details_sheet_columns();
    header.insert(header.end(), ds.extra_columns.begin(), ds.extra_columns.end());
    csv::write_row(out, header);
    std::vector<std::string> fields;
    for (const auto& r : ds.rows) {
        fields = {r.variable,
                  std::string(to_string(r.type_end)),
                  std::string(to_string(r.type_start)),
                  join(r.database_start, ", "),
                  to_string(r.variable_start),
                  to_string(r.rec_end),
                  r.cat_label,
                  r.cat_label_long,
                  r.units,
                  to_string(r.rec_start),
                  r.notes};
        for (std::size_t i = 0; i < ds.extra_columns.size(); ++i) {
            fields.push_back(i < r.extras.size() ? r.extras[i] : std::string());
        }
        csv::write_row(out, fields);
    }
    return out.str();
}

std::string type_consistency_issue(const DetailsRow& row) {
    const auto kind = row.rec_start.kind;
    if (row.is_derived()) {
        if (row.rec_end.kind != RecEnd::Kind::Function) return "derived rows need recEnd Func::<name>";
        if (kind != RuleKind::Else) return "derived rows need recStart else";
        return {};
    }
    if (row.rec_end.kind == RecEnd::Kind::Function) return "Func:: recEnd requires a DerivedVar:: variableStart";
    if ((kind == RuleKind::Interval || kind == RuleKind::Copy) && row.type_start != VariableType::Continuous) {
        return std::string(kind == RuleKind::Interval ? "interval" : "copy") + " rules need typeStart continuous";
    }
    if (row.type_end == VariableType::Continuous) {
        if (row.rec_end.kind == RecEnd::Kind::Copy && row.type_start != VariableType::Continuous) {
            return "continuous copy needs typeStart continuous";
        }
        if (row.rec_end.kind == RecEnd::Kind::Category && !parse_number(row.rec_end.text)) {
            return "typeEnd continuous needs a numeric recEnd, got '" + row.rec_end.text + "'";
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::ok() const noexcept { return error_count() == 0; }

std::size_t ValidationReport::error_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(), [](const Finding& f) { return f.severity == Severity::Error; }));
}

std::size_t ValidationReport::warning_count() const noexcept { return findings.size() - error_count(); }

namespace {

bool intervals_overlap(const MatchRule& a, const MatchRule& b) {
    Bound lo = a.low.value > b.low.value   ? a.low
               : b.low.value > a.low.value ? b.low
                                           : Bound{a.low.value, a.low.closed && b.low.closed};
    Bound hi = a.high.value < b.high.value   ? a.high
               : b.high.value < a.high.value ? b.high
                                             : Bound{a.high.value, a.high.closed && b.high.closed};
    return lo.value < hi.value || (lo.value == hi.value && lo.closed && hi.closed);
}

}  // namespace

ValidationReport validate_sheets(const VariableSheet& vs, const DetailsSheet& ds) {
    ValidationReport report;
    auto add = [&](Severity sev, std::string sheet, std::size_t row, std::string column, std::string message) {
        report.findings.push_back({sev, std::move(sheet), row, std::move(column), std::move(message)});
    };

    for (std::size_t i = 0; i < vs.entries.size(); ++i) {
        const auto& e = vs.entries[i];
        for (const auto& [db, name] : e.variable_start.per_database) {
            if (std::find(e.database_start.begin(), e.database_start.end(), db) == e.database_start.end()) {
                add(Severity::Error, "variables", i + 1, "variableStart",
                    "database '" + db + "' in variableStart is not listed in databaseStart");
            }
        }
        for (const auto& c : e.variable_start.derived_components) {
            if (!vs.find(c)) {
                add(Severity::Error, "variables", i + 1, "variableStart",
                    "derived component '" + c + "' is not a variable in the variable sheet");
            }
        }
    }

    struct Group {
        std::vector<std::size_t> rows;
    };
    std::vector<std::pair<std::string, std::string>> group_order;
    std::map<std::pair<std::string, std::string>, Group> groups;

    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        const auto& r = ds.rows[i];
        const std::size_t row = i + 1;
        const VariableEntry* entry = vs.find(r.variable);
        if (!entry) {
            add(Severity::Error, "details", row, "variable",
                "variable '" + r.variable + "' is not defined in the variable sheet");
        }
        for (const auto& c : r.variable_start.derived_components) {
            if (!vs.find(c)) {
                add(Severity::Error, "details", row, "variableStart",
                    "derived component '" + c + "' is not a recoded variable in the variable sheet");
            } else if (c == r.variable) {
                add(Severity::Warning, "details", row, "variableStart",
                    "derived variable '" + c + "' lists itself as a component");
            }
        }
        for (const auto& [db, name] : r.variable_start.per_database) {
            if (std::find(r.database_start.begin(), r.database_start.end(), db) == r.database_start.end()) {
                add(Severity::Error, "details", row, "variableStart",
                    "database '" + db + "' in variableStart is not listed in databaseStart");
            }
        }
        if (auto issue = type_consistency_issue(r); !issue.empty()) {
            add(Severity::Error, "details", row, "recStart", issue);
        }
        for (const auto& db : r.database_start) {
            if (entry && std::find(entry->database_start.begin(), entry->database_start.end(), db) ==
                             entry->database_start.end()) {
                add(Severity::Warning, "details", row, "databaseStart",
                    "database '" + db + "' is not listed for '" + r.variable + "' in the variable sheet");
            }
            auto key = std::make_pair(r.variable, db);
            auto [it, inserted] = groups.try_emplace(key);
            if (inserted) group_order.push_back(key);
            it->second.rows.push_back(i);
        }
    }

    for (const auto& key : group_order) {
        const auto& rows = groups[key].rows;
        const std::string label = "'" + key.first + "' in database '" + key.second + "'";
        std::size_t else_count = 0;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto& rule = ds.rows[rows[k]].rec_start;
            if (rule.kind != RuleKind::Else || ds.rows[rows[k]].is_derived()) continue;
            if (++else_count > 1) {
                add(Severity::Error, "details", rows[k] + 1, "recStart", "more than one else rule for " + label);
            } else if (k + 1 != rows.size()) {
                add(Severity::Warning, "details", rows[k] + 1, "recStart",
                    "else rule for " + label + " is not last; it is applied after all other rules");
            }
        }
        for (std::size_t a = 0; a < rows.size(); ++a) {
            const auto& ra = ds.rows[rows[a]].rec_start;
            if (ra.kind != RuleKind::Interval) continue;
            for (std::size_t b = a + 1; b < rows.size(); ++b) {
                const auto& rb = ds.rows[rows[b]].rec_start;
                if (rb.kind == RuleKind::Interval && intervals_overlap(ra, rb)) {
                    add(Severity::Warning, "details", rows[b] + 1, "recStart",
                        "interval " + to_string(rb) + " overlaps " + to_string(ra) + " (row " +
                            std::to_string(rows[a] + 1) + ") for " + label + "; the earlier row wins");
                }
            }
        }
    }
    return report;
}

std::string to_text(const ValidationReport& report) {
    std::ostringstream out;
    for (const auto& f : report.findings) {
        out << (f.severity == Severity::Error ? "error" : "warning") << ": " << f.sheet;
        if (f.row) out << " row " << f.row;
        if (!f.column.empty()) out << " " << f.column;
        out << ": " << f.message << '\n';
    }
    out << (report.ok() ? "ok" : "FAILED") << " (" << report.error_count() << " errors, " << report.warning_count()
        << " warnings)\n";
    return out.str();
}

}  // namespace harmonize
