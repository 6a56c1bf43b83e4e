#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "harmonize/io.hpp"

namespace harmonize {

enum class SniffedType { NumericLike, TextLike, Mixed };

std::string_view to_string(SniffedType t) noexcept;

struct NumericStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double median = 0.0;

    bool operator==(const NumericStats&) const = default;
};

struct VariableSummary {
    std::string name;
    SniffedType sniffed_type = SniffedType::TextLike;
    std::size_t n_rows = 0;
    std::size_t n_missing = 0;
    std::size_t distinct_count = 0;
    /// Count descending, then value ascending; at most K entries.
    std::vector<std::pair<std::string, std::size_t>> top_categories;
    std::optional<NumericStats> numeric;  // present iff NumericLike

    bool operator==(const VariableSummary&) const = default;
};

constexpr std::size_t kDefaultTopCategories = 50;

/// Accumulates one column's cells. Values are keyed by their trimmed text.
class SummaryBuilder {
public:
    void add(std::string_view cell);
    VariableSummary finish(std::string name, std::size_t k = kDefaultTopCategories) const;

private:
    std::size_t rows_ = 0;
    std::size_t missing_ = 0;
    std::size_t numeric_ = 0;
    long double sum_ = 0.0L;
    std::map<std::string, std::size_t, std::less<>> counts_;
    std::map<double, std::size_t> numbers_;
};

/// Single pass over the rest of the stream. Throws Error{UnknownColumn}.
VariableSummary summarize_variable(TabularSource& source, std::string_view column,
                                   std::size_t k = kDefaultTopCategories);

nlohmann::json to_json(const VariableSummary& s);

}  // namespace harmonize
