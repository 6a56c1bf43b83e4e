#include "harmonize/summarize.hpp"

#include <algorithm>

#include "harmonize/error.hpp"
#include "harmonize/text.hpp"

namespace harmonize {

std::string_view to_string(SniffedType t) noexcept {
    switch (t) {
        case SniffedType::NumericLike: return "numericLike";
        case SniffedType::TextLike: return "textLike";
        case SniffedType::Mixed: return "mixed";
    }
    return "textLike";
}

void SummaryBuilder::add(std::string_view cell) {
    ++rows_;
    if (is_missing(cell)) {
        ++missing_;
        return;
    }
    const std::string_view t = trim(cell);
    if (auto it = counts_.find(t); it != counts_.end()) {
        ++it->second;
    } else {
        counts_.emplace(std::string(t), 1);
    }
    if (auto n = parse_number(t)) {
        ++numeric_;
        sum_ += *n;
        ++numbers_[*n];
    }
}

VariableSummary SummaryBuilder::finish(std::string name, std::size_t k) const {
    VariableSummary s;
    s.name = std::move(name);
    s.n_rows = rows_;
    s.n_missing = missing_;
    s.distinct_count = counts_.size();

    const std::size_t present = rows_ - missing_;
    if (present == 0 || numeric_ == 0) {
        s.sniffed_type = SniffedType::TextLike;
    } else if (static_cast<double>(numeric_) >= 0.99 * static_cast<double>(present)) {
        s.sniffed_type = SniffedType::NumericLike;
    } else {
        s.sniffed_type = SniffedType::Mixed;
    }

    std::vector<std::pair<std::string, std::size_t>> all(counts_.begin(), counts_.end());
    const std::size_t keep = std::min(k, all.size());
    // counts_ is already value-ordered, so a stable sort by count keeps value ties ascending
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    all.resize(keep);
    s.top_categories = std::move(all);

    if (s.sniffed_type == SniffedType::NumericLike) {
        NumericStats st;
        st.min = numbers_.begin()->first;
        st.max = numbers_.rbegin()->first;
        st.mean = static_cast<double>(sum_ / static_cast<long double>(numeric_));
        // exact median from the value histogram
        const std::size_t lo_rank = (numeric_ - 1) / 2;
        const std::size_t hi_rank = numeric_ / 2;
        std::size_t seen = 0;
        std::optional<double> lo;
        std::optional<double> hi;
        for (const auto& [v, n] : numbers_) {
            if (!lo && lo_rank < seen + n) lo = v;
            if (!hi && hi_rank < seen + n) {
                hi = v;
                break;
            }
            seen += n;
        }
        st.median = *lo == *hi ? *lo : (*lo + *hi) / 2.0;
        s.numeric = st;
    }
    return s;
}

VariableSummary summarize_variable(TabularSource& source, std::string_view column, std::size_t k) {
    auto idx = source.column_index(column);
    if (!idx) throw io_error("UnknownColumn", "source has no column '" + std::string(column) + "'", std::string(column));
    SummaryBuilder builder;
    RowBatch batch;
    while (source.next_batch(batch)) {
        for (std::size_t r = 0; r < batch.size(); ++r) builder.add(batch.row(r)[*idx]);
    }
    return builder.finish(std::string(column), k);
}

nlohmann::json to_json(const VariableSummary& s) {
    nlohmann::json top = nlohmann::json::array();
    for (const auto& [v, n] : s.top_categories) top.push_back({{"value", v}, {"count", n}});
    nlohmann::json j = {{"name", s.name},
                        {"sniffedType", to_string(s.sniffed_type)},
                        {"nRows", s.n_rows},
                        {"nMissing", s.n_missing},
                        {"distinctCount", s.distinct_count},
                        {"topCategories", top}};
    if (s.numeric) {
        j["numeric"] = {{"min", s.numeric->min}, {"max", s.numeric->max}, {"mean", s.numeric->mean},
                        {"median", s.numeric->median}};
    } else {
        j["numeric"] = nullptr;
    }
    return j;
}

}  // namespace harmonize
