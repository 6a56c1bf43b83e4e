#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "harmonize/io.hpp"

namespace harmonize::detail {

std::unique_ptr<TabularSource> open_csv_source(const SourceOptions& options);
std::unique_ptr<TabularSource> open_sqlite_source(const SourceOptions& options);
std::unique_ptr<RowSink> open_csv_sink(const std::filesystem::path& location, std::vector<std::string> columns);
std::unique_ptr<RowSink> open_sqlite_sink(const std::filesystem::path& location, const std::string& table,
                                          std::vector<std::string> columns);

}  // namespace harmonize::detail
