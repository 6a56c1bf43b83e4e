#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "harmonize/dvl.hpp"
#include "harmonize/io.hpp"
#include "harmonize/recode.hpp"
#include "harmonize/sheet_model.hpp"

namespace harmonize {

constexpr int kManifestSchemaVersion = 1;

/// Sheets plus where they came from. `text` is what gets hashed.
struct SheetInput {
    std::string text;
    std::optional<std::filesystem::path> path;
};

SheetInput read_sheet_file(const std::filesystem::path& path);

/// Everything one recode run depends on. Shared by the CLI and the service so
/// that both produce the same bytes.
struct RecodeJob {
    SheetInput variables;
    SheetInput details;
    SourceOptions source;
    std::string database;
    std::vector<std::string> selected;
    std::vector<std::string> passthrough;  // may contain "*"
    /// Library versions for derived variables listed in `selected`.
    std::vector<DvlVersion> derived_specs;
    /// Extra derived variables added on top of the sheets.
    std::vector<DvlVersion> derive;
    std::optional<std::filesystem::path> dvl_dir;  // recorded only
    bool strict_unmatched = false;
    bool parallel = true;

    DataFormat out_format = DataFormat::Csv;
    std::filesystem::path out;
    std::string out_table = "recoded";

    std::function<void(std::size_t rows_done)> progress;
};

struct RecodeResult {
    RunStats stats;
    std::string output_sha256;
    nlohmann::json manifest;
};

/// Library versions needed by `job`: latest version of each selected derived
/// variable and of each name in `derive_names`. Throws Error{UnknownName}.
void resolve_derived(RecodeJob& job, const DerivedVariableLibrary& lib, const std::vector<std::string>& derive_names);

/// Parses the sheets, compiles, streams the source into `job.out`, then
/// fingerprints inputs and output.
RecodeResult run_recode(const RecodeJob& job);

/// Hash of the recoded data: the file for CSV, the table rendered as CSV for sqlite.
std::string output_fingerprint(DataFormat format, const std::filesystem::path& out, const std::string& table);

/// Rebuilds the job a manifest describes, checking that every recorded input
/// still hashes the same. Throws Error{InputChanged} otherwise, and
/// Error{UnknownName} for DVL entries missing from the recorded directory.
RecodeJob job_from_manifest(const nlohmann::json& manifest);

struct ReplayResult {
    std::string expected_sha256;
    std::string actual_sha256;
    bool matches() const { return expected_sha256 == actual_sha256; }
};

/// Re-runs the manifest's recode into `out` (or its recorded output path).
ReplayResult replay(const nlohmann::json& manifest, const std::optional<std::filesystem::path>& out = std::nullopt);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace harmonize
