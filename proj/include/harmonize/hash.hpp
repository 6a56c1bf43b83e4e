#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

namespace harmonize {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);

class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(std::string_view data);
    std::string hex_digest();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace harmonize
