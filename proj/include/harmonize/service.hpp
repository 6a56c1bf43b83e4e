#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"

#include "harmonize/sheet_model.hpp"

namespace harmonize {

struct ServiceOptions {
    /// Uploads and job outputs live here.
    std::filesystem::path work_dir;
    /// Library directory; loaded at start and saved after every POST /dvl.
    std::optional<std::filesystem::path> dvl_dir;
    std::chrono::seconds session_ttl{2 * 60 * 60};
    std::size_t max_upload_bytes = std::size_t{1} << 30;
};

/// HTTP front end over the engine. One recode job per session; jobs run on
/// their own threads.
class Service {
public:
    explicit Service(ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Blocks until stop().
    bool listen(const std::string& host, int port);
    /// Binds an ephemeral port and returns it (or -1); then call listen_after_bind().
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();
    void wait_until_ready() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

nlohmann::json to_json(const ValidationReport& report);

}  // namespace harmonize
