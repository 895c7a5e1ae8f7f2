#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cavcool/config.hpp"

namespace cavcool {

struct HttpReply {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

struct ServiceOptions {
    std::string default_config = "defaults-oh";
    std::size_t undo_depth = 64;
};

// In-memory sessions behind the HTTP/JSON routes
//   POST /sessions                 {"config": name|path, "config_text": ..., "overrides": {key: value}}
//   GET  /sessions/{id}
//   POST /sessions/{id}/step       {"transition": "v0-0:J2-0" | "offset_Hz": x, "duration_ms": t, "fsr_override_Hz": f}
//   POST /sessions/{id}/undo
//   GET  /sessions/{id}/spectrum
//   GET  /sessions/{id}/rates
//   GET  /sessions/{id}/export     ?format=trajectory|schedule
//   DELETE /sessions/{id}
// Frequencies are in Hz, durations in ms, rates in s^-1. Requests on one
// session are serialised; distinct sessions run concurrently.
class ControlService {
public:
    explicit ControlService(ServiceOptions opt = {});
    ~ControlService();

    HttpReply handle(const std::string& method, const std::string& path, const std::string& body,
                     const std::map<std::string, std::string>& query = {});

    struct Session;

private:
    std::shared_ptr<Session> find(const std::string& id);

    ServiceOptions opt_;
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

}  // namespace cavcool
