#pragma once

// Session event logs as JSON Lines, one event per line:
//   {"seq":1,"ts":"2026-01-01T00:00:00.000Z","type":"created","payload":{...}}

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "mplab/session.hpp"

namespace mplab {

std::string to_json_line(const SessionEvent& event);  // no trailing newline
SessionEvent parse_event_line(std::string_view line);  // throws ParseError

std::string write_event_log(const std::vector<SessionEvent>& events);
// Throws ParseError naming the line.
std::vector<SessionEvent> read_event_log(std::string_view text);

// Append-only log file. Each append writes one complete line and flushes.
class EventLogFile {
public:
    explicit EventLogFile(std::filesystem::path path);
    void append(const SessionEvent& event);
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::mutex mutex_;
    std::ofstream out_;
};

std::vector<SessionEvent> load_event_log(const std::filesystem::path& path);

}  // namespace mplab
