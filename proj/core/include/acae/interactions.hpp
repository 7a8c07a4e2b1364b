#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace acae {

struct Interaction {
    std::string user;
    std::string item;
    double rating = 0.0;
    std::optional<std::int64_t> timestamp;  // seconds
};

struct InteractionLog {
    std::vector<Interaction> records;
    std::vector<std::size_t> rejected_lines;  // 1-based line numbers of skipped lines
};

enum class LogFormat { double_colon, csv, whitespace };

/// Maps raw file columns onto record fields. Values are 0-based column
/// positions; kAbsent marks a role the file does not carry (only timestamp
/// may be absent).
struct ColumnRoles {
    static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

    std::size_t user = 0;
    std::size_t item = 1;
    std::size_t rating = 2;
    std::size_t timestamp = kAbsent;

    /// Parses a descriptor like "user,item,rating,timestamp" where each
    /// entry names the role of that column; "-" skips a column.
    static ColumnRoles parse(const std::string& descriptor);
};

LogFormat parse_log_format(const std::string& name);
std::string to_string(LogFormat fmt);

/// Reads one record per well-formed line. Malformed lines are skipped and
/// recorded in rejected_lines; an unreadable file throws std::runtime_error.
/// Accepts LF or CRLF endings. Timestamps may be integer seconds or a
/// YYYY/MM/DD (or YYYY-MM-DD) date, converted to seconds since the epoch.
InteractionLog parse_log(const std::filesystem::path& path, LogFormat format,
                         const ColumnRoles& roles);

/// For every (user, item) pair rated more than once, keeps exactly the
/// record with the smallest timestamp; record order is otherwise preserved.
/// Throws std::runtime_error if any record lacks a timestamp.
InteractionLog dedupe_earliest(const InteractionLog& log);

}  // namespace acae
