#include "acae/interactions.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace acae {
namespace {

std::vector<std::string> split_fields(const std::string& line, LogFormat format) {
    std::vector<std::string> out;
    switch (format) {
        case LogFormat::double_colon: {
            std::size_t pos = 0;
            while (true) {
                std::size_t next = line.find("::", pos);
                if (next == std::string::npos) {
                    out.push_back(line.substr(pos));
                    break;
                }
                out.push_back(line.substr(pos, next - pos));
                pos = next + 2;
            }
            break;
        }
        case LogFormat::csv: {
            std::size_t pos = 0;
            while (true) {
                std::size_t next = line.find(',', pos);
                if (next == std::string::npos) {
                    out.push_back(line.substr(pos));
                    break;
                }
                out.push_back(line.substr(pos, next - pos));
                pos = next + 1;
            }
            break;
        }
        case LogFormat::whitespace: {
            std::istringstream in(line);
            std::string field;
            while (in >> field) out.push_back(field);
            break;
        }
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

bool parse_i64(const std::string& s, std::int64_t& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// days_from_civil).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

// Integer seconds, or a YYYY/MM/DD | YYYY-MM-DD date.
bool parse_timestamp(const std::string& s, std::int64_t& out) {
    if (parse_i64(s, out)) return true;
    char sep = 0;
    if (s.find('/') != std::string::npos) sep = '/';
    else if (s.find('-') != std::string::npos) sep = '-';
    else return false;

    std::int64_t y = 0, m = 0, d = 0;
    std::size_t p1 = s.find(sep);
    std::size_t p2 = s.find(sep, p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos) return false;
    if (!parse_i64(s.substr(0, p1), y) || !parse_i64(s.substr(p1 + 1, p2 - p1 - 1), m) ||
        !parse_i64(s.substr(p2 + 1), d)) {
        return false;
    }
    if (m < 1 || m > 12 || d < 1 || d > 31) return false;
    out = days_from_civil(y, static_cast<unsigned>(m), static_cast<unsigned>(d)) * 86400;
    return true;
}

}  // namespace

ColumnRoles ColumnRoles::parse(const std::string& descriptor) {
    ColumnRoles roles;
    roles.user = roles.item = roles.rating = kAbsent;
    std::size_t column = 0;
    std::size_t pos = 0;
    while (pos <= descriptor.size()) {
        std::size_t next = descriptor.find(',', pos);
        const std::string name =
            descriptor.substr(pos, next == std::string::npos ? next : next - pos);
        if (name == "user") roles.user = column;
        else if (name == "item") roles.item = column;
        else if (name == "rating") roles.rating = column;
        else if (name == "timestamp") roles.timestamp = column;
        else if (name != "-" && !name.empty())
            throw std::invalid_argument("unknown column role: " + name);
        ++column;
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (roles.user == kAbsent || roles.item == kAbsent || roles.rating == kAbsent) {
        throw std::invalid_argument("column descriptor must name user, item and rating: " +
                                    descriptor);
    }
    return roles;
}

LogFormat parse_log_format(const std::string& name) {
    if (name == "double_colon") return LogFormat::double_colon;
    if (name == "csv") return LogFormat::csv;
    if (name == "whitespace") return LogFormat::whitespace;
    throw std::invalid_argument("unknown log format: " + name);
}

std::string to_string(LogFormat fmt) {
    switch (fmt) {
        case LogFormat::double_colon: return "double_colon";
        case LogFormat::csv: return "csv";
        case LogFormat::whitespace: return "whitespace";
    }
    return "?";
}

InteractionLog parse_log(const std::filesystem::path& path, LogFormat format,
                         const ColumnRoles& roles) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());

    InteractionLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        auto fields = split_fields(line, format);
        std::size_t required = std::max(roles.user, std::max(roles.item, roles.rating));
        if (roles.timestamp != ColumnRoles::kAbsent) required = std::max(required, roles.timestamp);

        Interaction rec;
        bool ok = fields.size() > required;
        if (ok) {
            rec.user = fields[roles.user];
            rec.item = fields[roles.item];
            ok = !rec.user.empty() && !rec.item.empty() && parse_double(fields[roles.rating], rec.rating);
        }
        if (ok && roles.timestamp != ColumnRoles::kAbsent) {
            std::int64_t ts = 0;
            ok = parse_timestamp(fields[roles.timestamp], ts);
            if (ok) rec.timestamp = ts;
        }
        if (ok) {
            log.records.push_back(std::move(rec));
        } else {
            log.rejected_lines.push_back(line_no);
        }
    }
    return log;
}

InteractionLog dedupe_earliest(const InteractionLog& log) {
    // Index of the earliest record per (user, item).
    std::unordered_map<std::string, std::size_t> earliest;
    earliest.reserve(log.records.size());
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const Interaction& rec = log.records[i];
        if (!rec.timestamp) {
            throw std::runtime_error("dedupe_earliest: record without timestamp (user " +
                                     rec.user + ", item " + rec.item + ")");
        }
        std::string key = rec.user + '\x1f' + rec.item;
        auto [it, inserted] = earliest.try_emplace(std::move(key), i);
        if (!inserted && *rec.timestamp < *log.records[it->second].timestamp) {
            it->second = i;
        }
    }
    InteractionLog out;
    out.rejected_lines = log.rejected_lines;
    out.records.reserve(earliest.size());
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const Interaction& rec = log.records[i];
        std::string key = rec.user + '\x1f' + rec.item;
        if (earliest.at(key) == i) out.records.push_back(rec);
    }
    return out;
}

}  // namespace acae
