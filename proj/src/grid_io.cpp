#include "sentinel/grid_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sentinel {

using nlohmann::json;

std::string format_iso8601(std::int64_t epoch_sec) {
    std::time_t t = static_cast<std::time_t>(epoch_sec);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::int64_t parse_iso8601(const std::string& s) {
    std::tm tm{};
    int y, mo, d, h, mi, sec;
    if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%dZ", &y, &mo, &d, &h, &mi, &sec) != 6)
        throw SchemaError("bad ISO-8601 timestamp: " + s);
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = sec;
    return static_cast<std::int64_t>(timegm(&tm));
}

std::string grid_to_csv(const SeriesGrid& grid) {
    std::string out;
    out += "timestamp";
    for (const auto& s : grid.sensors) {
        out += ',';
        out += s.id;
    }
    out += '\n';
    char buf[40];
    for (std::size_t r = 0; r < grid.rows(); ++r) {
        out += format_iso8601(grid.timestamp(r));
        for (std::size_t c = 0; c < grid.cols(); ++c) {
            out += ',';
            const double v = grid.at(r, c);
            if (!is_missing(v)) {
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                out += buf;
            }
        }
        out += '\n';
    }
    return out;
}

std::string grid_sidecar_json(const SeriesGrid& grid, const NormalizationSpec* norm) {
    json j;
    j["schema_version"] = 1;
    j["start"] = grid.start;
    j["interval"] = grid.interval;
    json sensors = json::array();
    for (const auto& s : grid.sensors) {
        sensors.push_back({{"id", s.id},
                           {"kind", to_string(s.kind)},
                           {"unit", s.unit},
                           {"is_discrete", s.is_discrete}});
    }
    j["sensors"] = sensors;
    if (norm) {
        json n = json::array();
        for (std::size_t i = 0; i < norm->ids.size(); ++i) {
            n.push_back({{"id", norm->ids[i]},
                         {"min", norm->entries[i].min},
                         {"max", norm->entries[i].max},
                         {"degenerate", norm->entries[i].degenerate}});
        }
        j["normalization"] = n;
    }
    return j.dump(2);
}

SeriesGrid grid_from_csv(const std::string& csv, const std::string& sidecar_json) {
    json j = json::parse(sidecar_json);
    SeriesGrid grid;
    grid.start = j.at("start").get<std::int64_t>();
    grid.interval = j.at("interval").get<std::int64_t>();
    for (const auto& s : j.at("sensors")) {
        SensorMeta m;
        m.id = s.at("id").get<std::string>();
        m.kind = sensor_kind_from_string(s.at("kind").get<std::string>());
        m.unit = s.value("unit", "");
        m.is_discrete = s.value("is_discrete", false);
        grid.sensors.push_back(m);
    }

    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty grid CSV");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t pos = line.find(',');
        if (pos == std::string::npos) throw SchemaError("malformed grid CSV row");
        std::size_t col = 0;
        std::size_t begin = pos + 1;
        while (col < grid.cols()) {
            std::size_t next = line.find(',', begin);
            std::string cell = line.substr(begin, next == std::string::npos
                                                      ? std::string::npos
                                                      : next - begin);
            grid.values.push_back(cell.empty() ? kMissing : std::strtod(cell.c_str(), nullptr));
            ++col;
            if (next == std::string::npos) break;
            begin = next + 1;
        }
        while (col++ < grid.cols()) grid.values.push_back(kMissing);
    }
    return grid;
}

std::optional<NormalizationSpec> normalization_from_sidecar(const std::string& sidecar_json) {
    json j = json::parse(sidecar_json);
    if (!j.contains("normalization")) return std::nullopt;
    NormalizationSpec spec;
    for (const auto& e : j["normalization"]) {
        spec.ids.push_back(e.at("id").get<std::string>());
        spec.entries.push_back({e.at("min").get<double>(), e.at("max").get<double>(),
                                e.at("degenerate").get<bool>()});
    }
    return spec;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed: " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace sentinel
