#ifndef SENTINEL_GRID_IO_HPP
#define SENTINEL_GRID_IO_HPP

#include <optional>
#include <string>

#include "sentinel/grid.hpp"

namespace sentinel {

/// ISO-8601 UTC formatting for lattice timestamps (epoch seconds).
std::string format_iso8601(std::int64_t epoch_sec);
std::int64_t parse_iso8601(const std::string& s);

/**
 * Grid CSV: first column ISO-8601 UTC timestamp, one column per sensor id,
 * empty cell = missing. Finite values print with 17 significant digits so
 * the round trip is bit-exact.
 */
std::string grid_to_csv(const SeriesGrid& grid);

/// JSON sidecar holding SensorMeta and, when present, the NormalizationSpec.
std::string grid_sidecar_json(const SeriesGrid& grid,
                              const NormalizationSpec* norm = nullptr);

SeriesGrid grid_from_csv(const std::string& csv, const std::string& sidecar_json);

std::optional<NormalizationSpec> normalization_from_sidecar(const std::string& sidecar_json);

/// Write a file atomically (temp + rename).
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace sentinel

#endif
