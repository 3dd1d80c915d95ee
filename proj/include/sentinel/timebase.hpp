#ifndef SENTINEL_TIMEBASE_HPP
#define SENTINEL_TIMEBASE_HPP

#include <tuple>

#include "sentinel/grid.hpp"

namespace sentinel {

/// Native sampling period above which a series is forward-filled instead of
/// interpolated.
inline constexpr std::int64_t kSparsePeriodSec = 60;

/**
 * Resample one raw series onto the lattice start + k*interval, k in
 * [0, (end-start)/interval]. Continuous dense sensors are linearly
 * interpolated; discrete sensors and sparse sensors (native period >=
 * kSparsePeriodSec) are forward-filled. Lattice points before the first
 * sample back-fill from it; points after the last forward-fill.
 */
std::vector<double> resample_uniform(const RawSeries& raw, std::int64_t start, std::int64_t end,
                                     std::int64_t interval);

/// Resample a set of raw series onto a common lattice covering their joint span.
SeriesGrid build_grid(const std::vector<RawSeries>& series, std::int64_t interval = 30);

SeriesGrid build_grid(const std::vector<RawSeries>& series, std::int64_t start, std::int64_t end,
                      std::int64_t interval);

/// Per-sensor min/max over non-missing entries; degenerate when min == max.
NormalizationSpec fit_normalization(const SeriesGrid& grid);

/**
 * v -> (v - min) / (max - min). Degenerate sensors map every value to 0.5.
 * Missing stays missing. Out-of-range values are not clipped; attack data
 * beyond training bounds may exceed [0,1].
 */
SeriesGrid apply_normalization(const SeriesGrid& grid, const NormalizationSpec& spec);

/// Contiguous chronological split at floor(0.70*T) and floor(0.85*T).
std::tuple<SeriesGrid, SeriesGrid, SeriesGrid> temporal_split(const SeriesGrid& grid,
                                                              const SplitSpec& spec = {});

/// Copy rows [lo, hi) of a grid into a standalone grid.
SeriesGrid slice_rows(const SeriesGrid& grid, std::size_t lo, std::size_t hi);

}  // namespace sentinel

#endif
