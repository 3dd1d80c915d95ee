#include "sentinel/timebase.hpp"

#include <algorithm>
#include <cmath>

namespace sentinel {

std::vector<double> resample_uniform(const RawSeries& raw, std::int64_t start, std::int64_t end,
                                     std::int64_t interval) {
    if (interval <= 0) throw ConfigError("interval must be positive");
    if (start > end) throw ConfigError("start must not exceed end");

    std::vector<RawSample> present;
    present.reserve(raw.samples.size());
    std::int64_t prev_t = std::numeric_limits<std::int64_t>::min();
    for (const auto& s : raw.samples) {
        if (s.t <= prev_t && prev_t != std::numeric_limits<std::int64_t>::min())
            throw UnorderedInputError("non-monotonic timestamps in series " + raw.sensor.id);
        prev_t = s.t;
        if (!is_missing(s.value)) present.push_back(s);
    }
    if (present.empty())
        throw EmptySeriesError("series has no non-missing samples: " + raw.sensor.id);

    const bool fill_forward =
        raw.sensor.is_discrete || raw.native_period() > kSparsePeriodSec;

    const std::size_t n = static_cast<std::size_t>((end - start) / interval) + 1;
    std::vector<double> out(n);
    std::size_t j = 0;  // present[j] is the first sample with t > lattice point
    for (std::size_t k = 0; k < n; ++k) {
        const std::int64_t t = start + static_cast<std::int64_t>(k) * interval;
        while (j < present.size() && present[j].t <= t) ++j;
        if (j == 0) {
            out[k] = present.front().value;  // back-fill before first sample
        } else if (j == present.size()) {
            out[k] = present.back().value;  // forward-fill after last sample
        } else {
            const auto& a = present[j - 1];
            const auto& b = present[j];
            if (fill_forward || a.t == t) {
                out[k] = a.value;
            } else {
                const double frac =
                    static_cast<double>(t - a.t) / static_cast<double>(b.t - a.t);
                out[k] = a.value + frac * (b.value - a.value);
            }
        }
    }
    return out;
}

SeriesGrid build_grid(const std::vector<RawSeries>& series, std::int64_t interval) {
    if (series.empty()) throw EmptySeriesError("no series to grid");
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& s : series) {
        if (s.samples.empty()) continue;
        lo = std::min(lo, s.samples.front().t);
        hi = std::max(hi, s.samples.back().t);
    }
    if (lo > hi) throw EmptySeriesError("all series empty");
    return build_grid(series, lo, hi, interval);
}

SeriesGrid build_grid(const std::vector<RawSeries>& series, std::int64_t start, std::int64_t end,
                      std::int64_t interval) {
    SeriesGrid grid;
    grid.start = start;
    grid.interval = interval;
    for (const auto& s : series) grid.sensors.push_back(s.sensor);
    const std::size_t n_rows = static_cast<std::size_t>((end - start) / interval) + 1;
    grid.values.assign(n_rows * series.size(), kMissing);
    for (std::size_t c = 0; c < series.size(); ++c) {
        auto col = resample_uniform(series[c], start, end, interval);
        for (std::size_t r = 0; r < n_rows; ++r) grid.at(r, c) = col[r];
    }
    return grid;
}

NormalizationSpec fit_normalization(const SeriesGrid& grid) {
    if (grid.rows() == 0 || grid.cols() == 0) throw EmptySeriesError("empty grid");
    NormalizationSpec spec;
    for (std::size_t c = 0; c < grid.cols(); ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        std::size_t count = 0;
        for (std::size_t r = 0; r < grid.rows(); ++r) {
            const double v = grid.at(r, c);
            if (is_missing(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            ++count;
        }
        if (count == 0)
            throw EmptySeriesError("sensor has no non-missing entries: " + grid.sensors[c].id);
        spec.ids.push_back(grid.sensors[c].id);
        spec.entries.push_back({lo, hi, lo == hi});
    }
    return spec;
}

SeriesGrid apply_normalization(const SeriesGrid& grid, const NormalizationSpec& spec) {
    SeriesGrid out = grid;
    for (std::size_t c = 0; c < grid.cols(); ++c) {
        const NormEntry* e = spec.find(grid.sensors[c].id);
        if (!e) throw MissingSpecError("no normalization entry for " + grid.sensors[c].id);
        for (std::size_t r = 0; r < grid.rows(); ++r) {
            const double v = grid.at(r, c);
            if (is_missing(v)) continue;
            out.at(r, c) = e->degenerate ? 0.5 : (v - e->min) / (e->max - e->min);
        }
    }
    return out;
}

SeriesGrid slice_rows(const SeriesGrid& grid, std::size_t lo, std::size_t hi) {
    SeriesGrid out;
    out.start = grid.timestamp(lo);
    out.interval = grid.interval;
    out.sensors = grid.sensors;
    out.values.assign(grid.values.begin() + static_cast<std::ptrdiff_t>(lo * grid.cols()),
                      grid.values.begin() + static_cast<std::ptrdiff_t>(hi * grid.cols()));
    return out;
}

std::tuple<SeriesGrid, SeriesGrid, SeriesGrid> temporal_split(const SeriesGrid& grid,
                                                              const SplitSpec& spec) {
    const std::size_t t = grid.rows();
    if (t < 3) throw TooShortError("grid too short to split");
    const auto b1 = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(t)));
    const auto b2 = static_cast<std::size_t>(
        std::floor((spec.train_fraction + spec.val_fraction) * static_cast<double>(t)));
    return {slice_rows(grid, 0, b1), slice_rows(grid, b1, b2), slice_rows(grid, b2, t)};
}

}  // namespace sentinel
