#ifndef SENTINEL_TRANSFORM_HPP
#define SENTINEL_TRANSFORM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentinel/grid.hpp"

namespace sentinel {

/// Tier coefficients multiplying base attack magnitudes.
double severity_coefficient(int tier);  // 1..5 -> 0.01/0.05/0.10/0.50/1.00

struct SeverityTier {
    int tier = 5;
    double coefficient() const { return severity_coefficient(tier); }
};

enum class TransformKind {
    Identity,
    Scaling,
    Oscillation,
    Spike,
    Offset,
    Delay,
    Replay,
    StateToggle,
    Precision,
    Noise,
    PhysicsViolation,
    Clip,
    Loss,
    AsymptoticClip,
    Conditional,
    Pattern,
    Propagation,
    Null,
};

inline constexpr int kTransformKindCount = 18;

const char* to_string(TransformKind k);
TransformKind transform_kind_from_string(const std::string& s);  // throws KindError

enum class TargetMode { by_id, by_kind, by_pattern };

struct TargetSelector {
    TargetMode mode = TargetMode::by_id;
    std::string argument;

    /// Column indices of matching sensors; throws TargetError when none match.
    std::vector<std::size_t> resolve(const SeriesGrid& grid) const;
};

struct AttackWindow {
    std::int64_t start = 0;
    std::int64_t end = 0;
};

/**
 * Declarative description of one transformer. Parameters are kind-specific
 * and carry Table-style base magnitudes; unset parameters fall back to the
 * per-kind defaults. Children are populated only for the composing kinds
 * (Conditional, Propagation, Pattern nesting).
 */
struct TransformSpec {
    TransformKind kind = TransformKind::Identity;
    nlohmann::json params = nlohmann::json::object();
    std::vector<TransformSpec> children;
    std::string rng_label;

    /// This spec plus all nested children.
    int total_count() const;
};

struct AttackDataset {
    SeriesGrid grid;
    std::vector<std::uint8_t> mask;  // rows x cols, 1 = cell touched by an attack
    nlohmann::json provenance;

    bool masked(std::size_t row, std::size_t col) const {
        return mask[row * grid.cols() + col] != 0;
    }
};

AttackDataset apply_transform(const SeriesGrid& grid, const TransformSpec& spec,
                              const TargetSelector& targets, const AttackWindow& window,
                              SeverityTier tier, std::uint64_t seed);

struct ScenarioElement {
    TransformSpec spec;
    TargetSelector targets;
    AttackWindow window;
};

/// Transformers applied in list order, each reading the previous output;
/// masks are unioned and provenance records the order.
AttackDataset compose(const SeriesGrid& grid, const std::vector<ScenarioElement>& elements,
                      SeverityTier tier, std::uint64_t seed);

/// Ground-truth mask as CSV rows of (timestamp, sensor_id, flag).
std::string mask_to_csv(const AttackDataset& ds);

nlohmann::json transform_spec_to_json(const TransformSpec& spec);
TransformSpec transform_spec_from_json(const nlohmann::json& j);

}  // namespace sentinel

#endif
