#ifndef SENTINEL_ERRORS_HPP
#define SENTINEL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sentinel {

/// Base class for all framework errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptySeriesError : Error {
    explicit EmptySeriesError(const std::string& msg) : Error(msg) {}
};
struct UnorderedInputError : Error {
    explicit UnorderedInputError(const std::string& msg) : Error(msg) {}
};
struct MissingSpecError : Error {
    explicit MissingSpecError(const std::string& msg) : Error(msg) {}
};
struct TooShortError : Error {
    explicit TooShortError(const std::string& msg) : Error(msg) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};
struct InvalidTierError : Error {
    explicit InvalidTierError(const std::string& msg) : Error(msg) {}
};
struct TargetError : Error {
    explicit TargetError(const std::string& msg) : Error(msg) {}
};
struct WindowError : Error {
    explicit WindowError(const std::string& msg) : Error(msg) {}
};
struct FrequencyError : Error {
    explicit FrequencyError(const std::string& msg) : Error(msg) {}
};
struct DiscreteOnlyError : Error {
    explicit DiscreteOnlyError(const std::string& msg) : Error(msg) {}
};
struct SchemaError : Error {
    explicit SchemaError(const std::string& msg) : Error(msg) {}
};
struct KindError : Error {
    explicit KindError(const std::string& msg) : Error(msg) {}
};
struct NumericalError : Error {
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};
struct TrainingDivergedError : Error {
    explicit TrainingDivergedError(const std::string& msg) : Error(msg) {}
};
struct NoPairsError : Error {
    explicit NoPairsError(const std::string& msg) : Error(msg) {}
};
struct DegenerateRegressionError : Error {
    explicit DegenerateRegressionError(const std::string& msg) : Error(msg) {}
};
struct EmptyScoresError : Error {
    explicit EmptyScoresError(const std::string& msg) : Error(msg) {}
};
struct TooFewError : Error {
    explicit TooFewError(const std::string& msg) : Error(msg) {}
};
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace sentinel

#endif
