#pragma once

#include <stdexcept>
#include <string>

namespace pathsplit {

/// Invalid experiment or scheme configuration (bad parameters, incompatible
/// scheme/model pairing, missing statistics).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical step left the model's admissible domain; carries the step (and
/// for path-driven schemes, the segment) where it happened.
class StepError : public std::runtime_error {
public:
    StepError(const std::string& what, long step, long segment = -1)
        : std::runtime_error(what), step_(step), segment_(segment) {}
    long step() const { return step_; }
    long segment() const { return segment_; }
    StepError with_step(long step) const { return StepError(what(), step, segment_); }

private:
    long step_;
    long segment_;
};

/// Malformed input file; carries the offending row.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, long row) : std::runtime_error(what), row_(row) {}
    long row() const { return row_; }

private:
    long row_;
};

} // namespace pathsplit
