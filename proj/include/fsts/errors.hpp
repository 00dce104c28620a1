#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fsts {

/// Base class for every error raised by this library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

/// Input violates the CSV contract (header row, monotone timestamps,
/// numeric cells, at least one data column).
class malformed_input : public error {
public:
    using error::error;
};

/// Row spacing is not an integer multiple of the modal step, or series
/// with different steps were mixed.
class irregular_sampling : public error {
public:
    using error::error;
};

/// A masked run is longer than the configured maximum, or touches a
/// series endpoint so it cannot be interpolated.
class gap_too_large : public error {
public:
    gap_too_large(std::string_view series_id, std::size_t run_start, std::size_t run_length)
        : error("gap too large in series '" + std::string(series_id) + "': " +
                std::to_string(run_length) + " consecutive missing samples starting at index " +
                std::to_string(run_start)),
          series_id(series_id),
          run_start(run_start),
          run_length(run_length) {}

    std::string series_id;
    std::size_t run_start;
    std::size_t run_length;
};

/// Series time ranges do not intersect (or their grids are not phase-aligned).
class no_overlap : public error {
public:
    using error::error;
};

class series_too_short : public error {
public:
    using error::error;
};

/// Sample is unusable for density estimation (fewer than two points or
/// zero variance).
class degenerate_sample : public error {
public:
    using error::error;
};

/// The plug-in bandwidth recursion produced a non-positive or non-finite
/// functional estimate.
class bandwidth_failure : public error {
public:
    using error::error;
};

class quadrature_failure : public error {
public:
    using error::error;
};

/// Estimated entropy-power x Fisher-information product fell below 1 by
/// more than the quadrature slack; indicates a grid or integration bug.
class isoperimetric_violation : public error {
public:
    using error::error;
};

class length_mismatch : public error {
public:
    using error::error;
};

/// Exactly one of the two complexity estimates is zero, making the
/// correction factor undefined (strict mode only).
class degenerate_complexity : public error {
public:
    using error::error;
};

class invalid_k : public error {
public:
    using error::error;
};

class config_error : public error {
public:
    using error::error;
};

} // namespace fsts
