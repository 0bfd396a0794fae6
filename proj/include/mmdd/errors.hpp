#pragma once

#include <stdexcept>

namespace mmdd {

// Bad flags, malformed config, invalid parameter combinations. Exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable or unusable input data (reject rate over threshold, span
// mismatch, degenerate samples). Exit code 3.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A pipeline stage failed for a reason not covered above. Exit code 4.
struct StageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The sensitivity curve has no usable knee (flat or collinear).
struct NoKneeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Clusters with spread share a centroid; the separation ratio is undefined.
struct DegenerateClusteringError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mmdd
