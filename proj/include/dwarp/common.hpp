#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace dwarp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Array = Eigen::ArrayXd;

/// Thrown when a graph fails the spacelike condition (induced metric not
/// positive definite). Carries the worst offending node.
class SpacelikeViolation : public std::runtime_error {
public:
  SpacelikeViolation(std::string what, int node, double margin)
      : std::runtime_error(std::move(what)), worst_node(node), worst_margin(margin) {}
  int worst_node;
  double worst_margin;
};

/// Thrown by the slice-seeking flow when the time step violates the explicit
/// stability bound or the oscillation grows between steps.
class StabilityViolation : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown by operations that require a compact base manifold.
class NonCompactBase : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Configuration / preset resolution failure with a field-level message.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Maximum worker threads. Honors the DWARP_THREADS environment variable
/// (values < 1 are clamped to 1); defaults to the hardware concurrency.
int max_threads();
void set_max_threads(int n);

/// Runs fn(i) for i in [0, n). Work items write only to their own slots, so
/// results are independent of scheduling.
void parallel_for(int n, const std::function<void(int)>& fn);

/// SplitMix64 step; used to derive per-trial seeds from a master seed.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

/// FNV-1a hash of a string, hex-encoded. Stable across platforms; used to
/// stamp CSV outputs with the configuration they came from.
std::string fnv1a_hex(const std::string& text);

} // namespace dwarp
