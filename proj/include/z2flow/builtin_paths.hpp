#pragma once

// Bundled abstract paths. All tau-invariant ones use the standard
// anti-unitary (z1, z2) -> (conj z2, -conj z1), or direct sums of it.

#include <string>
#include <vector>

#include "z2flow/operator_path.hpp"

namespace z2flow {

struct BuiltinPathOptions {
  double half_width = 10.0;  // line paths live on [-half_width, half_width]
  int grid_points = 401;
};

/// diag(arctan t, -arctan t).
OperatorPath arctan_pair_path(const BuiltinPathOptions& opts = {});
/// diag(arctan(t - 1), -arctan(t + 1)).
OperatorPath shifted_arctan_pair_path(const BuiltinPathOptions& opts = {});
/// Constant diag(1, 1, -2, -2) on a line.
OperatorPath constant_line_path(const BuiltinPathOptions& opts = {});
/// Constant diag(1, 1, -2, -2) on the circle.
OperatorPath constant_circle_path(const BuiltinPathOptions& opts = {});
/// cos t * I + gamma * sin t * sigma_y on the circle.
OperatorPath cos_sin_circle_path(double gamma = 1.0, const BuiltinPathOptions& opts = {});
/// sin t * [[1, lambda], [lambda, -1]] on the circle.
OperatorPath sin_circle_path(double lambda = 0.5, const BuiltinPathOptions& opts = {});

std::vector<std::string> builtin_path_names();
/// Throws InvalidArgument for unknown names.
OperatorPath builtin_path(const std::string& name, const BuiltinPathOptions& opts = {});

}  // namespace z2flow
