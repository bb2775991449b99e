#include "z2flow/builtin_paths.hpp"

#include <cmath>

namespace z2flow {
namespace {

ComplexMatrix diag2(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Domain symmetric_line(const BuiltinPathOptions& opts) {
  return Domain::line(-opts.half_width, opts.half_width);
}

ComplexMatrix constant_matrix() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m.diagonal() << 1.0, 1.0, -2.0, -2.0;
  return m;
}

AntiUnitary standard_pair() { return direct_sum(standard_anti_unitary(), standard_anti_unitary()); }

}  // namespace

OperatorPath arctan_pair_path(const BuiltinPathOptions& opts) {
  const Domain d = symmetric_line(opts);
  return OperatorPath(
      d, 2, [](double t) { return diag2(std::atan(t), -std::atan(t)); },
      uniform_grid(d, opts.grid_points), standard_anti_unitary());
}

OperatorPath shifted_arctan_pair_path(const BuiltinPathOptions& opts) {
  const Domain d = symmetric_line(opts);
  return OperatorPath(
      d, 2, [](double t) { return diag2(std::atan(t - 1.0), -std::atan(t + 1.0)); },
      uniform_grid(d, opts.grid_points), standard_anti_unitary());
}

OperatorPath constant_line_path(const BuiltinPathOptions& opts) {
  const Domain d = symmetric_line(opts);
  return OperatorPath(
      d, 4, [](double) { return constant_matrix(); }, uniform_grid(d, opts.grid_points),
      standard_pair());
}

OperatorPath constant_circle_path(const BuiltinPathOptions& opts) {
  const Domain d = Domain::circle();
  return OperatorPath(
      d, 4, [](double) { return constant_matrix(); }, uniform_grid(d, opts.grid_points),
      standard_pair());
}

OperatorPath cos_sin_circle_path(double gamma, const BuiltinPathOptions& opts) {
  const Domain d = Domain::circle();
  return OperatorPath(
      d, 2,
      [gamma](double t) {
        ComplexMatrix m = ComplexMatrix::Identity(2, 2) * std::cos(t);
        const Complex off(0.0, gamma * std::sin(t));
        m(0, 1) += -off;  // sigma_y = [[0, -i], [i, 0]]
        m(1, 0) += off;
        return m;
      },
      uniform_grid(d, opts.grid_points), standard_anti_unitary());
}

OperatorPath sin_circle_path(double lambda, const BuiltinPathOptions& opts) {
  const Domain d = Domain::circle();
  return OperatorPath(
      d, 2,
      [lambda](double t) {
        ComplexMatrix m(2, 2);
        m << 1.0, lambda, lambda, -1.0;
        return ComplexMatrix(m * std::sin(t));
      },
      uniform_grid(d, opts.grid_points), standard_anti_unitary());
}

std::vector<std::string> builtin_path_names() {
  return {"arctan-pair", "shifted-arctan-pair", "constant", "constant-circle", "cos-sin-circle",
          "sin-circle"};
}

OperatorPath builtin_path(const std::string& name, const BuiltinPathOptions& opts) {
  if (name == "arctan-pair") return arctan_pair_path(opts);
  if (name == "shifted-arctan-pair") return shifted_arctan_pair_path(opts);
  if (name == "constant") return constant_line_path(opts);
  if (name == "constant-circle") return constant_circle_path(opts);
  if (name == "cos-sin-circle") return cos_sin_circle_path(1.0, opts);
  if (name == "sin-circle") return sin_circle_path(0.5, opts);
  throw Error(ErrorKind::InvalidArgument, "unknown builtin path '" + name + "'");
}

}  // namespace z2flow
