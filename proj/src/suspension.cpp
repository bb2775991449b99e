#include "z2flow/suspension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <lapacke.h>

namespace z2flow {
namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

// Singular values only, by LAPACK divide and conquer.
RealVector singular_values(ComplexMatrix a) {
  const lapack_int m = static_cast<lapack_int>(a.rows()), n = static_cast<lapack_int>(a.cols());
  RealVector sv(std::min(m, n));
  if (sv.size() == 0) return sv;
  const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n,
                                         reinterpret_cast<lapack_complex_double*>(a.data()), m, sv.data(),
                                         nullptr, 1, nullptr, 1);
  if (info != 0) throw Error(ErrorKind::ConvergenceFailure, "zgesdd failed with info " + std::to_string(info));
  return sv;
}

}  // namespace

SuspensionMatrix build_periodic(const OperatorPath& path, int n_modes, const SuspensionOptions& opts) {
  if (!path.domain().is_circle())
    throw Error(ErrorKind::InvalidArgument, "build_periodic needs a circle path");
  if (n_modes < 1) throw Error(ErrorKind::InvalidArgument, "n_modes must be positive");

  const Eigen::Index d = path.dim();
  const int modes = 2 * n_modes + 1;
  const int samples = 2 * modes;

  std::vector<ComplexMatrix> values(samples);
  for (int j = 0; j < samples; ++j) values[j] = path.matrix_at(-kPi + 2.0 * kPi * j / samples);

  // coeff[k + max_k] = (1/L) sum_j A(t_j) e^{-i k t_j}, |k| <= max_k = modes - 1 = 2 n_modes.
  const int max_k = modes - 1;
  std::vector<ComplexMatrix> coeff(2 * max_k + 1, ComplexMatrix::Zero(d, d));
  double total = 0.0, tail = 0.0;
  for (int k = -max_k; k <= max_k; ++k) {
    ComplexMatrix& c = coeff[k + max_k];
    for (int j = 0; j < samples; ++j) {
      const double t = -kPi + 2.0 * kPi * j / samples;
      c += values[j] * std::exp(-kI * (k * t));
    }
    c /= static_cast<double>(samples);
    const double e = c.squaredNorm();
    total += e;
    if (std::abs(k) > n_modes) tail += e;
  }

  SuspensionMatrix out;
  out.boundary = BoundaryKind::Periodic;
  out.n_modes = n_modes;
  out.t_min = -kPi;
  out.t_max = kPi;
  out.block_dim = d;
  out.aliasing_ratio = total > 0.0 ? std::sqrt(tail / total) : 0.0;
  if (out.aliasing_ratio > opts.alias_tol) {
    std::ostringstream os;
    os << "Fourier tail/total norm " << out.aliasing_ratio << " above " << opts.alias_tol
       << " at n_modes = " << n_modes;
    throw Error(ErrorKind::AliasingDetected, os.str());
  }

  out.matrix = ComplexMatrix::Zero(modes * d, modes * d);
  for (int a = 0; a < modes; ++a) {
    const int ma = a - n_modes;
    for (int b = 0; b < modes; ++b) {
      const int mb = b - n_modes;
      out.matrix.block(a * d, b * d, d, d) = coeff[ma - mb + max_k];
    }
    out.matrix.block(a * d, a * d, d, d).diagonal().array() += kI * static_cast<double>(ma);
  }

  if (path.tau()) {
    // (tau xi)(t) = alpha xi(-t) acts on Fourier coefficients as c_m -> u conj(c_m).
    out.induced_tau = block_lift(*path.tau(), modes);
    const ComplexMatrix& u = out.induced_tau->unitary();
    out.symmetry_residual = max_abs(u * out.matrix.conjugate() * u.adjoint() - out.matrix.adjoint());
  }
  return out;
}

SuspensionMatrix build_aps(const OperatorPath& path, int n_grid, const SuspensionOptions& opts) {
  (void)opts;
  if (path.domain().is_circle())
    throw Error(ErrorKind::InvalidArgument, "build_aps needs a line path (use as_line())");
  if (n_grid < 2) throw Error(ErrorKind::InvalidArgument, "n_grid must be at least 2");

  const Eigen::Index d = path.dim();
  const double t0 = path.domain().t_min, t1 = path.domain().t_max;
  const double h = (t1 - t0) / (n_grid - 1);
  auto grid_t = [&](double j) { return t0 + h * j; };

  const EigDecomposition left = hermitian_eig(path.at(t0));
  const EigDecomposition right = hermitian_eig(path.at(t1));
  const double endpoint_tol = path.tolerances().endpoint_tol;
  if (left.eigenvalues.cwiseAbs().minCoeff() <= endpoint_tol ||
      right.eigenvalues.cwiseAbs().minCoeff() <= endpoint_tol)
    throw Error(ErrorKind::SingularEndpoint, "APS projectors need invertible endpoints");

  std::vector<Eigen::Index> left_rows, right_rows;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (left.eigenvalues(i) > 0.0) left_rows.push_back(i);
    if (right.eigenvalues(i) < 0.0) right_rows.push_back(i);
  }
  const Eigen::Index n_rows = (n_grid - 1) * d + left_rows.size() + right_rows.size();
  const Eigen::Index n_cols = n_grid * d;

  SuspensionMatrix out;
  out.boundary = BoundaryKind::APS;
  out.n_grid = n_grid;
  out.t_min = t0;
  out.t_max = t1;
  out.block_dim = d;
  out.matrix = ComplexMatrix::Zero(n_rows, n_cols);

  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  for (int j = 0; j + 1 < n_grid; ++j) {
    const ComplexMatrix a_mid = path.matrix_at(grid_t(j + 0.5));
    out.matrix.block(j * d, j * d, d, d) = -id / h + 0.5 * a_mid;
    out.matrix.block(j * d, (j + 1) * d, d, d) = id / h + 0.5 * a_mid;
  }
  Eigen::Index row = (n_grid - 1) * d;
  for (Eigen::Index i : left_rows)
    out.matrix.block(row++, 0, 1, d) = left.eigenvectors.col(i).adjoint();
  for (Eigen::Index i : right_rows)
    out.matrix.block(row++, (n_grid - 1) * d, 1, d) = right.eigenvectors.col(i).adjoint();

  if (path.tau()) {
    // The lift xi_j -> u conj(xi_{n-1-j}) reflects the grid; odd symmetry of
    // the discretization follows from tau-invariance at every sample used.
    out.induced_tau = block_lift(*path.tau(), n_grid);
    double worst = 0.0;
    for (int j = 0; j < 2 * n_grid - 1; ++j) {
      const double t = grid_t(0.5 * j);
      worst = std::max(worst, max_abs(path.matrix_at(t) - conjugate_by(*path.tau(), path.matrix_at(-t))));
    }
    out.symmetry_residual = worst;
  }
  return out;
}

IndexReport index_of(const SuspensionMatrix& s, double sigma_tol, double gap_factor,
                     double symmetry_tol) {
  if (!(sigma_tol > 0.0) || !(gap_factor >= 1.0))
    throw Error(ErrorKind::InvalidArgument, "index_of needs sigma_tol > 0 and gap_factor >= 1");
  const RealVector sv = singular_values(s.matrix);  // descending
  const Eigen::Index p = sv.size();

  IndexReport rep;
  rep.threshold = sigma_tol * (p > 0 ? sv(0) : 0.0);
  rep.smallest_singular_value = p > 0 ? sv(p - 1) : 0.0;
  Eigen::Index small = 0;
  for (Eigen::Index i = 0; i < p; ++i)
    if (sv(i) < rep.threshold) ++small;
  const Eigen::Index rank = p - small;

  if (small > 0) {
    const double rejected = std::max(sv(rank), std::numeric_limits<double>::min());
    rep.singular_value_gap = rank > 0 ? sv(rank - 1) / rejected : std::numeric_limits<double>::infinity();
  } else {
    rep.singular_value_gap = p > 0 ? sv(p - 1) / rep.threshold : std::numeric_limits<double>::infinity();
  }
  if (rep.singular_value_gap < gap_factor) {
    std::ostringstream os;
    os << "singular-value gap ratio " << rep.singular_value_gap << " below " << gap_factor;
    throw Error(ErrorKind::NoSpectralGap, os.str());
  }

  rep.kernel_dim = static_cast<int>(s.matrix.cols() - rank);
  rep.cokernel_dim = static_cast<int>(s.matrix.rows() - rank);
  rep.z_index = rep.kernel_dim - rep.cokernel_dim;
  if (s.induced_tau && s.symmetry_residual <= symmetry_tol) rep.tau_index = Z2(rep.kernel_dim);
  return rep;
}

RobbinSalamonReport robbin_salamon_z2_check(const OperatorPath& path, const RobbinSalamonOptions& opts) {
  if (!path.tau()) throw Error(ErrorKind::NotTauInvariant, "path carries no anti-unitary symmetry");
  const bool circle = path.domain().is_circle();

  RobbinSalamonReport rep;
  rep.boundary = circle ? BoundaryKind::Periodic : BoundaryKind::APS;
  const HalfFlowResult flow =
      circle ? half_flow_circle(path, EpsPolicy::ShiftIfSingular, opts.flow) : half_flow_line(path, opts.flow);
  rep.sf_tau = flow.value;
  rep.eps_applied = flow.eps_applied;
  rep.eps = flow.eps;
  rep.crossings = flow.crossings;

  std::vector<int> schedule = opts.schedule;
  if (schedule.empty()) schedule = circle ? std::vector<int>{16, 32, 64} : std::vector<int>{200, 400, 800};

  int previous = -1;  // last gapped tau-index, -1 when none
  std::string last_refusal;
  for (int res : schedule) {
    ResolutionStep step;
    step.resolution = res;
    try {
      const SuspensionMatrix s =
          circle ? build_periodic(path, res, opts.suspension) : build_aps(path, res, opts.suspension);
      step.report = index_of(s, opts.sigma_tol, opts.gap_factor, opts.suspension.symmetry_tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoSpectralGap && e.kind() != ErrorKind::AliasingDetected) throw;
      step.refusal = e.what();
      last_refusal = e.what();
      previous = -1;
      rep.steps.push_back(step);
      continue;
    }
    const auto current = step.report->tau_index;
    rep.steps.push_back(step);
    if (!current) continue;
    rep.ind_tau = current;
    if (previous == current->value()) {
      rep.stabilized = true;
      break;
    }
    previous = current->value();
  }
  if (!rep.steps.back().report) throw Error(ErrorKind::NoSpectralGap, last_refusal);
  rep.equal = rep.ind_tau && *rep.ind_tau == rep.sf_tau;
  return rep;
}

}  // namespace z2flow
