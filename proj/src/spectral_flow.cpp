#include "z2flow/spectral_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace z2flow {
namespace {

constexpr double kPi = std::numbers::pi;

int negative_count(const RealVector& ev) {
  int n = 0;
  for (double x : ev) n += x < 0.0 ? 1 : 0;
  return n;
}

double min_abs(const RealVector& ev) { return ev.cwiseAbs().minCoeff(); }

struct Candidate {
  double t;
  double width;
  bool from_count_change;
};

class Scanner {
 public:
  Scanner(const OperatorPath& path, const FlowOptions& opts)
      : path_(path), opts_(opts), bisect_tol_(opts.resolved_bisect_tol(path.domain())) {}

  RealVector eigenvalues(double t) const { return hermitian_eigenvalues(path_.at(t)); }

  void bisect(double a, double b, int na, int nb, std::vector<Candidate>& out) const {
    if (b - a <= bisect_tol_) {
      out.push_back({0.5 * (a + b), b - a, true});
      return;
    }
    const double m = 0.5 * (a + b);
    const int nm = negative_count(eigenvalues(m));
    if (nm != na) bisect(a, m, na, nm, out);
    if (nm != nb) bisect(m, b, nm, nb, out);
  }

  // Golden-section minimization of min |lambda| on [a, b].
  std::pair<double, double> minimize(double a, double b) const {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = min_abs(eigenvalues(c)), fd = min_abs(eigenvalues(d));
    while (b - a > bisect_tol_) {
      if (fc <= fd) {
        b = d; d = c; fd = fc;
        c = b - g * (b - a);
        fc = min_abs(eigenvalues(c));
      } else {
        a = c; c = d; fc = fd;
        d = a + g * (b - a);
        fd = min_abs(eigenvalues(d));
      }
    }
    return {0.5 * (a + b), b - a};
  }

  // Finds the crossings in [a, b], then rescans the pieces between them:
  // opposite-direction crossings that cancel in the count can hide behind
  // one another inside a single grid cell.
  void explore(double a, double b, int na, int nb, int depth, std::vector<Candidate>& out) const {
    constexpr int kMaxDepth = 3;
    const double delta = 4.0 * bisect_tol_;
    std::vector<Candidate> found;
    if (na != nb) {
      bisect(a, b, na, nb, found);
    } else {
      const auto [t, width] = minimize(a, b);
      // Below the top level a minimum at the boundary is the crossing just excised.
      if (depth > 0 && (t - a < 2.0 * delta || b - t < 2.0 * delta)) return;
      if (min_abs(eigenvalues(t)) < opts_.kernel_tol) found.push_back({t, width, false});
    }
    out.insert(out.end(), found.begin(), found.end());
    if (depth >= kMaxDepth || found.empty()) return;

    std::sort(found.begin(), found.end(), [](const Candidate& x, const Candidate& y) { return x.t < y.t; });
    double lo = a;
    int nlo = na;
    for (std::size_t i = 0; i <= found.size(); ++i) {
      const bool last = i == found.size();
      const double hi = last ? b : found[i].t - delta;
      if (hi - lo > 2.0 * delta) {
        const int nhi = last ? nb : negative_count(eigenvalues(hi));
        explore(lo, hi, nlo, nhi, depth + 1, out);
      }
      if (!last) {
        lo = found[i].t + delta;
        nlo = negative_count(eigenvalues(lo));
      }
    }
  }

  double bisect_tol() const { return bisect_tol_; }

 private:
  const OperatorPath& path_;
  const FlowOptions& opts_;
  double bisect_tol_;
};

// Distance on the parameter domain (mod 2 pi for circles).
double domain_distance(const Domain& d, double a, double b) {
  double x = std::abs(a - b);
  if (d.is_circle()) x = std::min(x, 2.0 * kPi - x);
  return x;
}

CrossingRecord make_record(const OperatorPath& path, double t, double width, bool symmetric,
                           const FlowOptions& opts) {
  const EigDecomposition eig = hermitian_eig(path.at(t));
  CrossingRecord rec;
  rec.t = t;
  rec.refinement_width = width;
  rec.symmetric_point = symmetric;
  rec.kernel_rank = kernel_rank(eig.eigenvalues, opts.kernel_tol, opts.gap_factor);
  rec.kernel_basis = ComplexMatrix(path.dim(), rec.kernel_rank);
  int col = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
    if (std::abs(eig.eigenvalues(i)) < opts.kernel_tol) rec.kernel_basis.col(col++) = eig.eigenvectors.col(i);
  return rec;
}

double wrap_into(const Domain& d, double t) {
  if (!d.is_circle()) return t;
  while (t < -kPi) t += 2.0 * kPi;
  while (t > kPi) t -= 2.0 * kPi;
  return t;
}

// Ambient-space crossing operator P(t) dA/dt P(t).
ComplexMatrix ambient_crossing_operator(const OperatorPath& path, const CrossingRecord& rec,
                                        double h) {
  const auto& d = path.domain();
  const ComplexMatrix deriv =
      (path.matrix_at(wrap_into(d, rec.t + h)) - path.matrix_at(wrap_into(d, rec.t - h))) / (2.0 * h);
  const ComplexMatrix& v = rec.kernel_basis;
  return v * (v.adjoint() * deriv * v) * v.adjoint();
}

int signature_of(const RealVector& ev) {
  int s = 0;
  for (double x : ev) s += x > 0.0 ? 1 : (x < 0.0 ? -1 : 0);
  return s;
}

}  // namespace

std::vector<CrossingRecord> find_crossings(const OperatorPath& path, const FlowOptions& opts) {
  const Domain& domain = path.domain();
  const auto& grid = path.sample_grid();
  const Scanner scan(path, opts);
  const auto n = grid.size();

  std::vector<RealVector> ev(n);
  std::vector<int> neg(n);
  std::vector<double> mins(n);
  for (std::size_t j = 0; j < n; ++j) {
    ev[j] = scan.eigenvalues(grid[j]);
    neg[j] = negative_count(ev[j]);
    mins[j] = min_abs(ev[j]);
  }

  std::vector<Candidate> candidates;
  for (std::size_t j = 0; j + 1 < n; ++j)
    if (neg[j] != neg[j + 1]) scan.explore(grid[j], grid[j + 1], neg[j], neg[j + 1], 0, candidates);

  // Crossings that cancel in the count: look around grid points where some
  // |lambda_i| has a local minimum small enough, given how fast lambda_i
  // moves, for a zero to lie in one of the adjacent cells.
  for (std::size_t j = 1; j + 1 < n; ++j) {
    bool flagged = false;
    for (Eigen::Index i = 0; i < ev[j].size() && !flagged; ++i) {
      const double here = std::abs(ev[j](i));
      const double left = std::abs(ev[j - 1](i)), right = std::abs(ev[j + 1](i));
      const double speed = std::max(std::abs(ev[j + 1](i) - ev[j](i)), std::abs(ev[j](i) - ev[j - 1](i)));
      flagged = here <= left && here <= right && here <= 2.0 * speed;
    }
    if (flagged) scan.explore(grid[j - 1], grid[j + 1], neg[j - 1], neg[j + 1], 0, candidates);
  }
  // Grid samples sitting exactly on a crossing.
  for (std::size_t j = 0; j < n; ++j)
    if (mins[j] < opts.kernel_tol) candidates.push_back({grid[j], 0.0, false});

  std::vector<double> symmetric_points;
  if (path.tau()) {
    symmetric_points.push_back(0.0);
    if (domain.is_circle()) symmetric_points.push_back(-kPi);
  }

  const double radius = 10.0 * scan.bisect_tol();
  std::vector<CrossingRecord> records;
  for (double ts : symmetric_points) {
    CrossingRecord rec = make_record(path, ts, 0.0, true, opts);
    if (rec.kernel_rank > 0) records.push_back(std::move(rec));
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.t < b.t; });
  for (const Candidate& c : candidates) {
    bool merged = false;
    for (double ts : symmetric_points)
      if (domain_distance(domain, c.t, ts) <= radius) merged = true;
    for (const auto& r : records)
      if (domain_distance(domain, c.t, r.t) <= radius) merged = true;
    if (merged) continue;

    double t = c.t;
    if (domain.is_circle() && domain_distance(domain, t, -kPi) <= radius) t = -kPi;
    CrossingRecord rec = make_record(path, t, c.width, false, opts);
    if (rec.kernel_rank == 0) {
      if (!c.from_count_change) continue;
      std::ostringstream os;
      os << "negative-eigenvalue count changes near t = " << t
         << " but no kernel was found after refinement";
      throw Error(ErrorKind::GridTooCoarse, os.str());
    }
    records.push_back(std::move(rec));
  }
  std::sort(records.begin(), records.end(),
            [](const CrossingRecord& a, const CrossingRecord& b) { return a.t < b.t; });
  return records;
}

HermitianOp crossing_operator(const OperatorPath& path, const CrossingRecord& rec, double fd_step) {
  if (!(fd_step > 0.0)) throw Error(ErrorKind::InvalidArgument, "fd_step must be positive");
  if (rec.kernel_basis.cols() != rec.kernel_rank || rec.kernel_basis.rows() != path.dim())
    throw Error(ErrorKind::DimensionMismatch, "crossing record kernel basis is inconsistent");
  const auto& d = path.domain();
  const ComplexMatrix deriv =
      (path.matrix_at(wrap_into(d, rec.t + fd_step)) - path.matrix_at(wrap_into(d, rec.t - fd_step))) /
      (2.0 * fd_step);
  const ComplexMatrix& v = rec.kernel_basis;
  // Central differences leave O(h^2) asymmetry; tolerate it before symmetrizing.
  return HermitianOp(v.adjoint() * deriv * v, 1e-6);
}

int crossing_signature(const OperatorPath& path, const CrossingRecord& rec, const FlowOptions& opts) {
  const HermitianOp gamma = crossing_operator(path, rec, opts.resolved_fd_step(path.domain()));
  const RealVector ev = hermitian_eigenvalues(gamma);
  for (double x : ev) {
    if (std::abs(x) < opts.regularity_tol) {
      std::ostringstream os;
      os << "crossing at t = " << rec.t << " has crossing-operator eigenvalue " << x;
      throw Error(ErrorKind::DegenerateCrossing, os.str());
    }
  }
  return signature_of(ev);
}

void annotate_signatures(const OperatorPath& path, std::vector<CrossingRecord>& records,
                         const FlowOptions& opts) {
  for (auto& r : records) r.crossing_signature = crossing_signature(path, r, opts);
}

int sf_z(const OperatorPath& path, const FlowOptions& opts) {
  auto records = find_crossings(path, opts);
  annotate_signatures(path, records, opts);
  int total = 0;
  for (const auto& r : records) total += *r.crossing_signature;
  return total;
}

int half_rank(int rank, double t) {
  if (rank % 2 != 0) {
    std::ostringstream os;
    os << "kernel rank " << rank << " at symmetric point t = " << t << " is odd";
    throw Error(ErrorKind::OddKernelAtSymmetricPoint, os.str());
  }
  return rank / 2;
}

Z2 half_flow_sum(const std::vector<CountedCrossing>& crossings, const Domain& domain,
                 double symmetric_radius) {
  long long total = 0;
  for (const auto& c : crossings) {
    if (std::abs(c.t) <= symmetric_radius) {
      total += half_rank(c.rank, 0.0);
    } else if (domain.is_circle() && domain_distance(domain, c.t, -kPi) <= symmetric_radius) {
      total += half_rank(c.rank, -kPi);
    } else if (c.t < 0.0) {
      total += c.rank;
    }
  }
  return Z2(total);
}

namespace {

HalfFlowResult half_flow_impl(const OperatorPath& path, const FlowOptions& opts) {
  HalfFlowResult out;
  out.crossings = find_crossings(path, opts);
  std::vector<CountedCrossing> counted;
  for (const auto& r : out.crossings) counted.push_back({r.t, r.kernel_rank});
  out.value = half_flow_sum(counted, path.domain(), 10.0 * opts.resolved_bisect_tol(path.domain()));
  return out;
}

}  // namespace

HalfFlowResult half_flow_line(const OperatorPath& path, const FlowOptions& opts) {
  if (path.domain().is_circle())
    throw Error(ErrorKind::InvalidArgument, "half_flow_line needs a line domain");
  if (!path.tau()) throw Error(ErrorKind::NotTauInvariant, "path carries no anti-unitary symmetry");
  return half_flow_impl(path, opts);
}

Z2 sf_tau_line(const OperatorPath& path, const FlowOptions& opts) {
  return half_flow_line(path, opts).value;
}

double circle_eps_shift(const OperatorPath& path, const FlowOptions& opts) {
  const RealVector ev = hermitian_eigenvalues(path.at(kPi));
  if (kernel_rank(ev, opts.kernel_tol, opts.gap_factor) == 0) return 0.0;
  double smallest = -1.0;
  for (double x : ev) {
    const double a = std::abs(x);
    if (a >= opts.kernel_tol && (smallest < 0.0 || a < smallest)) smallest = a;
  }
  return smallest < 0.0 ? 0.5 : 0.5 * smallest;
}

HalfFlowResult half_flow_circle(const OperatorPath& path, EpsPolicy policy, const FlowOptions& opts) {
  if (!path.domain().is_circle())
    throw Error(ErrorKind::InvalidArgument, "half_flow_circle needs a circle domain");
  if (!path.tau()) throw Error(ErrorKind::NotTauInvariant, "path carries no anti-unitary symmetry");
  if (policy == EpsPolicy::ShiftIfSingular) {
    const double eps = circle_eps_shift(path, opts);
    if (eps > 0.0) {
      const OperatorPath shifted = path.shifted(eps);
      if (kernel_rank(shifted.at(kPi), opts.kernel_tol, opts.gap_factor) != 0)
        throw Error(ErrorKind::AmbiguousKernel, "eps-shifted A(pi) is still singular");
      HalfFlowResult out = half_flow_impl(shifted, opts);
      out.eps_applied = true;
      out.eps = eps;
      return out;
    }
  }
  return half_flow_impl(path, opts);
}

Z2 sf_tau_circle(const OperatorPath& path, EpsPolicy policy, const FlowOptions& opts) {
  return half_flow_circle(path, policy, opts).value;
}

GammaSymmetryReport gamma_symmetry_report(const OperatorPath& path, const FlowOptions& opts,
                                          double tol) {
  if (!path.tau()) throw Error(ErrorKind::NotTauInvariant, "path carries no anti-unitary symmetry");
  GammaSymmetryReport report;
  report.tol = tol;
  const auto& d = path.domain();
  const double h = opts.resolved_fd_step(d);
  const double radius = 10.0 * opts.resolved_bisect_tol(d);
  const auto records = find_crossings(path, opts);

  auto mirror_of = [&](const CrossingRecord& r) -> const CrossingRecord* {
    const CrossingRecord* best = nullptr;
    double best_dist = 0.0;
    for (const auto& other : records) {
      const double dist = domain_distance(d, other.t, -r.t);
      if (!best || dist < best_dist) {
        best = &other;
        best_dist = dist;
      }
    }
    // Bisection locates each partner independently to within its width.
    const double allowed = radius + 2.0 * r.refinement_width + 1e-12;
    return best && best_dist <= allowed ? best : nullptr;
  };

  for (const auto& r : records) {
    if (r.t > radius && !(d.is_circle() && domain_distance(d, r.t, -kPi) <= radius)) continue;
    GammaPair pair;
    pair.t = r.t;
    pair.self_mirrored = r.symmetric_point;
    pair.signature_here = crossing_signature(path, r, opts);
    const CrossingRecord* m = pair.self_mirrored ? &r : mirror_of(r);
    if (!m || m->kernel_rank != r.kernel_rank) {
      pair.ok = false;
      pair.residual = std::numeric_limits<double>::infinity();
      report.pass = false;
      report.pairs.push_back(pair);
      continue;
    }
    pair.signature_mirror = crossing_signature(path, *m, opts);
    const ComplexMatrix g_here = ambient_crossing_operator(path, r, h);
    const ComplexMatrix g_mirror = ambient_crossing_operator(path, *m, h);
    pair.residual = max_abs(g_here + conjugate_by(*path.tau(), g_mirror));
    const bool signatures_ok = pair.self_mirrored ? pair.signature_here == 0
                                                  : pair.signature_here == -pair.signature_mirror;
    pair.ok = pair.residual <= tol && signatures_ok;
    report.pass = report.pass && pair.ok;
    report.pairs.push_back(pair);
  }
  return report;
}

}  // namespace z2flow
