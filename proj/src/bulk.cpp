#include "z2flow/bulk.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace z2flow {
namespace {

constexpr double kPi = std::numbers::pi;

double wrap_phase(double x) {
  double y = std::remainder(x, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

double circ_dist(double a, double b) { return std::abs(wrap_phase(a - b)); }

ComplexMatrix random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

// Midpoint of the widest circular gap between the given phases.
double widest_gap_midpoint(std::vector<double> phases) {
  if (phases.empty()) return 0.0;
  for (double& p : phases) p = wrap_phase(p);
  std::sort(phases.begin(), phases.end());
  double best = -1.0, mid = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double a = phases[i];
    const double b = i + 1 < phases.size() ? phases[i + 1] : phases.front() + 2.0 * kPi;
    if (b - a > best) {
      best = b - a;
      mid = wrap_phase(0.5 * (a + b));
    }
  }
  return mid;
}

// Permutation perm with next[perm[i]] continuing branch i, minimising the
// largest displacement (ties broken by the sum).
std::vector<int> match_branches(const std::vector<double>& prev, const std::vector<double>& next) {
  const int n = static_cast<int>(prev.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  if (n > 8) {
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
      int best = -1;
      for (int j = 0; j < n; ++j)
        if (!used[j] && (best < 0 || circ_dist(prev[i], next[j]) < circ_dist(prev[i], next[best])))
          best = j;
      used[best] = true;
      perm[i] = best;
    }
    return perm;
  }
  std::vector<int> best = perm;
  double best_max = std::numeric_limits<double>::infinity();
  double best_sum = best_max;
  do {
    double mx = 0.0, sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = circ_dist(prev[i], next[perm[i]]);
      mx = std::max(mx, d);
      sum += d;
    }
    if (mx < best_max - 1e-12 || (mx < best_max + 1e-12 && sum < best_sum)) {
      best_max = mx;
      best_sum = sum;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

BlochFrame band_frame(const TightBindingModel& model, double t, double s, BandSelection bands,
                      double gap_threshold) {
  const auto eig = hermitian_eig(bulk_hamiltonian(model, t, s));
  const double mu = model.fermi_level();
  std::vector<int> cols;
  for (int i = 0; i < eig.eigenvalues.size(); ++i) {
    const double e = eig.eigenvalues(i) - mu;
    if (std::abs(e) < gap_threshold) {
      std::ostringstream os;
      os << "eigenvalue " << eig.eigenvalues(i) << " within " << gap_threshold << " of the Fermi level at (t, s) = ("
         << t << ", " << s << ")";
      throw Error(ErrorKind::GapClosed, os.str());
    }
    if ((bands == BandSelection::Occupied) == (e < 0.0)) cols.push_back(i);
  }
  BlochFrame f{t, s, ComplexMatrix(eig.eigenvectors.rows(), static_cast<Eigen::Index>(cols.size()))};
  for (std::size_t c = 0; c < cols.size(); ++c) f.frame.col(c) = eig.eigenvectors.col(cols[c]);
  return f;
}

BlochFrame occupied_frame(const TightBindingModel& model, double t, double s, double gap_threshold) {
  return band_frame(model, t, s, BandSelection::Occupied, gap_threshold);
}

std::vector<double> wilson_phases(std::span<const ComplexMatrix> frames, double rank_drop_tol) {
  if (frames.size() < 2) throw Error(ErrorKind::InvalidArgument, "Wilson loop needs at least two frames");
  const Eigen::Index n = frames.front().cols();
  if (n == 0) return {};
  ComplexMatrix w = ComplexMatrix::Identity(n, n);
  for (std::size_t j = 0; j < frames.size(); ++j) {
    const ComplexMatrix& a = frames[j];
    const ComplexMatrix& b = frames[(j + 1) % frames.size()];
    if (a.cols() != n || b.cols() != n || a.rows() != b.rows())
      throw Error(ErrorKind::DimensionMismatch, "frames along the loop differ in shape");
    const ComplexMatrix overlap = b.adjoint() * a;
    Eigen::JacobiSVD<ComplexMatrix> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smin = svd.singularValues().minCoeff();
    if (smin < rank_drop_tol) {
      std::ostringstream os;
      os << "overlap singular value " << smin << " below " << rank_drop_tol << " at link " << j;
      throw Error(ErrorKind::RankDrop, os.str());
    }
    w = svd.matrixU() * svd.matrixV().adjoint() * w;
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> es(w);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "Wilson loop eigensolver failed");
  std::vector<double> phases;
  for (Eigen::Index i = 0; i < n; ++i) phases.push_back(wrap_phase(std::arg(es.eigenvalues()(i))));
  std::sort(phases.begin(), phases.end());
  return phases;
}

WannierSpectrum wilson_loop(const TightBindingModel& model, double t, int s_points, const WilsonOptions& opts) {
  if (s_points < 3) throw Error(ErrorKind::InvalidArgument, "s_points must be at least 3");
  std::optional<std::mt19937_64> rng;
  if (opts.regauge_seed) rng.emplace(*opts.regauge_seed);
  std::vector<ComplexMatrix> frames;
  frames.reserve(s_points);
  for (int j = 0; j < s_points; ++j) {
    const double s = -kPi + 2.0 * kPi * j / s_points;
    ComplexMatrix f = band_frame(model, t, s, opts.bands, opts.gap_threshold).frame;
    if (rng && f.cols() > 0) f = f * random_unitary(static_cast<int>(f.cols()), *rng);
    frames.push_back(std::move(f));
  }
  return {t, wilson_phases(frames, opts.rank_drop_tol)};
}

BulkIndexResult bulk_index(const TightBindingModel& model, const BulkOptions& opts) {
  if (opts.t_points < 2) throw Error(ErrorKind::InvalidArgument, "t_points must be at least 2");
  BulkIndexResult res;
  std::vector<WannierSpectrum> raw;
  for (int i = 0; i < opts.t_points; ++i) {
    const double t = kPi * i / (opts.t_points - 1);
    raw.push_back(wilson_loop(model, t, opts.s_points, opts.wilson));
  }
  const int n = static_cast<int>(raw.front().phases.size());
  res.n_bands = n;
  if (n == 0) {
    res.flow = std::move(raw);
    return res;
  }

  // Continuous lifts of each branch.
  std::vector<std::vector<double>> lifted(n, std::vector<double>(raw.size()));
  std::vector<double> current = raw.front().phases;
  for (int b = 0; b < n; ++b) lifted[b][0] = current[b];
  res.flow.push_back(raw.front());
  for (std::size_t i = 1; i < raw.size(); ++i) {
    const auto& next = raw[i].phases;
    const auto perm = match_branches(current, next);
    WannierSpectrum ordered{raw[i].t, std::vector<double>(n)};
    for (int b = 0; b < n; ++b) {
      const double step = wrap_phase(next[perm[b]] - current[b]);
      if (std::abs(step) > opts.max_step) {
        std::ostringstream os;
        os << "Wannier branch " << b << " jumps by " << step << " between t = " << raw[i - 1].t << " and "
           << raw[i].t << "; increase t_points";
        throw Error(ErrorKind::TrackingLost, os.str());
      }
      lifted[b][i] = lifted[b][i - 1] + step;
      ordered.phases[b] = next[perm[b]];
    }
    current = ordered.phases;
    res.flow.push_back(std::move(ordered));
  }

  const auto& start = raw.front().phases;
  const auto& end = raw.back().phases;
  double line = widest_gap_midpoint(start);
  const bool blocked = std::any_of(end.begin(), end.end(),
                                   [&](double p) { return circ_dist(p, line) < opts.line_clearance; });
  if (blocked) {
    std::vector<double> both = start;
    both.insert(both.end(), end.begin(), end.end());
    line = widest_gap_midpoint(both);
    res.line_replaced = true;
    for (double p : both)
      if (circ_dist(p, line) < opts.line_clearance)
        throw Error(ErrorKind::TrackingLost, "no reference line clears the Wannier centers at t = 0 and t = pi");
  }
  res.reference_line = line;

  int count = 0;
  for (int b = 0; b < n; ++b) {
    const double a = lifted[b].front() - line;
    const double z = lifted[b].back() - line;
    count += static_cast<int>(std::floor(z / (2.0 * kPi)) - std::floor(a / (2.0 * kPi)));
  }
  res.crossing_count = count;
  res.value = Z2(count);
  return res;
}

std::string wannier_flow_csv(const std::vector<WannierSpectrum>& flow) {
  std::ostringstream os;
  os << std::setprecision(17) << "t,phase_index,phase\n";
  for (const auto& w : flow)
    for (std::size_t i = 0; i < w.phases.size(); ++i) os << w.t << ',' << i << ',' << w.phases[i] << '\n';
  return os.str();
}

Z2 trim_oracle_bhz(double mass) {
  if (std::abs(mass) < 1e-12 || std::abs(std::abs(mass) - 2.0) < 1e-12)
    throw Error(ErrorKind::GapClosed, "BHZ gap closes at M in {0, -2, 2}");
  int sign = 1;
  for (double t : {0.0, kPi})
    for (double s : {0.0, kPi}) sign *= (mass + std::cos(t) + std::cos(s)) > 0.0 ? 1 : -1;
  return Z2(sign < 0 ? 1 : 0);
}

BecReport bec_verify(const TightBindingModel& model, const BecOptions& opts) {
  BecReport r;
  r.bulk = bulk_index(model, opts.bulk);
  r.edge = edge_index(model, opts.edge);
  r.equal = r.bulk.value == r.edge.value;
  return r;
}

}  // namespace z2flow
