#pragma once

// Z2 invariant of the Bloch bundle over the torus from Wannier-center
// (Wilson loop) partner switching, the TRIM oracle for the BHZ fixture and
// the bulk-edge comparison.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "z2flow/lattice.hpp"

namespace z2flow {

enum class BandSelection { Occupied, Unoccupied };

struct BlochFrame {
  double t = 0.0;
  double s = 0.0;
  ComplexMatrix frame;  // k x n_bands, orthonormal columns
};

/// Orthonormal eigenbasis of the eigenspace of H(t, s) below mu (or above
/// mu for Unoccupied). Throws GapClosed if an eigenvalue is within
/// gap_threshold of mu.
BlochFrame band_frame(const TightBindingModel& model, double t, double s, BandSelection bands,
                      double gap_threshold = 1e-6);
BlochFrame occupied_frame(const TightBindingModel& model, double t, double s,
                          double gap_threshold = 1e-6);

struct WannierSpectrum {
  double t = 0.0;
  std::vector<double> phases;  // ascending, in (-pi, pi]
};

struct WilsonOptions {
  BandSelection bands = BandSelection::Occupied;
  double gap_threshold = 1e-6;
  double rank_drop_tol = 0.05;           // min singular value of an overlap
  std::optional<std::uint64_t> regauge_seed;  // random unitary per frame
};

/// Eigenphases of the product of unitarized overlaps F(s_{j+1})^dagger F(s_j)
/// around a closed loop of frames (the last frame connects to the first).
std::vector<double> wilson_phases(std::span<const ComplexMatrix> frames, double rank_drop_tol = 0.05);

/// Wilson loop over s in [-pi, pi) at fixed t with s_points frames.
WannierSpectrum wilson_loop(const TightBindingModel& model, double t, int s_points,
                            const WilsonOptions& opts = {});

struct BulkOptions {
  int t_points = 40;   // over [0, pi], endpoints included
  int s_points = 100;
  double max_step = 1.0;        // largest phase displacement accepted between neighbours
  double line_clearance = 1e-3; // re-place the reference line if an endpoint phase is closer
  WilsonOptions wilson;
};

struct BulkIndexResult {
  Z2 value;
  double reference_line = 0.0;
  bool line_replaced = false;
  int crossing_count = 0;  // signed crossings of the reference line
  int n_bands = 0;
  std::vector<WannierSpectrum> flow;  // phases in tracked branch order
};

/// Partner-switching parity of the Wannier centers over t in [0, pi].
BulkIndexResult bulk_index(const TightBindingModel& model, const BulkOptions& opts = {});

std::string wannier_flow_csv(const std::vector<WannierSpectrum>& flow);

/// 1 iff prod over (t, s) in {0, pi}^2 of sign(M + cos t + cos s) is -1.
/// Throws GapClosed when |M| is 0 or 2.
Z2 trim_oracle_bhz(double mass);

struct BecOptions {
  EdgeOptions edge;
  BulkOptions bulk;
};

struct BecReport {
  BulkIndexResult bulk;
  EdgeIndexResult edge;
  bool equal = false;
};

BecReport bec_verify(const TightBindingModel& model, const BecOptions& opts = {});

}  // namespace z2flow
