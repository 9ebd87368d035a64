#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "removal/functions.hpp"
#include "removal/junta.hpp"

namespace removal {

// x ln x with phi(0) = 0. Throws DomainError for x < 0.
double phi(double x);

// H(f, I) = E_{x in V^I}[phi(E[f(x, .)])]. Always <= 0.
double entropy(const PointFunction& f, const CoordinateSet& coords);

struct PhiInequality {
  bool holds = false;
  double lhs = 0.0;     // lambda phi(u) + (1 - lambda) phi(v)
  double rhs = 0.0;     // phi(w) + w / 32
  double margin = 0.0;  // lhs - rhs
  double w = 0.0;
};

// Requires lambda in [1/4, 1], u, v > 0 and u <= w / 2; throws DomainError otherwise.
PhiInequality check_phi_inequality(double lambda, double u, double v);

struct WitnessEntry {
  PointIndex cell = 0;      // x in V^I
  CoordinateSet coords;     // J_x, original coordinates, disjoint from I
  std::vector<PointIndex> cells;  // T_x in V^{J_x}, ascending
};

struct RefinementWitness {
  CoordinateSet base;                // I
  std::vector<WitnessEntry> entries;  // S with its (J_x, T_x), ascending cell
};

inline constexpr double kWitnessTolerance = 1e-12;

struct EntryDiagnostics {
  PointIndex cell = 0;
  double pr_inside = 0.0;     // Pr[y in T_x]
  double outside_mean = 0.0;  // E_{y not in T_x}[E[f(x, y, .)]], normalized
  bool sparse_ok = false;     // pr_inside <= 3/4
  bool outside_ok = false;    // outside_mean <= alpha / 8
};

struct WitnessDiagnostics {
  bool accepted = false;
  std::string shape_error;  // non-empty when the witness is malformed
  double alpha = 0.0;
  double covered = 0.0;     // E_{x in V^I}[1_S(x) E[f(x, .)]]
  bool covered_ok = false;  // covered >= alpha / 2
  std::vector<EntryDiagnostics> entries;
  double worst_sparse_slack = 0.0;   // min over S of 3/4 - pr_inside
  double worst_outside_slack = 0.0;  // min over S of alpha/8 - outside_mean
};

// Checks the three refinement conditions. Never throws on a bad witness.
WitnessDiagnostics verify_witness(const PointFunction& f, std::size_t r, const RefinementWitness& w);

struct RefinementSearch {
  std::optional<RefinementWitness> witness;
  RefinementWitness candidate;      // S accumulated by the edge sweep
  WitnessDiagnostics diagnostics;   // of the candidate
  std::size_t edges_visited = 0;
  std::size_t captures_run = 0;
  std::size_t soft_failures = 0;    // one-sided captures with no sparse side
  std::size_t budget_failures = 0;  // captures that hit the |J| budget
};

// Sweeps edges (x1, x2) of V^I with x1 <= x2, loops included, in lexicographic order.
// Each edge with both ends outside S runs a one-sided capture of f(x1, .), f(x2, .) at eps/32
// with |J| budget r; the selected end joins S. Returns the witness if it verifies.
RefinementSearch find_refinement(const PointFunction& f, const CoordinateSet& coords, std::size_t r,
                                 double eps, const CaptureParams& params = {});

struct RefinementStep {
  std::size_t step = 0;
  CoordinateSet coords;     // I_t
  double entropy = 0.0;     // H(f, I_t)
  bool accepted = false;    // a witness was found at I_t
  double gain = 0.0;        // H(f, I_{t+1}) - H(f, I_t) when accepted
};

enum class RefinementStop { kNoWitness, kFullCoordinates, kMaxSteps };

const char* to_string(RefinementStop s);

struct RefinementTrace {
  double alpha = 0.0;
  std::size_t step_bound = 0;  // ceil(128 ln(1 / alpha))
  std::vector<RefinementStep> steps;
  std::size_t accepted_steps = 0;
  RefinementStop stop = RefinementStop::kNoWitness;
  CoordinateSet final_coords;
  double final_entropy = 0.0;
};

inline constexpr double kEntropyGainTolerance = 1e-9;

// ceil(128 ln(1 / alpha)); 0 for alpha in {0, 1}.
std::size_t refinement_step_bound(double alpha);

// Starting from I = {}, applies find_refinement until none verifies. Each accepted step must
// raise H by at least alpha / 128; a smaller gain throws InvariantViolation.
// max_steps = 0 selects step_bound + 2.
RefinementTrace refinement_loop(const PointFunction& f, std::size_t r, double eps,
                                std::size_t max_steps = 0, const CaptureParams& params = {});

// A nonnegative value that may exceed double range; beyond kAstronomical it is only a marker.
struct Magnitude {
  double value = 0.0;
  bool astronomical = false;
};

inline constexpr double kAstronomical = 1e300;

std::string to_string(const Magnitude& m);

// Gamma(l) = l + r |V|^l.
Magnitude gamma_step(const Magnitude& l, std::size_t r, std::size_t radix);

// 2^^t.
Magnitude tower(std::size_t t);

struct ParameterSchedule {
  double c = 0.0;
  double eps = 0.0;
  double alpha = 0.0;
  std::size_t r = 0;
  std::size_t radix = 0;
  double w_min = 0.0;
  double delta1 = 0.0;   // eps^c
  double j1 = 0.0;       // eps^-c
  double r1 = 0.0;       // eps^-c
  double r2 = 0.0;       // (eps/32)^-c
  std::size_t compositions = 0;  // ceil(128 ln(1 / alpha))
  std::vector<Magnitude> gamma_iterates;  // Gamma^t(0), t = 0..compositions (stops once astronomical)
  Magnitude k;
  std::optional<double> log10_delta2;  // log10(w_min^k (eps/32)^c); absent when k is astronomical
  double delta2 = 0.0;                  // may underflow to 0
};

ParameterSchedule schedule(double c, double eps, double alpha, std::size_t r, const BaseChain& base);

// w_min^k (eps/32)^c.
double delta2(double w_min, double k, double eps, double c);

}  // namespace removal
