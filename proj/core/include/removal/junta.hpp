#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "removal/functions.hpp"
#include "removal/independent.hpp"

namespace removal {

enum class CaptureMode { kPractical, kFaithful };

const char* to_string(CaptureMode m);

struct CaptureParams {
  double eta = 0.999;
  double gamma = 0.05;        // starting influence threshold
  std::size_t j_budget = 6;   // maximum |J|
  CaptureMode mode = CaptureMode::kPractical;
  double cross_target = -1.0;  // negative: use eps
  double gamma_floor = 1e-9;
};

// Output of a junta capture: J and cell subsets T1, T2 of V^J with diagnostics.
struct JuntaCapture {
  CoordinateSet coords;
  std::vector<PointIndex> t1;  // ascending cell indices of V^J
  std::vector<PointIndex> t2;
  double outside1 = 0.0;  // E_{a in V^J}[1_{a not in T1} E[f1(a, .)]]
  double outside2 = 0.0;
  double cross = 0.0;     // <1_T1, A 1_T2> on V^J
  double measure1 = 0.0;  // Pr[a in T1]
  double measure2 = 0.0;
  double eps = 0.0;
  double eta = 1.0;
  double gamma = 0.0;
  std::size_t gamma_halvings = 0;
  CaptureMode mode = CaptureMode::kPractical;
};

enum class CaptureStatus { kOk, kBudgetExceeded };

struct CaptureOutcome {
  CaptureStatus status = CaptureStatus::kOk;
  JuntaCapture capture;  // partial when the budget was exceeded
};

// One spectral capture at fixed (eta, gamma): g_i = N_eta f_i, J = coordinates with
// influence above gamma on g_1 or g_2, T_i = {a : E[g_i(a, .)] >= eps}. The outside mass
// of each T_i is at most eps; a violation throws InvariantViolation.
CaptureOutcome junta_capture_spectral(const PointFunction& f1, const PointFunction& f2, double eps,
                                      double eta, double gamma,
                                      std::size_t j_budget = static_cast<std::size_t>(-1));

// Practical mode: starts at params.gamma and halves it until the cross term reaches the
// target, the |J| budget would be exceeded, or gamma reaches the floor.
// Throws DomainError in faithful mode (see faithful_parameters()).
CaptureOutcome junta_capture(const PointFunction& f1, const PointFunction& f2, double eps,
                             const CaptureParams& params);

inline constexpr std::size_t kExhaustiveCellLimit = 9;
inline constexpr std::size_t kDefaultBruteforceBudget = 50'000'000;

// Exhaustive oracle: every J with |J| <= j_max; T_i ranges over all subsets of V^J when
// |V^J| <= kExhaustiveCellLimit, otherwise over the threshold sets of E[f_i(a, .)].
// Only captures with both outside masses <= eps compete; the winner minimizes
// (cross, outside1 + outside2), ties to the earlier J then the earlier T.
JuntaCapture junta_capture_bruteforce(const PointFunction& f1, const PointFunction& f2, double eps,
                                      std::size_t j_max,
                                      std::size_t budget = kDefaultBruteforceBudget);

struct OneSidedCapture {
  bool ok = false;
  int side = 0;  // 1 or 2 when ok
  CoordinateSet coords;
  std::vector<PointIndex> cells;
  double measure1 = 0.0;
  double measure2 = 0.0;
  CaptureOutcome outcome;
  std::string failure;  // empty when ok
};

// Picks a side whose T has measure at most 3/4 (side 1 when both qualify).
OneSidedCapture one_sided_capture(const PointFunction& f1, const PointFunction& f2, double eps,
                                  const CaptureParams& params);

struct IndependentCapture {
  CaptureStatus status = CaptureStatus::kOk;
  CoordinateSet coords;
  std::vector<PointIndex> unpruned;  // T' from the capture
  std::vector<PointIndex> cells;     // T, independent in V^J
  bool independent = false;
  double loss = 0.0;  // E[1_{a not in T} E[g(a, .)]], recomputed from g
  double pruned_mass = 0.0;  // mass of T' \ T
  JuntaCapture capture;
};

// Capture with f1 = f2 = g, then prune T' to its heaviest independent subset.
IndependentCapture independent_junta_capture(const PointFunction& g, double eps,
                                             const CaptureParams& params,
                                             std::size_t mwis_cap = kDefaultMwisCap);

struct NoisyGap {
  double gap = 0.0;        // |<f1, A f2> - <N f1, A N f2>|
  double bound = 0.0;      // sqrt(1 - eta)
  bool condition_ok = false;  // (1 - eta) log_lambda(1 - eta) <= sqrt(1 - eta)
  double lambda = 0.0;
};

// Requires 1 - lambda < eta <= 1; throws DomainError otherwise.
NoisyGap noisy_ip_gap(const PointFunction& f1, const PointFunction& f2, double eta);

// True when eta lies in (1 - lambda, 1] and the side condition holds.
bool noisy_gap_admissible(double eta, double lambda);

struct LabelMap {
  ProductSpace cells;  // V^j
  std::vector<std::vector<std::size_t>> labels;  // one sorted set per cell
  std::size_t ell = 0;
  double p_exponent = 4.0;  // > 2
};

struct LabelDensityReport {
  std::optional<std::size_t> best_label;
  double best_measure = 0.0;
  double threshold = 0.0;      // (eps / ell^2)^(2p / (p - 2))
  double pair_density = 0.0;   // edge measure of pairs with intersecting labels
  bool vacuous = true;         // pair_density < eps
  bool holds = true;
};

LabelDensityReport label_density_check(const LabelMap& map, double eps);

// Parameter trail of the appendix construction, reported but never run.
struct FaithfulParameters {
  double eps = 0.0;
  double c = 0.0;
  double lambda = 0.0;
  double tau = 0.0;            // eps^c
  double delta_moo = 0.0;      // eps^c
  double one_minus_eta = 0.0;  // largest power-of-two step meeting every constraint on eta
  double eta = 0.0;
  double ell = 0.0;            // 2 (1 - eta^2)^-2 / tau
  std::optional<double> p;
  std::optional<double> log10_gamma;   // needs p
  std::optional<double> log10_j_bound;  // 2 (1 - eta^2)^-2 / gamma
};

FaithfulParameters faithful_parameters(double eps, double c, double lambda,
                                       std::optional<double> p = std::nullopt);

}  // namespace removal
