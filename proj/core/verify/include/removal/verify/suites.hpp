#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace removal::verify {

// Deterministic text body of one property suite. Timing is kept out of `lines`.
struct SuiteReport {
  std::string id;
  std::string title;
  bool pass = false;
  std::vector<std::string> lines;
  std::vector<std::string> failures;

  std::string body() const;
};

// "key: value" lines with round-trip precision for doubles.
std::string format_double(double v);

using SuiteFn = std::function<SuiteReport(std::uint64_t seed)>;

struct SuiteEntry {
  std::string id;
  SuiteFn run;
};

SuiteReport suite_quadform_oracle(std::uint64_t seed);
SuiteReport suite_planted_edge(std::uint64_t seed);
SuiteReport suite_matching_like(std::uint64_t seed);
SuiteReport suite_entropy_engine(std::uint64_t seed);
SuiteReport suite_phi_inequality(std::uint64_t seed);
SuiteReport suite_appendix(std::uint64_t seed);
SuiteReport suite_independent_capture(std::uint64_t seed);
SuiteReport suite_kneser(std::uint64_t seed);
SuiteReport suite_kneser_pipeline(std::uint64_t seed);

// The suites above in order, with stable ids.
const std::vector<SuiteEntry>& all_suites();

}  // namespace removal::verify
