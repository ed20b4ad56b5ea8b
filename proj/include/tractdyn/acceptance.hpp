#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tractdyn {

struct AcceptanceOptions {
  std::uint64_t seed = 0;
  double radius = 2.718281828459045;
  int T_jmin = 3;
  int T_jmax = 14;
  int k_budget = (1 << 14) - 1;
  int branch_budget = 15;
  long long tree_nodes = 20000000;
  int el_samples = 10000;         // per tract
  std::vector<int> only;          // empty: every criterion
  unsigned rerun_threads = 1;     // thread count of the determinism rerun
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;      // numerical verdict
  std::string detail;       // deterministic summary
  double seconds = 0.0;
  double budget_seconds = 0.0;  // 0: no runtime bound
};

/// Functions every shape and bound criterion runs on, as shorthand.
std::vector<std::string> acceptance_handles(double radius);

CriterionResult run_criterion(int id, const AcceptanceOptions& opts);

/// Criteria 1-12 (or opts.only), then 13: the report of the same set rerun
/// with rerun_threads workers must be byte-identical.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// One line per criterion. Without timings the text depends only on the
/// numerical results, and a criterion passes on its numerical verdict; with
/// timings it must also meet its runtime bound.
std::string format_report(const std::vector<CriterionResult>& results, bool with_timings);
bool all_passed(const std::vector<CriterionResult>& results, bool with_timings);

}  // namespace tractdyn
