#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace galmod {

struct AcceptanceOptions {
  std::size_t jobs = 0;  ///< worker threads; 0 picks the hardware concurrency
  std::size_t dim_cap = 120;
  std::size_t rank_cap = 2;
  std::size_t free_modules = 200;     ///< per (p, n) for the submodule-subfield property
  std::size_t normcond_samples = 20;  ///< per cyclotomic tower
  double roundtrip_budget_seconds = 60.0;
  double corollary3_budget_seconds = 300.0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs `task(0..count-1)` on `jobs` threads; results must be written by index.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task);

/// The full acceptance sweep, one result per criterion in order 1..8.
[[nodiscard]] std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// "PASS [1] name: detail (1.23 s)".
[[nodiscard]] std::string format_result(const CriterionResult& result);

}  // namespace galmod
