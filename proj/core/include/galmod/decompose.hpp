#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "galmod/datum.hpp"

namespace galmod {

struct YGenerator {
  unsigned level = 0;  ///< generates a cyclic summand of dimension p^level
  Vec coords;

  bool operator==(const YGenerator&) const = default;
};

/// J = X (+) Y_n (+) ... (+) Y_0, with X absent in the Theorem 1 case.
struct Decomposition {
  std::optional<Level> m;          ///< nullopt: Theorem 1 case
  std::optional<Vec> x_generator;  ///< delta
  std::vector<YGenerator> y_generators;

  [[nodiscard]] bool theorem2() const noexcept { return m.has_value(); }
  bool operator==(const Decomposition&) const = default;
};

/// Builds the decomposition; throws InternalInconsistency when certification fails.
[[nodiscard]] Decomposition decompose(const GaloisDatum& d);

/// rank of Y_i for i = 0..n.
[[nodiscard]] std::vector<std::size_t> y_ranks(const Decomposition& dec, unsigned n);
/// Dimensions of all cyclic summands, descending.
[[nodiscard]] BlockMultiset summand_sizes(const Decomposition& dec, unsigned p);

[[nodiscard]] FpSubspace x_module(const Decomposition& dec, const GaloisDatum& d);
/// Y_level (or all of Y when level is nullopt).
[[nodiscard]] FpSubspace y_module(const Decomposition& dec, const GaloisDatum& d,
                                  std::optional<unsigned> level = std::nullopt);
/// Y^{H_i}.
[[nodiscard]] FpSubspace y_fixed_under(const Decomposition& dec, const GaloisDatum& d,
                                       unsigned i);

/// Right-hand side of clause (3) of the relevant theorem at level i.
[[nodiscard]] FpSubspace predicted_subfield_image(const Decomposition& dec, const GaloisDatum& d,
                                                  unsigned i);

struct ClauseResult {
  std::string id;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::vector<ClauseResult> clauses;
  std::vector<std::string> notes;

  [[nodiscard]] bool all_pass() const;
  [[nodiscard]] std::vector<std::string> failed_ids() const;
};

/// Re-checks every clause of Theorems 1/2 and Corollaries 1/2.
[[nodiscard]] Report verify(const Decomposition& dec, const GaloisDatum& d);

/// Corollary 3: the restriction table for K/K_j and, when data for the
/// subextensions K_j/F (j = 1..n-1) is supplied, i(K_j/F) = -inf.
[[nodiscard]] Report corollary3_check(const GaloisDatum& d,
                                      std::span<const GaloisDatum> subextensions = {});

/// i(K/F) as predicted by the restriction table.
[[nodiscard]] Level corollary3_expected(Level m, unsigned j);

}  // namespace galmod
