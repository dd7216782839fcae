#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "galmod/datum.hpp"

namespace galmod {

struct SynthParams {
  unsigned p = 2;
  unsigned n = 1;
  std::optional<Level> m;  ///< nullopt: Theorem 1 case
  std::vector<std::size_t> e;  ///< e_0..e_n
  bool xi_in_F = false;
  std::optional<bool> minus_one_is_norm;
  std::optional<std::uint64_t> shuffle_seed;

  bool operator==(const SynthParams&) const = default;
};

/// What decompose must recover; written to the sidecar file.
struct SynthExpectation {
  std::optional<Level> m;
  std::vector<std::size_t> e;
  std::vector<std::size_t> y_ranks;
  BlockMultiset jordan_type;
  std::size_t dim = 0;

  bool operator==(const SynthExpectation&) const = default;
};

/// Throws InvalidInput naming the broken rule.
void check_params(const SynthParams& params);

[[nodiscard]] SynthExpectation expected_answer(const SynthParams& params);

[[nodiscard]] GaloisDatum synthesize(const SynthParams& params);

/// Seeded invertible matrix by rejection sampling.
[[nodiscard]] FpMatrix random_invertible(unsigned p, std::size_t dim, std::uint64_t seed);

/// Legal parameters with every e_i <= rank_cap and dim J <= dim_cap.
[[nodiscard]] SynthParams random_params(unsigned p, unsigned n, std::uint64_t seed,
                                        std::size_t dim_cap = 120, std::size_t rank_cap = 3);

/// Every legal parameter set with ranks <= rank_cap and dim J in [1, dim_cap],
/// without shuffle seeds.
[[nodiscard]] std::vector<SynthParams> enumerate_params(unsigned p, unsigned n,
                                                        std::size_t rank_cap,
                                                        std::size_t dim_cap);

}  // namespace galmod
