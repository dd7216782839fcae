#pragma once

#include <cstdint>
#include <span>

#include "galmod/datum.hpp"
#include "galmod/decompose.hpp"

namespace galmod {

/// Which norm-equation lemma, if any, covers gamma.
enum class NormEquationCase { none, odd_height_one, two_length_three, odd_lift, two_lift };

/// Hypotheses of the fixed-elements-are-norms lemmas, evaluated on the class data.
/// `m` is i(K/F) when the exceptional hypotheses hold.
[[nodiscard]] NormEquationCase norm_equation_case(const GaloisDatum& d,
                                                  std::span<const Scalar> gamma,
                                                  const std::optional<Level>& m);

/// Number of N^step applications needed to kill gamma (length under sigma^step - 1).
[[nodiscard]] std::size_t length_under(const GaloisDatum& d, std::span<const Scalar> gamma,
                                       std::uint64_t step);

/// U^{H_i} = N^{p^n - p^i}(U) for every i, for a free submodule U of m.
[[nodiscard]] bool submodule_subfield_holds(const GModule& m, const FpSubspace& free_part);

struct FreeSample {
  GModule module;
  FpSubspace free_part;
};

/// Free summand of random rank plus random shorter Jordan blocks, in a random
/// basis. The free rank is at least 1; other blocks are added while dim <= dim_cap.
[[nodiscard]] FreeSample random_free_sample(unsigned p, unsigned n, std::size_t dim_cap,
                                            std::uint64_t seed);

struct LemmaSuiteOptions {
  std::uint64_t seed = 0;
  std::size_t samples = 48;  ///< random gamma per datum for the norm-equation lemmas
};

/// Property checks on a valid datum:
///   L.exact               kernel and image of the exact sequence at each level
///   L.fixed-submodule     dim J^G / im eps_0 <= 1, = 1 exactly when xi_p is a norm
///   L.norm                norm classes of non-free elements lie on the Kummer line
///   L.proper-subfield     {z in J^{H_i} : norm_0 z = 0} = im eps_i for i < n
///   L.submodule-subfield  the identity on the free part of the decomposition
///   L.norm-equation       solve_norm_equation succeeds whenever a lemma applies
///   D.minimal-length      norm_0 vanishes on ker N^{p^m} and delta has length p^m + 1
[[nodiscard]] Report lemma_suite(const GaloisDatum& d, const LemmaSuiteOptions& options = {});

}  // namespace galmod
