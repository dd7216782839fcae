#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "galmod/fp_linalg.hpp"
#include "galmod/gmod.hpp"

namespace galmod {

/// A value in {-inf} u {0, 1, 2, ...}, ordered with -inf below 0.
class Level {
 public:
  constexpr Level() = default;
  constexpr explicit Level(int value) : value_(value < 0 ? kNegInf : value) {}

  static constexpr Level neg_infinity() { return Level(); }

  [[nodiscard]] constexpr bool is_neg_infinity() const noexcept { return value_ == kNegInf; }
  /// Throws for -inf.
  [[nodiscard]] int value() const;
  /// -inf + 1 = 0, i + 1 = i + 1.
  [[nodiscard]] constexpr Level successor() const noexcept {
    return is_neg_infinity() ? Level(0) : Level(value_ + 1);
  }
  /// p^level with p^{-inf} = 0.
  [[nodiscard]] std::uint64_t p_power(unsigned p) const;
  [[nodiscard]] std::string to_string() const;

  constexpr auto operator<=>(const Level&) const = default;

 private:
  static constexpr int kNegInf = -1;
  int value_ = kNegInf;
};

/// Levels -inf, 0, 1, ..., top - 1.
[[nodiscard]] std::vector<Level> exceptional_range(unsigned top);

/// Data attached to one intermediate field K_i.
struct LevelData {
  GModule space;                           ///< J(K_i) with the action of G/H_i.
  FpMatrix eps;                            ///< J(K_i) -> J.
  FpMatrix norm;                           ///< J -> J(K_i).
  std::map<unsigned, FpMatrix> inter_norm; ///< j -> (J(K_i) -> J(K_j)), j < i.
  std::optional<Vec> a_class;              ///< Kummer class [a_i], present iff xi in F.

  bool operator==(const LevelData&) const = default;
};

/// Class-level model of a cyclic extension K/F of degree p^n.
struct GaloisDatum {
  unsigned p = 2;
  unsigned n = 1;
  GModule J;
  std::vector<LevelData> levels;  ///< indices 0..n
  bool xi_in_F = false;
  std::optional<bool> minus_one_is_norm;

  bool operator==(const GaloisDatum&) const = default;
};

struct Violation {
  std::string clause;
  std::string detail;
};

/// Checks the structural axioms; an empty list means valid.
[[nodiscard]] std::vector<Violation> validate(const GaloisDatum& d);

/// im eps_i inside J.
[[nodiscard]] FpSubspace subfield_image(const GaloisDatum& d, unsigned level);

/// V_i = N^{p^i - 1}(im eps_i) for i < n and V_n = im N^{p^n - 1}.
[[nodiscard]] FpSubspace norm_image(const GaloisDatum& d, unsigned level);

/// (e_0, ..., e_n). Throws InvalidInput("filtration not nested") if V_{i+1} is not in V_i.
[[nodiscard]] std::vector<std::size_t> e_ranks(const GaloisDatum& d);

struct ExceptionalReport {
  Level m;
  Vec delta;       ///< length-minimized exceptional element of J
  Vec norm_class;  ///< norm_0(delta) in J(F)
};

/// True when the Definition's hypotheses hold (xi in F; -1 a norm if p=2, n=1).
[[nodiscard]] bool exceptional_hypotheses_hold(const GaloisDatum& d);

/// Searches levels -inf, 0, ..., n-1 without checking hypotheses.
[[nodiscard]] std::optional<ExceptionalReport> find_exceptional(const GaloisDatum& d);

/// Throws HypothesisNotMet, or InternalInconsistency if no exceptional element exists
/// or the minimized length is not p^m + 1.
[[nodiscard]] ExceptionalReport exceptional_search(const GaloisDatum& d);

/// Is z exceptional at level m: norm_0(z) != 0 and N z in im eps_m (N z = 0 for -inf).
[[nodiscard]] bool is_exceptional(const GaloisDatum& d, Level m, std::span<const Scalar> z);

/// Least s in {-inf, 0, ..., n-1} with norm_{s+1} nonzero on J^{H_{s+1}}.
[[nodiscard]] Level i_via_theorem3(const GaloisDatum& d);

/// Whether -1 (more generally xi_p) is a norm from K, read off the class data:
/// the norm map J^G -> <[a]_F> is onto exactly in that case.
[[nodiscard]] bool xi_is_norm(const GaloisDatum& d);

/// Datum for K/K_j.
[[nodiscard]] GaloisDatum restrict_to(const GaloisDatum& d, unsigned j);

/// alpha with N^{p^n-1} alpha = N^{l(gamma)-1} gamma, or nullopt.
[[nodiscard]] std::optional<Vec> solve_norm_equation(const GaloisDatum& d,
                                                     std::span<const Scalar> gamma);

}  // namespace galmod
