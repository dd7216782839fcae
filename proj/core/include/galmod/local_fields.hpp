#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "galmod/datum.hpp"

namespace galmod {

enum class TowerKind { unramified, cyclotomic };

[[nodiscard]] std::string to_string(TowerKind kind);
/// Throws InvalidInput for unknown names.
[[nodiscard]] TowerKind tower_kind_from_string(const std::string& name);

/// Coefficients mod p^N in the ring's power basis (T for unramified, pi for cyclotomic).
using Coeffs = std::vector<std::uint64_t>;

/// pi^val * unit, with `digits` valid p-adic digits in the unit's coefficients.
struct LFElement {
  static constexpr std::int64_t kZeroVal = std::numeric_limits<std::int64_t>::max();

  std::int64_t val = kZeroVal;
  Coeffs unit;
  unsigned digits = 0;

  [[nodiscard]] bool is_zero() const noexcept { return val == kZeroVal; }
};

struct TowerSpec {
  unsigned p = 3;
  TowerKind kind = TowerKind::unramified;
  unsigned n = 1;
  std::size_t precision = 0;  ///< pi-adic digits of the top field
};

/// Smallest accepted precision: e * ceil(p/(p-1)) + e + 8 with e the top ramification.
[[nodiscard]] std::size_t minimum_precision(unsigned p, TowerKind kind, unsigned n);

/// Cyclic tower F = K_0 < K_1 < ... < K_n = K of p-adic fields.
/// UNRAMIFIED: K_i unramified of degree p^i over Q_p.
/// CYCLOTOMIC: K_i = Q_p(zeta_{p^{i+1}}), sigma(zeta) = zeta^{1+p}.
class LocalTower {
 public:
  explicit LocalTower(const TowerSpec& spec);

  [[nodiscard]] const TowerSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] unsigned prime() const noexcept { return spec_.p; }
  [[nodiscard]] unsigned height() const noexcept { return spec_.n; }
  [[nodiscard]] TowerKind kind() const noexcept { return spec_.kind; }
  /// [K : Q_p].
  [[nodiscard]] std::size_t degree() const noexcept { return degree_; }
  /// Ramification index of K over Q_p.
  [[nodiscard]] std::size_t ramification() const noexcept { return ram_; }
  /// p-adic digits N of the coefficient ring Z/p^N.
  [[nodiscard]] unsigned digits() const noexcept { return digits_; }
  /// Monic defining polynomial of K over Z_p (lifted g, or the Eisenstein polynomial).
  [[nodiscard]] const Coeffs& defining_polynomial() const noexcept { return modpoly_; }
  /// sigma applied to the ring generator.
  [[nodiscard]] const Coeffs& sigma_image() const noexcept { return sigma_gen_; }
  [[nodiscard]] bool xi_in_base() const noexcept { return spec_.kind == TowerKind::cyclotomic; }

  // Elements.
  [[nodiscard]] LFElement one() const;
  [[nodiscard]] LFElement from_int(std::int64_t z) const;
  /// Unit polynomial (the caller guarantees the constant residue is nonzero for unramified
  /// rings, or any polynomial, which is normalized).
  [[nodiscard]] LFElement from_coeffs(const Coeffs& c) const;
  /// Uniformizer of K (p for unramified, 1 - zeta for cyclotomic).
  [[nodiscard]] LFElement uniformizer() const;
  /// Uniformizer of K_i: N_{K/K_i}(uniformizer()).
  [[nodiscard]] const LFElement& level_uniformizer(unsigned level) const;
  /// zeta_{p^{n+1}}; cyclotomic only.
  [[nodiscard]] LFElement zeta() const;
  /// The ring generator T or pi as an element.
  [[nodiscard]] LFElement generator() const;

  // Arithmetic.
  [[nodiscard]] LFElement mul(const LFElement& x, const LFElement& y) const;
  [[nodiscard]] LFElement inv(const LFElement& x) const;
  [[nodiscard]] LFElement div(const LFElement& x, const LFElement& y) const;
  [[nodiscard]] LFElement pow(const LFElement& x, std::int64_t k) const;
  [[nodiscard]] LFElement add(const LFElement& x, const LFElement& y) const;
  [[nodiscard]] LFElement sub(const LFElement& x, const LFElement& y) const;
  [[nodiscard]] LFElement neg(const LFElement& x) const;
  /// v_K(x); kZeroVal for zero.
  [[nodiscard]] std::int64_t valuation(const LFElement& x) const;
  /// Relative precision of x in pi-digits of K.
  [[nodiscard]] std::int64_t relative_precision(const LFElement& x) const;
  /// x == y up to `slack` pi-digits below the joint relative precision.
  [[nodiscard]] bool equal(const LFElement& x, const LFElement& y, std::int64_t slack = 0) const;

  // Galois action.
  [[nodiscard]] LFElement galois(const LFElement& x, std::uint64_t k = 1) const;
  /// N_{K_from / K_to}(x) for x in K_from.
  [[nodiscard]] LFElement norm(const LFElement& x, unsigned from, unsigned to) const;
  /// sigma^{p^level} x == x to precision.
  [[nodiscard]] bool lies_in_level(const LFElement& x, unsigned level) const;

  // p-th power classes.
  [[nodiscard]] std::size_t class_dim(unsigned level) const;
  /// Basis of J(K_i): class_of maps representative k to the k-th unit vector.
  [[nodiscard]] const std::vector<LFElement>& class_representatives(unsigned level) const;
  /// Coordinates of [x] in J(K_i) for x in K_i^x.
  [[nodiscard]] Vec class_of(unsigned level, const LFElement& x) const;
  /// A p-th root in K, or nullopt if x is not a p-th power to precision.
  [[nodiscard]] std::optional<LFElement> pth_root(const LFElement& x) const;

  /// (a_{n-1}, ..., a_0); cyclotomic only.
  [[nodiscard]] std::vector<LFElement> kummer_generators() const;

 private:
  struct Impl;
  TowerSpec spec_;
  std::size_t degree_ = 0;
  std::size_t ram_ = 1;
  unsigned digits_ = 0;
  Coeffs modpoly_;
  Coeffs sigma_gen_;
  std::shared_ptr<const Impl> impl_;
};

[[nodiscard]] LocalTower make_tower(unsigned p, TowerKind kind, unsigned n, std::size_t precision);

/// Class-level datum of the tower.
[[nodiscard]] GaloisDatum build_datum(const LocalTower& tower);

/// Checks (root of N(alpha))^{sigma-1} = N(k) * N_{K_i/F}(gamma)^{p^{n-i-1}}.
/// Throws InvalidInput if alpha^{sigma-1} != gamma k^p or gamma is not in K_i.
[[nodiscard]] bool root_norm_crosscheck(const LocalTower& tower, const LFElement& alpha,
                                        const LFElement& gamma, const LFElement& k,
                                        unsigned level);

struct NormcondSample {
  LFElement alpha;
  LFElement gamma;
  LFElement k;
  unsigned level = 0;
};

/// alpha with [alpha]^{sigma-1} in [K_i^x], and the induced gamma in K_i and k.
[[nodiscard]] NormcondSample sample_normcond(const LocalTower& tower, const GaloisDatum& datum,
                                             unsigned level, std::uint64_t seed);

}  // namespace galmod
