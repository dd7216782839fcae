#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "galmod/fp_linalg.hpp"

namespace galmod {

/// p^k with overflow check.
[[nodiscard]] std::uint64_t ipow(std::uint64_t base, unsigned exponent);

/// Finite-dimensional F_p[G]-module, G = <sigma> cyclic of order p^n.
///
/// Caches the powers of N = sigma - 1 up to its nilpotency index.
class GModule {
 public:
  GModule() = default;
  /// Throws InvalidInput("not an order-p^n action") unless sigma^(p^n) = I.
  GModule(unsigned p, unsigned n, FpMatrix sigma);

  [[nodiscard]] unsigned prime() const noexcept { return p_; }
  [[nodiscard]] unsigned height() const noexcept { return n_; }
  [[nodiscard]] std::uint64_t group_order() const noexcept { return ipow(p_, n_); }
  [[nodiscard]] std::size_t dim() const noexcept { return sigma_.rows(); }
  [[nodiscard]] const FpMatrix& sigma() const noexcept { return sigma_; }
  /// N = sigma - 1.
  [[nodiscard]] const FpMatrix& nilpotent() const { return (*powers_)[1]; }
  /// Least L with N^L = 0.
  [[nodiscard]] std::size_t nilpotency_index() const noexcept { return powers_->size() - 1; }
  /// N^k.
  [[nodiscard]] const FpMatrix& nilpotent_power(std::uint64_t k) const;
  [[nodiscard]] Vec apply_nilpotent(std::span<const Scalar> v, std::uint64_t k = 1) const;

  bool operator==(const GModule& other) const {
    return p_ == other.p_ && n_ == other.n_ && sigma_ == other.sigma_;
  }

 private:
  unsigned p_ = 2;
  unsigned n_ = 0;
  FpMatrix sigma_;
  // powers_[k] = N^k for k = 0..L, where powers_[L] = 0.
  std::shared_ptr<const std::vector<FpMatrix>> powers_;
};

/// Sorted (descending) list of Jordan block sizes.
using BlockMultiset = std::vector<std::size_t>;

[[nodiscard]] GModule make_module(unsigned p, unsigned n, const FpMatrix& sigma);

/// Least k with N^k u = 0.
[[nodiscard]] std::size_t length(const GModule& m, std::span<const Scalar> u);

/// T_k = ker N^k for k = 1.. until T_k = M.
[[nodiscard]] std::vector<FpSubspace> socle_series(const GModule& m);

/// M^{H_i} = ker N^{p^i}.
[[nodiscard]] FpSubspace fixed_points(const GModule& m, unsigned level);

[[nodiscard]] BlockMultiset jordan_type(const GModule& m);
/// Block sizes of the action restricted to a submodule.
[[nodiscard]] BlockMultiset jordan_type(const GModule& m, const FpSubspace& submodule);
/// Block sizes from the rank sequence r_0 = dim, r_k = rank N^k, ending in 0.
[[nodiscard]] BlockMultiset blocks_from_ranks(std::span<const std::size_t> ranks);

/// Span of u, N u, N^2 u, ...
[[nodiscard]] FpSubspace cyclic_submodule(const GModule& m, std::span<const Scalar> u);

[[nodiscard]] bool is_submodule(const GModule& m, const FpSubspace& u);

/// True iff the fixed parts of the given submodules are independent, which
/// makes the submodules themselves independent. Throws InvalidInput for a
/// non-invariant part and InternalInconsistency if the dimension cross-check
/// disagrees.
[[nodiscard]] bool independent_sum_check(const GModule& m, std::span<const FpSubspace> parts);

/// Free complement of V inside U, both free over F_p[G/H_i] of one block size.
[[nodiscard]] FpSubspace free_complement(const GModule& m, const FpSubspace& u,
                                         const FpSubspace& v);

/// Block-diagonal module with unit upper-triangular Jordan blocks.
[[nodiscard]] GModule jordan_module(unsigned p, unsigned n, const BlockMultiset& blocks);

}  // namespace galmod
