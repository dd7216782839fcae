#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace galmod {

using Scalar = std::uint32_t;
using Vec = std::vector<Scalar>;

/// Largest modulus accepted; keeps dot-product accumulation inside 64 bits.
inline constexpr unsigned kMaxPrime = 65521;

[[nodiscard]] bool is_prime(unsigned p) noexcept;

/// Throws InvalidInput unless p is a prime not exceeding kMaxPrime.
void require_prime(unsigned p);

[[nodiscard]] Scalar reduce_mod(long long value, unsigned p) noexcept;
[[nodiscard]] Scalar inverse_mod(Scalar a, unsigned p);

[[nodiscard]] bool is_zero(std::span<const Scalar> v) noexcept;
[[nodiscard]] Vec add(std::span<const Scalar> a, std::span<const Scalar> b, unsigned p);
[[nodiscard]] Vec sub(std::span<const Scalar> a, std::span<const Scalar> b, unsigned p);
[[nodiscard]] Vec scale(std::span<const Scalar> a, Scalar c, unsigned p);
[[nodiscard]] Vec unit_vector(std::size_t dim, std::size_t index);

/// Dense matrix over F_p, row-major. Maps act on column vectors.
class FpMatrix {
 public:
  FpMatrix() = default;
  FpMatrix(unsigned p, std::size_t rows, std::size_t cols);

  static FpMatrix identity(unsigned p, std::size_t n);
  static FpMatrix from_rows(unsigned p, const std::vector<std::vector<long long>>& rows);
  static FpMatrix from_columns(unsigned p, std::size_t rows, std::span<const Vec> columns);

  [[nodiscard]] unsigned prime() const noexcept { return p_; }
  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

  [[nodiscard]] Scalar operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }
  void set(std::size_t r, std::size_t c, long long value) noexcept {
    data_[r * cols_ + c] = reduce_mod(value, p_);
  }

  [[nodiscard]] Vec row(std::size_t r) const;
  [[nodiscard]] Vec column(std::size_t c) const;
  [[nodiscard]] std::vector<Vec> columns() const;

  [[nodiscard]] Vec apply(std::span<const Scalar> x) const;
  [[nodiscard]] FpMatrix operator*(const FpMatrix& rhs) const;
  [[nodiscard]] FpMatrix operator+(const FpMatrix& rhs) const;
  [[nodiscard]] FpMatrix operator-(const FpMatrix& rhs) const;
  [[nodiscard]] FpMatrix pow(std::uint64_t exponent) const;
  [[nodiscard]] FpMatrix transpose() const;

  [[nodiscard]] std::size_t rank() const;
  [[nodiscard]] bool is_zero() const noexcept;
  [[nodiscard]] std::optional<FpMatrix> inverse() const;

  bool operator==(const FpMatrix&) const = default;

 private:
  unsigned p_ = 2;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

/// Subspace of F_p^ambient stored by its reduced row echelon basis.
///
/// Equal subspaces have identical bases, so equality is structural.
class FpSubspace {
 public:
  FpSubspace() = default;

  static FpSubspace zero(unsigned p, std::size_t ambient);
  static FpSubspace full(unsigned p, std::size_t ambient);
  static FpSubspace span(unsigned p, std::size_t ambient, std::span<const Vec> generators);

  [[nodiscard]] unsigned prime() const noexcept { return p_; }
  [[nodiscard]] std::size_t ambient_dim() const noexcept { return ambient_; }
  [[nodiscard]] std::size_t dim() const noexcept { return basis_.size(); }
  [[nodiscard]] const std::vector<Vec>& basis() const noexcept { return basis_; }
  [[nodiscard]] const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

  /// Remainder of v after eliminating the pivot coordinates.
  [[nodiscard]] Vec reduce(std::span<const Scalar> v) const;
  [[nodiscard]] bool contains(std::span<const Scalar> v) const;
  [[nodiscard]] bool contains(const FpSubspace& other) const;
  /// Coefficients of v in the canonical basis, if v lies in the subspace.
  [[nodiscard]] std::optional<Vec> coordinates(std::span<const Scalar> v) const;
  /// ambient x dim matrix whose columns are the basis vectors.
  [[nodiscard]] FpMatrix basis_matrix() const;

  /// Adds v; returns false when v was already contained.
  bool insert(std::span<const Scalar> v);

  bool operator==(const FpSubspace&) const = default;

 private:
  FpSubspace(unsigned p, std::size_t ambient) : p_(p), ambient_(ambient) {}

  unsigned p_ = 2;
  std::size_t ambient_ = 0;
  std::vector<Vec> basis_;
  std::vector<std::size_t> pivots_;
};

/// Some x with A x = b (free variables zero), or nullopt if inconsistent.
[[nodiscard]] std::optional<Vec> solve(const FpMatrix& a, std::span<const Scalar> b);

[[nodiscard]] FpSubspace kernel(const FpMatrix& a);
/// Column space of a.
[[nodiscard]] FpSubspace image(const FpMatrix& a);
/// a(W) for a subspace W of the domain.
[[nodiscard]] FpSubspace image(const FpMatrix& a, const FpSubspace& w);
/// Vectors orthogonal to every vector of W under the standard pairing.
[[nodiscard]] FpSubspace annihilator(const FpSubspace& w);

enum class SubspaceOp { sum, intersect, complement, quotient_basis };

[[nodiscard]] FpSubspace subspace_calc(SubspaceOp op, const FpSubspace& u, const FpSubspace& v);
[[nodiscard]] FpSubspace sum(const FpSubspace& u, const FpSubspace& v);
[[nodiscard]] FpSubspace intersect(const FpSubspace& u, const FpSubspace& v);
/// W with U = V (+) W, built greedily from U's canonical basis. Requires V in U.
[[nodiscard]] FpSubspace complement(const FpSubspace& u, const FpSubspace& v);
/// Coset representatives of U/V, as a list drawn from U's canonical basis.
[[nodiscard]] std::vector<Vec> quotient_representatives(const FpSubspace& u,
                                                       const FpSubspace& v);
[[nodiscard]] FpSubspace quotient_basis(const FpSubspace& u, const FpSubspace& v);

/// {x : A x in W}.
[[nodiscard]] FpSubspace preimage(const FpMatrix& a, const FpSubspace& w);

}  // namespace galmod
