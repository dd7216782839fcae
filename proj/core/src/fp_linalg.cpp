#include "galmod/fp_linalg.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "galmod/errors.hpp"

namespace galmod {

namespace {

void require_same_prime(unsigned a, unsigned b) {
  if (a != b) {
    throw DimensionMismatch("modulus mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

void require_same_ambient(const FpSubspace& u, const FpSubspace& v) {
  require_same_prime(u.prime(), v.prime());
  if (u.ambient_dim() != v.ambient_dim()) {
    throw DimensionMismatch("ambient mismatch: " + std::to_string(u.ambient_dim()) + " vs " +
                            std::to_string(v.ambient_dim()));
  }
}

// In-place reduced row echelon form; returns pivot columns.
std::vector<std::size_t> rref_in_place(std::vector<Vec>& rows, std::size_t ncols, unsigned p) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
    std::size_t sel = r;
    while (sel < rows.size() && rows[sel][c] == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[r], rows[sel]);
    const Scalar inv = inverse_mod(rows[r][c], p);
    for (auto& x : rows[r]) x = static_cast<Scalar>((std::uint64_t{x} * inv) % p);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k == r || rows[k][c] == 0) continue;
      const std::uint64_t f = p - rows[k][c];
      for (std::size_t j = c; j < ncols; ++j) {
        if (rows[r][j] != 0) {
          rows[k][j] = static_cast<Scalar>((rows[k][j] + f * rows[r][j]) % p);
        }
      }
    }
    pivots.push_back(c);
    ++r;
  }
  rows.resize(r);
  return pivots;
}

}  // namespace

bool is_prime(unsigned p) noexcept {
  if (p < 2) return false;
  for (unsigned d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

void require_prime(unsigned p) {
  if (!is_prime(p) || p > kMaxPrime) {
    throw InvalidInput("modulus " + std::to_string(p) + " is not a supported prime");
  }
}

Scalar reduce_mod(long long value, unsigned p) noexcept {
  long long r = value % static_cast<long long>(p);
  if (r < 0) r += p;
  return static_cast<Scalar>(r);
}

Scalar inverse_mod(Scalar a, unsigned p) {
  if (a % p == 0) throw InvalidInput("inverse of zero in F_p");
  long long t = 0, new_t = 1, r = p, new_r = a % p;
  while (new_r != 0) {
    const long long q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  return reduce_mod(t, p);
}

bool is_zero(std::span<const Scalar> v) noexcept {
  return std::all_of(v.begin(), v.end(), [](Scalar x) { return x == 0; });
}

Vec add(std::span<const Scalar> a, std::span<const Scalar> b, unsigned p) {
  if (a.size() != b.size()) throw DimensionMismatch("vector length mismatch");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] + b[i]) % p;
  return out;
}

Vec sub(std::span<const Scalar> a, std::span<const Scalar> b, unsigned p) {
  if (a.size() != b.size()) throw DimensionMismatch("vector length mismatch");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] + p - b[i]) % p;
  return out;
}

Vec scale(std::span<const Scalar> a, Scalar c, unsigned p) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = static_cast<Scalar>((std::uint64_t{a[i]} * c) % p);
  }
  return out;
}

Vec unit_vector(std::size_t dim, std::size_t index) {
  Vec v(dim, 0);
  v.at(index) = 1;
  return v;
}

// FpMatrix

FpMatrix::FpMatrix(unsigned p, std::size_t rows, std::size_t cols)
    : p_(p), rows_(rows), cols_(cols), data_(rows * cols, 0) {
  require_prime(p);
}

FpMatrix FpMatrix::identity(unsigned p, std::size_t n) {
  FpMatrix m(p, n, n);
  for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1;
  return m;
}

FpMatrix FpMatrix::from_rows(unsigned p, const std::vector<std::vector<long long>>& rows) {
  const std::size_t ncols = rows.empty() ? 0 : rows.front().size();
  FpMatrix m(p, rows.size(), ncols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != ncols) throw DimensionMismatch("ragged matrix rows");
    for (std::size_t c = 0; c < ncols; ++c) m.set(r, c, rows[r][c]);
  }
  return m;
}

FpMatrix FpMatrix::from_columns(unsigned p, std::size_t rows, std::span<const Vec> columns) {
  FpMatrix m(p, rows, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != rows) throw DimensionMismatch("column length mismatch");
    for (std::size_t r = 0; r < rows; ++r) m.data_[r * m.cols_ + c] = columns[c][r] % p;
  }
  return m;
}

Vec FpMatrix::row(std::size_t r) const {
  return Vec(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
             data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

Vec FpMatrix::column(std::size_t c) const {
  Vec v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = data_[r * cols_ + c];
  return v;
}

std::vector<Vec> FpMatrix::columns() const {
  std::vector<Vec> out;
  out.reserve(cols_);
  for (std::size_t c = 0; c < cols_; ++c) out.push_back(column(c));
  return out;
}

Vec FpMatrix::apply(std::span<const Scalar> x) const {
  if (x.size() != cols_) {
    throw DimensionMismatch("apply: vector length " + std::to_string(x.size()) +
                            " vs matrix columns " + std::to_string(cols_));
  }
  Vec out(rows_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::uint64_t acc = 0;
    const Scalar* row = data_.data() + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c) acc += std::uint64_t{row[c]} * x[c];
    out[r] = static_cast<Scalar>(acc % p_);
  }
  return out;
}

FpMatrix FpMatrix::operator*(const FpMatrix& rhs) const {
  require_same_prime(p_, rhs.p_);
  if (cols_ != rhs.rows_) {
    throw DimensionMismatch("product of " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                            " and " + std::to_string(rhs.rows_) + "x" +
                            std::to_string(rhs.cols_));
  }
  FpMatrix out(p_, rows_, rhs.cols_);
  std::vector<std::uint64_t> acc(rhs.cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t k = 0; k < cols_; ++k) {
      const std::uint64_t a = data_[r * cols_ + k];
      if (a == 0) continue;
      const Scalar* brow = rhs.data_.data() + k * rhs.cols_;
      for (std::size_t c = 0; c < rhs.cols_; ++c) acc[c] += a * brow[c];
    }
    for (std::size_t c = 0; c < rhs.cols_; ++c) {
      out.data_[r * rhs.cols_ + c] = static_cast<Scalar>(acc[c] % p_);
    }
  }
  return out;
}

FpMatrix FpMatrix::operator+(const FpMatrix& rhs) const {
  require_same_prime(p_, rhs.p_);
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionMismatch("sum of unequal shapes");
  FpMatrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = (data_[i] + rhs.data_[i]) % p_;
  return out;
}

FpMatrix FpMatrix::operator-(const FpMatrix& rhs) const {
  require_same_prime(p_, rhs.p_);
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
    throw DimensionMismatch("difference of unequal shapes");
  }
  FpMatrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    out.data_[i] = (data_[i] + p_ - rhs.data_[i]) % p_;
  }
  return out;
}

FpMatrix FpMatrix::pow(std::uint64_t exponent) const {
  if (!is_square()) throw DimensionMismatch("power of a non-square matrix");
  FpMatrix result = identity(p_, rows_);
  FpMatrix base = *this;
  while (exponent > 0) {
    if (exponent & 1U) result = result * base;
    exponent >>= 1U;
    if (exponent > 0) base = base * base;
  }
  return result;
}

FpMatrix FpMatrix::transpose() const {
  FpMatrix out(p_, cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out.data_[c * rows_ + r] = data_[r * cols_ + c];
  }
  return out;
}

std::size_t FpMatrix::rank() const {
  std::vector<Vec> rows;
  rows.reserve(rows_);
  for (std::size_t r = 0; r < rows_; ++r) rows.push_back(row(r));
  return rref_in_place(rows, cols_, p_).size();
}

bool FpMatrix::is_zero() const noexcept { return galmod::is_zero(data_); }

std::optional<FpMatrix> FpMatrix::inverse() const {
  if (!is_square()) throw DimensionMismatch("inverse of a non-square matrix");
  const std::size_t n = rows_;
  std::vector<Vec> rows;
  rows.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    Vec v = row(r);
    v.resize(2 * n, 0);
    v[n + r] = 1;
    rows.push_back(std::move(v));
  }
  const auto pivots = rref_in_place(rows, 2 * n, p_);
  if (pivots.size() < n || pivots.back() >= n) return std::nullopt;
  FpMatrix out(p_, n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) out.data_[r * n + c] = rows[r][n + c];
  }
  return out;
}

// FpSubspace

FpSubspace FpSubspace::zero(unsigned p, std::size_t ambient) {
  require_prime(p);
  return FpSubspace(p, ambient);
}

FpSubspace FpSubspace::full(unsigned p, std::size_t ambient) {
  FpSubspace s = zero(p, ambient);
  for (std::size_t i = 0; i < ambient; ++i) {
    s.basis_.push_back(unit_vector(ambient, i));
    s.pivots_.push_back(i);
  }
  return s;
}

FpSubspace FpSubspace::span(unsigned p, std::size_t ambient, std::span<const Vec> generators) {
  FpSubspace s = zero(p, ambient);
  for (const auto& g : generators) s.insert(g);
  return s;
}

Vec FpSubspace::reduce(std::span<const Scalar> v) const {
  if (v.size() != ambient_) {
    throw DimensionMismatch("vector of length " + std::to_string(v.size()) +
                            " in ambient of dimension " + std::to_string(ambient_));
  }
  Vec out(v.begin(), v.end());
  for (auto& x : out) x %= p_;
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    const Scalar c = out[pivots_[k]];
    if (c == 0) continue;
    const std::uint64_t f = p_ - c;
    const Vec& b = basis_[k];
    for (std::size_t j = pivots_[k]; j < ambient_; ++j) {
      if (b[j] != 0) out[j] = static_cast<Scalar>((out[j] + f * b[j]) % p_);
    }
  }
  return out;
}

bool FpSubspace::contains(std::span<const Scalar> v) const { return galmod::is_zero(reduce(v)); }

bool FpSubspace::contains(const FpSubspace& other) const {
  require_same_ambient(*this, other);
  return std::all_of(other.basis_.begin(), other.basis_.end(),
                     [this](const Vec& b) { return contains(b); });
}

std::optional<Vec> FpSubspace::coordinates(std::span<const Scalar> v) const {
  if (!contains(v)) return std::nullopt;
  Vec coords(basis_.size());
  for (std::size_t k = 0; k < basis_.size(); ++k) coords[k] = v[pivots_[k]] % p_;
  return coords;
}

FpMatrix FpSubspace::basis_matrix() const {
  return FpMatrix::from_columns(p_, ambient_, basis_);
}

bool FpSubspace::insert(std::span<const Scalar> v) {
  Vec r = reduce(v);
  std::size_t piv = 0;
  while (piv < ambient_ && r[piv] == 0) ++piv;
  if (piv == ambient_) return false;
  const Scalar inv = inverse_mod(r[piv], p_);
  for (auto& x : r) x = static_cast<Scalar>((std::uint64_t{x} * inv) % p_);
  for (auto& b : basis_) {
    const Scalar c = b[piv];
    if (c == 0) continue;
    const std::uint64_t f = p_ - c;
    for (std::size_t j = piv; j < ambient_; ++j) {
      if (r[j] != 0) b[j] = static_cast<Scalar>((b[j] + f * r[j]) % p_);
    }
  }
  const auto pos = std::lower_bound(pivots_.begin(), pivots_.end(), piv) - pivots_.begin();
  pivots_.insert(pivots_.begin() + pos, piv);
  basis_.insert(basis_.begin() + pos, std::move(r));
  return true;
}

// Free functions

std::optional<Vec> solve(const FpMatrix& a, std::span<const Scalar> b) {
  if (b.size() != a.rows()) {
    throw DimensionMismatch("solve: right-hand side length " + std::to_string(b.size()) +
                            " vs " + std::to_string(a.rows()) + " rows");
  }
  const unsigned p = a.prime();
  const std::size_t n = a.cols();
  std::vector<Vec> rows;
  rows.reserve(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    Vec v = a.row(r);
    v.push_back(b[r] % p);
    rows.push_back(std::move(v));
  }
  const auto pivots = rref_in_place(rows, n + 1, p);
  if (!pivots.empty() && pivots.back() == n) return std::nullopt;
  Vec x(n, 0);
  for (std::size_t k = 0; k < pivots.size(); ++k) x[pivots[k]] = rows[k][n];
  return x;
}

FpSubspace kernel(const FpMatrix& a) {
  const unsigned p = a.prime();
  const std::size_t n = a.cols();
  std::vector<Vec> rows;
  rows.reserve(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) rows.push_back(a.row(r));
  const auto pivots = rref_in_place(rows, n, p);
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<Vec> gens;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    Vec x(n, 0);
    x[f] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) x[pivots[k]] = (p - rows[k][f]) % p;
    gens.push_back(std::move(x));
  }
  return FpSubspace::span(p, n, gens);
}

FpSubspace image(const FpMatrix& a) { return FpSubspace::span(a.prime(), a.rows(), a.columns()); }

FpSubspace image(const FpMatrix& a, const FpSubspace& w) {
  require_same_prime(a.prime(), w.prime());
  if (w.ambient_dim() != a.cols()) throw DimensionMismatch("image: subspace not in domain");
  FpSubspace out = FpSubspace::zero(a.prime(), a.rows());
  for (const auto& b : w.basis()) out.insert(a.apply(b));
  return out;
}

FpSubspace annihilator(const FpSubspace& w) {
  FpMatrix m(w.prime(), w.dim(), w.ambient_dim());
  for (std::size_t r = 0; r < w.dim(); ++r) {
    for (std::size_t c = 0; c < w.ambient_dim(); ++c) m.set(r, c, w.basis()[r][c]);
  }
  return kernel(m);
}

FpSubspace sum(const FpSubspace& u, const FpSubspace& v) {
  require_same_ambient(u, v);
  FpSubspace out = u;
  for (const auto& b : v.basis()) out.insert(b);
  return out;
}

FpSubspace intersect(const FpSubspace& u, const FpSubspace& v) {
  require_same_ambient(u, v);
  return annihilator(sum(annihilator(u), annihilator(v)));
}

std::vector<Vec> quotient_representatives(const FpSubspace& u, const FpSubspace& v) {
  require_same_ambient(u, v);
  if (!u.contains(v)) throw InvalidInput("complement requested with V not contained in U");
  FpSubspace covered = v;
  std::vector<Vec> reps;
  for (const auto& b : u.basis()) {
    if (covered.insert(b)) reps.push_back(b);
  }
  return reps;
}

FpSubspace complement(const FpSubspace& u, const FpSubspace& v) {
  return FpSubspace::span(u.prime(), u.ambient_dim(), quotient_representatives(u, v));
}

FpSubspace quotient_basis(const FpSubspace& u, const FpSubspace& v) { return complement(u, v); }

FpSubspace subspace_calc(SubspaceOp op, const FpSubspace& u, const FpSubspace& v) {
  switch (op) {
    case SubspaceOp::sum:
      return sum(u, v);
    case SubspaceOp::intersect:
      return intersect(u, v);
    case SubspaceOp::complement:
      return complement(u, v);
    case SubspaceOp::quotient_basis:
      return quotient_basis(u, v);
  }
  throw InvalidInput("unknown subspace operation");
}

FpSubspace preimage(const FpMatrix& a, const FpSubspace& w) {
  require_same_prime(a.prime(), w.prime());
  if (w.ambient_dim() != a.rows()) throw DimensionMismatch("preimage: subspace not in codomain");
  const FpSubspace ann = annihilator(w);
  FpMatrix q(a.prime(), ann.dim(), a.rows());
  for (std::size_t r = 0; r < ann.dim(); ++r) {
    for (std::size_t c = 0; c < a.rows(); ++c) q.set(r, c, ann.basis()[r][c]);
  }
  return kernel(q * a);
}

}  // namespace galmod
