#include "galmod/gmod.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <string>

#include "galmod/errors.hpp"

namespace galmod {

std::uint64_t ipow(std::uint64_t base, unsigned exponent) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exponent; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / base) {
      throw InvalidInput("integer power overflow");
    }
    r *= base;
  }
  return r;
}

GModule::GModule(unsigned p, unsigned n, FpMatrix sigma) : p_(p), n_(n), sigma_(std::move(sigma)) {
  require_prime(p);
  if (sigma_.prime() != p) throw DimensionMismatch("sigma is over a different prime");
  if (!sigma_.is_square()) throw DimensionMismatch("sigma must be square");
  const std::size_t d = sigma_.rows();
  const FpMatrix id = FpMatrix::identity(p, d);
  const std::uint64_t order = ipow(p, n);
  if (sigma_.pow(order) != id) throw InvalidInput("not an order-p^n action");

  auto powers = std::make_shared<std::vector<FpMatrix>>();
  powers->push_back(id);
  const FpMatrix nil = sigma_ - id;
  powers->push_back(nil);
  while (!powers->back().is_zero()) {
    if (powers->size() > order) {
      throw InternalInconsistency("sigma - 1 is not nilpotent of index <= p^n");
    }
    powers->push_back(powers->back() * nil);
  }
  powers_ = std::move(powers);
}

const FpMatrix& GModule::nilpotent_power(std::uint64_t k) const {
  const auto& pw = *powers_;
  if (k >= pw.size()) return pw.back();
  return pw[k];
}

Vec GModule::apply_nilpotent(std::span<const Scalar> v, std::uint64_t k) const {
  return nilpotent_power(k).apply(v);
}

GModule make_module(unsigned p, unsigned n, const FpMatrix& sigma) { return GModule(p, n, sigma); }

std::size_t length(const GModule& m, std::span<const Scalar> u) {
  Vec cur(u.begin(), u.end());
  std::size_t k = 0;
  while (!is_zero(cur)) {
    cur = m.nilpotent().apply(cur);
    ++k;
  }
  return k;
}

std::vector<FpSubspace> socle_series(const GModule& m) {
  std::vector<FpSubspace> out;
  for (std::size_t k = 1; k <= m.nilpotency_index(); ++k) {
    out.push_back(kernel(m.nilpotent_power(k)));
  }
  if (out.empty()) out.push_back(FpSubspace::full(m.prime(), m.dim()));
  return out;
}

FpSubspace fixed_points(const GModule& m, unsigned level) {
  if (level > m.height()) {
    throw InvalidInput("level " + std::to_string(level) + " out of range 0.." +
                       std::to_string(m.height()));
  }
  return kernel(m.nilpotent_power(ipow(m.prime(), level)));
}

BlockMultiset blocks_from_ranks(std::span<const std::size_t> ranks) {
  BlockMultiset out;
  // ranks[k-1] - ranks[k] blocks have size >= k.
  for (std::size_t k = 1; k < ranks.size(); ++k) {
    const std::size_t at_least_k = ranks[k - 1] - ranks[k];
    const std::size_t at_least_next = k + 1 < ranks.size() ? ranks[k] - ranks[k + 1] : 0;
    for (std::size_t c = at_least_next; c < at_least_k; ++c) out.push_back(k);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

BlockMultiset jordan_type(const GModule& m) {
  std::vector<std::size_t> ranks{m.dim()};
  for (std::size_t k = 1; ranks.back() != 0; ++k) ranks.push_back(m.nilpotent_power(k).rank());
  return blocks_from_ranks(ranks);
}

BlockMultiset jordan_type(const GModule& m, const FpSubspace& submodule) {
  if (!is_submodule(m, submodule)) throw InvalidInput("jordan_type: subspace is not invariant");
  std::vector<std::size_t> ranks{submodule.dim()};
  FpSubspace cur = submodule;
  while (cur.dim() != 0) {
    cur = image(m.nilpotent(), cur);
    ranks.push_back(cur.dim());
  }
  return blocks_from_ranks(ranks);
}

FpSubspace cyclic_submodule(const GModule& m, std::span<const Scalar> u) {
  FpSubspace out = FpSubspace::zero(m.prime(), m.dim());
  Vec cur(u.begin(), u.end());
  while (!is_zero(cur)) {
    out.insert(cur);
    cur = m.nilpotent().apply(cur);
  }
  return out;
}

bool is_submodule(const GModule& m, const FpSubspace& u) {
  if (u.ambient_dim() != m.dim() || u.prime() != m.prime()) {
    throw DimensionMismatch("subspace does not live in the module");
  }
  return std::all_of(u.basis().begin(), u.basis().end(),
                     [&](const Vec& b) { return u.contains(m.nilpotent().apply(b)); });
}

bool independent_sum_check(const GModule& m, std::span<const FpSubspace> parts) {
  const FpSubspace fixed = kernel(m.nilpotent());
  FpSubspace fixed_sum = FpSubspace::zero(m.prime(), m.dim());
  FpSubspace total = FpSubspace::zero(m.prime(), m.dim());
  std::size_t fixed_dims = 0;
  std::size_t dims = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!is_submodule(m, parts[i])) {
      throw InvalidInput("independent_sum_check: part " + std::to_string(i) +
                         " is not sigma-invariant");
    }
    const FpSubspace f = intersect(parts[i], fixed);
    fixed_dims += f.dim();
    dims += parts[i].dim();
    fixed_sum = sum(fixed_sum, f);
    total = sum(total, parts[i]);
  }
  const bool fixed_independent = fixed_sum.dim() == fixed_dims;
  const bool independent = total.dim() == dims;
  if (fixed_independent != independent) {
    throw InternalInconsistency("exclusion check disagrees with dimension count");
  }
  return fixed_independent;
}

FpSubspace free_complement(const GModule& m, const FpSubspace& u, const FpSubspace& v) {
  if (!is_submodule(m, u) || !is_submodule(m, v)) {
    throw InvalidInput("free_complement: inputs must be sigma-invariant");
  }
  if (!u.contains(v)) throw InvalidInput("free_complement: V is not contained in U");
  const BlockMultiset ut = jordan_type(m, u);
  const BlockMultiset vt = jordan_type(m, v);
  if (ut.empty()) return FpSubspace::zero(m.prime(), m.dim());
  const std::size_t block = ut.front();
  std::uint64_t pk = 1;
  while (pk < block) pk *= m.prime();
  const auto uniform = [block](const BlockMultiset& t) {
    return std::all_of(t.begin(), t.end(), [block](std::size_t b) { return b == block; });
  };
  if (pk != block || block > m.group_order() || !uniform(ut) || !uniform(vt)) {
    throw InvalidInput("free_complement: modules are not free of a common block size p^i");
  }

  const FpSubspace fixed = kernel(m.nilpotent());
  const FpSubspace z = complement(intersect(u, fixed), intersect(v, fixed));
  const FpMatrix basis = u.basis_matrix();
  const FpMatrix lift_map = m.nilpotent_power(block - 1) * basis;
  FpSubspace out = FpSubspace::zero(m.prime(), m.dim());
  for (const auto& zb : z.basis()) {
    const auto coeffs = solve(lift_map, zb);
    if (!coeffs) throw InternalInconsistency("free_complement: fixed vector has no lift in U");
    out = sum(out, cyclic_submodule(m, basis.apply(*coeffs)));
  }
  if (intersect(out, v).dim() != 0 || sum(out, v) != u) {
    throw InternalInconsistency("free_complement: lifted module is not a complement");
  }
  return out;
}

GModule jordan_module(unsigned p, unsigned n, const BlockMultiset& blocks) {
  std::size_t d = 0;
  for (auto b : blocks) d += b;
  FpMatrix sigma = FpMatrix::identity(p, d);
  std::size_t offset = 0;
  for (auto b : blocks) {
    for (std::size_t k = 0; k + 1 < b; ++k) sigma.set(offset + k, offset + k + 1, 1);
    offset += b;
  }
  return GModule(p, n, std::move(sigma));
}

}  // namespace galmod
