#include "galmod/local_fields.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "galmod/errors.hpp"

namespace galmod {

namespace {

using u64 = std::uint64_t;
__extension__ using u128 = unsigned __int128;
__extension__ using i128 = __int128;

// (Z/p^N)[x]/(x^D + low_{D-1} x^{D-1} + ... + low_0).
struct Ring {
  unsigned p = 2;
  unsigned digits = 1;
  u64 mod = 2;
  std::size_t deg = 1;
  Coeffs low;

  [[nodiscard]] u64 addm(u64 a, u64 b) const { return a >= mod - b ? a - (mod - b) : a + b; }
  [[nodiscard]] u64 subm(u64 a, u64 b) const { return a >= b ? a - b : a + (mod - b); }
  [[nodiscard]] u64 mulm(u64 a, u64 b) const {
    return static_cast<u64>(static_cast<u128>(a) * b % mod);
  }
  [[nodiscard]] u64 from_signed(long long z) const {
    const i128 m = mod;
    i128 r = static_cast<i128>(z) % m;
    if (r < 0) r += m;
    return static_cast<u64>(r);
  }

  [[nodiscard]] Coeffs constant(u64 c) const {
    Coeffs r(deg, 0);
    r[0] = c % mod;
    return r;
  }
  [[nodiscard]] Coeffs one() const { return constant(1); }

  [[nodiscard]] Coeffs add(const Coeffs& a, const Coeffs& b) const {
    Coeffs r(deg);
    for (std::size_t k = 0; k < deg; ++k) r[k] = addm(a[k], b[k]);
    return r;
  }
  [[nodiscard]] Coeffs sub(const Coeffs& a, const Coeffs& b) const {
    Coeffs r(deg);
    for (std::size_t k = 0; k < deg; ++k) r[k] = subm(a[k], b[k]);
    return r;
  }
  [[nodiscard]] Coeffs scale(const Coeffs& a, u64 c) const {
    Coeffs r(deg);
    for (std::size_t k = 0; k < deg; ++k) r[k] = mulm(a[k], c);
    return r;
  }
  [[nodiscard]] Coeffs mul(const Coeffs& a, const Coeffs& b) const {
    std::vector<u64> t(2 * deg - 1, 0);
    for (std::size_t i = 0; i < deg; ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < deg; ++j) {
        if (b[j] != 0) t[i + j] = addm(t[i + j], mulm(a[i], b[j]));
      }
    }
    for (std::size_t k = t.size(); k-- > deg;) {
      const u64 c = t[k];
      if (c == 0) continue;
      for (std::size_t j = 0; j < deg; ++j) {
        t[k - deg + j] = subm(t[k - deg + j], mulm(c, low[j]));
      }
    }
    t.resize(deg);
    return t;
  }
  [[nodiscard]] Coeffs pow(Coeffs a, u64 k) const {
    Coeffs r = one();
    while (k != 0) {
      if (k & 1U) r = mul(r, a);
      k >>= 1U;
      if (k != 0) a = mul(a, a);
    }
    return r;
  }
  // Horner evaluation of the monic modulus (or any full polynomial) at y.
  [[nodiscard]] Coeffs eval(const Coeffs& poly, const Coeffs& y) const {
    Coeffs r(deg, 0);
    for (std::size_t k = poly.size(); k-- > 0;) r = add(mul(r, y), constant(poly[k]));
    return r;
  }
  [[nodiscard]] Coeffs reduce_mod_p(const Coeffs& a) const {
    Coeffs r(a);
    for (auto& c : r) c %= p;
    return r;
  }
};

unsigned vp(u64 a, unsigned p) {
  unsigned t = 0;
  while (a != 0 && a % p == 0) {
    a /= p;
    ++t;
  }
  return t;
}

u64 checked_pow(u64 base, unsigned exponent, const char* what) {
  u64 r = 1;
  for (unsigned i = 0; i < exponent; ++i) {
    if (r > std::numeric_limits<u64>::max() / base) throw PrecisionError(what);
    r *= base;
  }
  return r;
}

// Frobenius c -> c^p on F_p[x]/(g) in the power basis.
FpMatrix frobenius_matrix(const Ring& ring) {
  FpMatrix phi(ring.p, ring.deg, ring.deg);
  Coeffs x(ring.deg, 0);
  if (ring.deg > 1) x[1] = 1;
  else x[0] = ring.mod - ring.low[0] % ring.mod;
  Coeffs xp = ring.pow(x, ring.p);
  Coeffs col = ring.one();
  for (std::size_t j = 0; j < ring.deg; ++j) {
    const Coeffs r = ring.reduce_mod_p(col);
    for (std::size_t i = 0; i < ring.deg; ++i) phi.set(i, j, static_cast<long long>(r[i]));
    col = ring.mul(col, xp);
  }
  return phi;
}

// Irreducible over F_p iff F_p[x]/(g) is reduced with a one-dimensional Frobenius-fixed part.
bool irreducible_mod_p(unsigned p, const Coeffs& low) {
  Ring r{p, 1, p, low.size(), low};
  const FpMatrix phi = frobenius_matrix(r);
  if (phi.rank() != r.deg) return false;
  return kernel(phi - FpMatrix::identity(p, r.deg)).dim() == 1;
}

Coeffs find_irreducible(unsigned p, std::size_t degree) {
  Coeffs low(degree, 0);
  for (u64 counter = 1;; ++counter) {
    u64 c = counter;
    for (std::size_t k = 0; k < degree; ++k) {
      low[k] = c % p;
      c /= p;
    }
    if (c != 0) throw InternalInconsistency("no irreducible polynomial found");
    if (low[0] != 0 && irreducible_mod_p(p, low)) return low;
  }
}

u64 multiplicative_order(u64 a, u64 m) {
  u64 x = a % m;
  for (u64 k = 1; k <= m; ++k) {
    if (x == 1) return k;
    x = static_cast<u64>(static_cast<u128>(x) * a % m);
  }
  return 0;
}

}  // namespace

struct LocalTower::Impl {
  Ring ring;
  unsigned p = 3;
  unsigned n = 1;
  TowerKind kind = TowerKind::unramified;
  std::int64_t e = 1;     // ramification of K
  std::size_t f = 1;      // residue degree of K
  Coeffs one;
  Coeffs gen;             // T or pi
  Coeffs sigma_gen;       // sigma(T) or sigma(pi)
  Coeffs sigma_unit;      // sigma(pi)/pi
  Coeffs sigma_unit_inv;
  Coeffs eps_inv;         // (pi^e / p)^{-1}
  u64 eps_bar = 1;        // residue of pi^e / p
  Coeffs lead_p;          // residue of p / pi^e
  std::vector<LFElement> level_pi;
  std::vector<LFElement> level_pi_inv;
  std::vector<u64> level_pi_lead;
  std::vector<std::vector<LFElement>> reps;
  std::vector<std::map<u64, LFElement>> filtration_inv;  // k -> (1 + pi_i^k)^{-1}
  std::vector<std::map<u64, std::size_t>> slot_of;
  std::vector<FpSubspace> residue_fields;

  [[nodiscard]] bool pi_basis() const { return kind == TowerKind::cyclotomic; }

  [[nodiscard]] std::int64_t coeff_val(const Coeffs& s, unsigned digits) const {
    const std::int64_t cap = e * digits;
    std::int64_t best = cap;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] == 0) continue;
      const unsigned t = vp(s[k], p);
      if (t >= digits) continue;
      const std::int64_t v = pi_basis() ? e * t + static_cast<std::int64_t>(k) : t;
      best = std::min(best, v);
    }
    return best;
  }

  // Residue of s / pi^w, as a residue-field polynomial with entries mod p.
  [[nodiscard]] Coeffs lead_residue(const Coeffs& s, std::int64_t w) const {
    Coeffs res(ring.deg, 0);
    if (pi_basis()) {
      const auto k0 = static_cast<std::size_t>(w % e);
      const auto t = static_cast<unsigned>(w / e);
      u64 c = (s[k0] / checked_pow(p, t, "lead")) % p;
      const u64 inv_eps = inverse_mod(static_cast<Scalar>(eps_bar % p), p);
      for (unsigned j = 0; j < t; ++j) c = c * inv_eps % p;
      res[0] = c;
    } else {
      const u64 scale = checked_pow(p, static_cast<unsigned>(w), "lead");
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] != 0 && vp(s[k], p) >= w) res[k] = (s[k] / scale) % p;
      }
    }
    return res;
  }

  [[nodiscard]] Coeffs pi_power(std::int64_t j) const {
    if (pi_basis()) return ring.pow(gen, static_cast<u64>(j));
    if (j >= static_cast<std::int64_t>(ring.digits)) return Coeffs(ring.deg, 0);
    return ring.constant(checked_pow(p, static_cast<unsigned>(j), "pi power"));
  }

  [[nodiscard]] LFElement normalize(const Coeffs& s, unsigned digits) const {
    const std::int64_t w = coeff_val(s, digits);
    LFElement out;
    out.digits = digits;
    if (w >= e * digits) return out;
    const std::int64_t c = (w + e - 1) / e;
    const std::int64_t r = c * e - w;
    Coeffs t = r == 0 ? s : ring.mul(s, pi_power(r));
    const u64 div = checked_pow(p, static_cast<unsigned>(c), "normalize");
    for (auto& x : t) x /= div;
    if (pi_basis()) t = ring.mul(t, ring.pow(eps_inv, static_cast<u64>(c)));
    out.val = w;
    out.unit = std::move(t);
    out.digits = digits - static_cast<unsigned>(c);
    if (out.digits == 0) throw PrecisionError("precision exhausted");
    return out;
  }

  [[nodiscard]] Coeffs unit_inverse(const Coeffs& u) const {
    const u64 q = checked_pow(p, static_cast<unsigned>(f), "residue field size");
    Coeffs x = ring.pow(u, q - 2);
    const Coeffs two = ring.constant(2);
    for (int iter = 0; iter < 200; ++iter) {
      const Coeffs prod = ring.mul(u, x);
      if (prod == one) return x;
      x = ring.mul(x, ring.sub(two, prod));
    }
    throw InternalInconsistency("unit inverse did not converge");
  }

  [[nodiscard]] Coeffs unit_sigma(const Coeffs& u) const { return ring.eval(u, sigma_gen); }
};

std::string to_string(TowerKind kind) {
  return kind == TowerKind::unramified ? "unramified" : "cyclotomic";
}

TowerKind tower_kind_from_string(const std::string& name) {
  if (name == "unramified" || name == "UNRAMIFIED") return TowerKind::unramified;
  if (name == "cyclotomic" || name == "CYCLOTOMIC") return TowerKind::cyclotomic;
  throw InvalidInput("unknown tower kind '" + name + "'");
}

std::size_t minimum_precision(unsigned p, TowerKind kind, unsigned n) {
  const std::size_t e = kind == TowerKind::unramified ? 1 : ipow(p, n) * (p - 1);
  const std::size_t ceil_ratio = (p + (p - 2)) / (p - 1);
  return e * ceil_ratio + e + 8;
}

LocalTower::LocalTower(const TowerSpec& spec) : spec_(spec) {
  const unsigned p = spec.p;
  const unsigned n = spec.n;
  require_prime(p);
  if (n == 0) throw InvalidInput("tower height n must be at least 1");
  if (spec.kind == TowerKind::unramified && p == 2) {
    throw InvalidInput("unramified towers need p odd");
  }
  if (spec.kind == TowerKind::cyclotomic) {
    const u64 m = checked_pow(p, n + 1, "modulus p^(n+1) too large");
    if (multiplicative_order(1 + p, m) != ipow(p, n)) {
      throw InvalidInput("non-cyclic configuration: 1+p does not have order p^n mod p^(n+1)");
    }
  }
  const std::size_t min_prec = minimum_precision(p, spec.kind, n);
  if (spec.precision < min_prec) {
    throw PrecisionError("precision " + std::to_string(spec.precision) + " below minimum " +
                         std::to_string(min_prec));
  }

  auto impl = std::make_shared<Impl>();
  Impl& I = *impl;
  I.p = p;
  I.n = n;
  I.kind = spec.kind;
  const u64 pn = ipow(p, n);
  if (spec.kind == TowerKind::unramified) {
    degree_ = pn;
    ram_ = 1;
    I.f = pn;
  } else {
    degree_ = pn * (p - 1);
    ram_ = degree_;
    I.f = 1;
  }
  I.e = static_cast<std::int64_t>(ram_);
  digits_ = static_cast<unsigned>((spec.precision + ram_ - 1) / ram_);
  const u64 mod = checked_pow(p, digits_, "precision too large for 64-bit coefficients");

  if (spec.kind == TowerKind::unramified) {
    modpoly_ = find_irreducible(p, degree_);
    I.ring = Ring{p, digits_, mod, degree_, modpoly_};
  } else {
    // E(pi) = sum_{j<p} (1 - pi)^{j p^n}, built mod p^{N+1} so that E/p is exact mod p^N.
    const u128 big = static_cast<u128>(mod) * p;
    std::vector<u128> power(degree_ + 1, 0);
    std::vector<u128> e_poly(degree_ + 1, 0);
    power[0] = 1;
    for (u64 step = 0; step <= degree_; ++step) {
      if (step % pn == 0) {
        for (std::size_t k = 0; k <= degree_; ++k) e_poly[k] = (e_poly[k] + power[k]) % big;
      }
      if (step == degree_) break;
      for (std::size_t k = degree_; k > 0; --k) power[k] = (power[k] + big - power[k - 1]) % big;
    }
    // (1-pi)^{(p-1)p^n} has leading coefficient (+1) at pi^{degree}.
    modpoly_.assign(degree_, 0);
    Coeffs eps(degree_, 0);
    for (std::size_t k = 0; k < degree_; ++k) {
      modpoly_[k] = static_cast<u64>(e_poly[k] % mod);
      if (e_poly[k] % p != 0) throw InternalInconsistency("defining polynomial is not Eisenstein");
      // eps = pi^e / p = -sum (E_k / p) pi^k.
      const u64 q = static_cast<u64>((e_poly[k] / p) % mod);
      eps[k] = q == 0 ? 0 : mod - q;
    }
    I.ring = Ring{p, digits_, mod, degree_, modpoly_};
    I.eps_bar = eps[0] % p;
    I.one = I.ring.one();
    I.f = 1;
    I.eps_inv = I.unit_inverse(eps);
  }
  if (spec.kind == TowerKind::unramified) I.one = I.ring.one();

  I.gen.assign(degree_, 0);
  I.gen[1] = 1;
  I.lead_p = Coeffs(degree_, 0);
  if (spec.kind == TowerKind::cyclotomic) {
    I.lead_p[0] = inverse_mod(static_cast<Scalar>(I.eps_bar), p);
    const Coeffs zeta = I.ring.sub(I.one, I.gen);
    I.sigma_gen = I.ring.sub(I.one, I.ring.pow(zeta, 1 + p));
    Coeffs unit(degree_, 0);
    Coeffs zp = I.one;
    for (unsigned j = 0; j <= p; ++j) {
      unit = I.ring.add(unit, zp);
      zp = I.ring.mul(zp, zeta);
    }
    if (I.ring.mul(I.gen, unit) != I.sigma_gen) {
      throw InternalInconsistency("sigma(pi)/pi expansion failed");
    }
    I.sigma_unit = unit;
    I.sigma_unit_inv = I.unit_inverse(unit);
  } else {
    I.eps_inv = I.one;
    I.lead_p[0] = 1;
    // Hensel lift of x -> x^p to the root of g.
    Coeffs full(modpoly_);
    full.push_back(1);
    Coeffs deriv(degree_, 0);
    for (std::size_t k = 1; k <= degree_; ++k) deriv[k - 1] = I.ring.mulm(full[k] % mod, k % mod);
    Coeffs y = I.ring.pow(I.gen, p);
    bool converged = false;
    for (int iter = 0; iter < 128 && !converged; ++iter) {
      const Coeffs gy = I.ring.eval(full, y);
      if (std::all_of(gy.begin(), gy.end(), [](u64 c) { return c == 0; })) {
        converged = true;
        break;
      }
      y = I.ring.sub(y, I.ring.mul(gy, I.unit_inverse(I.ring.eval(deriv, y))));
    }
    if (!converged) throw InternalInconsistency("Frobenius lift did not converge");
    I.sigma_gen = y;
  }
  sigma_gen_ = I.sigma_gen;
  impl_ = impl;

  const LFElement g = generator();
  if (!equal(galois(g, pn), g) || equal(galois(g, pn / p), g)) {
    throw InvalidInput("sigma does not have order p^n on the top field");
  }

  if (spec.kind == TowerKind::unramified) {
    Coeffs low_p(modpoly_);
    for (auto& c : low_p) c %= p;
    const Ring residue{p, 1, p, degree_, low_p};
    const FpMatrix phi = frobenius_matrix(residue);
    const FpMatrix id = FpMatrix::identity(p, degree_);
    for (unsigned i = 0; i <= n; ++i) {
      I.residue_fields.push_back(kernel(phi.pow(ipow(p, i)) - id));
      if (I.residue_fields.back().dim() != ipow(p, i)) {
        throw InternalInconsistency("residue subfield has the wrong dimension");
      }
    }
  }

  I.level_pi.resize(n + 1);
  I.level_pi_inv.resize(n + 1);
  I.level_pi_lead.resize(n + 1);
  I.reps.resize(n + 1);
  I.filtration_inv.resize(n + 1);
  I.slot_of.resize(n + 1);
  for (unsigned i = 0; i <= n; ++i) {
    I.level_pi[i] = spec.kind == TowerKind::cyclotomic ? norm(uniformizer(), n, i) : uniformizer();
    I.level_pi_inv[i] = inv(I.level_pi[i]);
    I.level_pi_lead[i] = I.level_pi[i].unit[0] % p;
    auto& reps = I.reps[i];
    reps.push_back(I.level_pi[i]);
    if (spec.kind == TowerKind::unramified) {
      for (const auto& b : I.residue_fields[i].basis()) {
        Coeffs u = I.one;
        for (std::size_t k = 0; k < degree_; ++k) u[k] = I.ring.addm(u[k], I.ring.mulm(b[k], p));
        reps.push_back(LFElement{0, u, digits_});
      }
    } else {
      const u64 top = ipow(p, i + 1);
      for (u64 k = 1; k <= top; ++k) {
        if (k % p == 0 && k != top) continue;
        const LFElement b = add(one(), pow(I.level_pi[i], static_cast<std::int64_t>(k)));
        I.slot_of[i][k] = reps.size();
        I.filtration_inv[i][k] = inv(b);
        reps.push_back(b);
      }
    }
    if (reps.size() != class_dim(i)) throw InternalInconsistency("class basis has the wrong size");
  }
}

LocalTower make_tower(unsigned p, TowerKind kind, unsigned n, std::size_t precision) {
  return LocalTower(TowerSpec{p, kind, n, precision});
}

LFElement LocalTower::one() const { return LFElement{0, impl_->one, digits_}; }

LFElement LocalTower::from_int(std::int64_t z) const {
  if (z == 0) return LFElement{LFElement::kZeroVal, {}, digits_};
  const Impl& I = *impl_;
  unsigned v = 0;
  while (z % static_cast<std::int64_t>(spec_.p) == 0) {
    z /= static_cast<std::int64_t>(spec_.p);
    ++v;
  }
  if (v >= digits_) throw PrecisionError("integer valuation beyond precision");
  Coeffs u = I.ring.constant(I.ring.from_signed(z));
  if (I.pi_basis()) u = I.ring.mul(u, I.ring.pow(I.eps_inv, v));
  return LFElement{static_cast<std::int64_t>(v) * I.e, std::move(u), digits_};
}

LFElement LocalTower::from_coeffs(const Coeffs& c) const {
  if (c.size() != degree_) throw DimensionMismatch("coefficient vector has the wrong length");
  Coeffs r(c);
  for (auto& x : r) x %= impl_->ring.mod;
  return impl_->normalize(r, digits_);
}

LFElement LocalTower::uniformizer() const { return LFElement{1, impl_->one, digits_}; }

const LFElement& LocalTower::level_uniformizer(unsigned level) const {
  if (level > spec_.n) throw InvalidInput("level out of range");
  return impl_->level_pi[level];
}

LFElement LocalTower::zeta() const {
  if (spec_.kind != TowerKind::cyclotomic) throw InvalidInput("zeta needs a cyclotomic tower");
  return LFElement{0, impl_->ring.sub(impl_->one, impl_->gen), digits_};
}

LFElement LocalTower::generator() const {
  if (impl_->pi_basis()) return uniformizer();
  return LFElement{0, impl_->gen, digits_};
}

LFElement LocalTower::mul(const LFElement& x, const LFElement& y) const {
  const unsigned d = std::min(x.digits, y.digits);
  if (x.is_zero() || y.is_zero()) return LFElement{LFElement::kZeroVal, {}, d};
  return LFElement{x.val + y.val, impl_->ring.mul(x.unit, y.unit), d};
}

LFElement LocalTower::inv(const LFElement& x) const {
  if (x.is_zero()) throw InvalidInput("division by zero");
  return LFElement{-x.val, impl_->unit_inverse(x.unit), x.digits};
}

LFElement LocalTower::div(const LFElement& x, const LFElement& y) const { return mul(x, inv(y)); }

LFElement LocalTower::pow(const LFElement& x, std::int64_t k) const {
  if (k < 0) return pow(inv(x), -k);
  if (x.is_zero()) {
    if (k == 0) return one();
    return x;
  }
  return LFElement{x.val * k, impl_->ring.pow(x.unit, static_cast<u64>(k)), x.digits};
}

LFElement LocalTower::add(const LFElement& x, const LFElement& y) const {
  if (x.is_zero()) return y;
  if (y.is_zero()) return x;
  const Impl& I = *impl_;
  const LFElement& lo = x.val <= y.val ? x : y;
  const LFElement& hi = x.val <= y.val ? y : x;
  const Coeffs shifted = I.ring.mul(hi.unit, I.pi_power(hi.val - lo.val));
  const unsigned d = std::min(x.digits, y.digits);
  LFElement s = I.normalize(I.ring.add(lo.unit, shifted), d);
  if (!s.is_zero()) s.val += lo.val;
  return s;
}

LFElement LocalTower::neg(const LFElement& x) const {
  if (x.is_zero()) return x;
  return LFElement{x.val, impl_->ring.sub(Coeffs(degree_, 0), x.unit), x.digits};
}

LFElement LocalTower::sub(const LFElement& x, const LFElement& y) const { return add(x, neg(y)); }

std::int64_t LocalTower::valuation(const LFElement& x) const { return x.val; }

std::int64_t LocalTower::relative_precision(const LFElement& x) const {
  return impl_->e * static_cast<std::int64_t>(x.digits);
}

bool LocalTower::equal(const LFElement& x, const LFElement& y, std::int64_t slack) const {
  if (x.is_zero() || y.is_zero()) return x.is_zero() && y.is_zero();
  if (x.val != y.val) return false;
  const unsigned d = std::min(x.digits, y.digits);
  const Coeffs diff = impl_->ring.sub(x.unit, y.unit);
  return impl_->coeff_val(diff, d) >= impl_->e * d - slack;
}

LFElement LocalTower::galois(const LFElement& x, std::uint64_t k) const {
  if (x.is_zero()) return x;
  const Impl& I = *impl_;
  k %= ipow(spec_.p, spec_.n);
  LFElement out = x;
  for (std::uint64_t s = 0; s < k; ++s) {
    Coeffs u = I.unit_sigma(out.unit);
    if (I.pi_basis() && out.val != 0) {
      const Coeffs& factor = out.val > 0 ? I.sigma_unit : I.sigma_unit_inv;
      u = I.ring.mul(u, I.ring.pow(factor, static_cast<u64>(std::llabs(out.val))));
    }
    out.unit = std::move(u);
  }
  return out;
}

LFElement LocalTower::norm(const LFElement& x, unsigned from, unsigned to) const {
  if (to > from || from > spec_.n) throw InvalidInput("norm: need to <= from <= n");
  const std::uint64_t step = ipow(spec_.p, to);
  const std::uint64_t count = ipow(spec_.p, from - to);
  LFElement acc = x;
  LFElement conj = x;
  for (std::uint64_t t = 1; t < count; ++t) {
    conj = galois(conj, step);
    acc = mul(acc, conj);
  }
  return acc;
}

bool LocalTower::lies_in_level(const LFElement& x, unsigned level) const {
  return equal(galois(x, ipow(spec_.p, level)), x);
}

std::size_t LocalTower::class_dim(unsigned level) const {
  if (level > spec_.n) throw InvalidInput("level out of range");
  const std::size_t pi = ipow(spec_.p, level);
  return spec_.kind == TowerKind::unramified ? pi + 1 : pi * (spec_.p - 1) + 2;
}

const std::vector<LFElement>& LocalTower::class_representatives(unsigned level) const {
  if (level > spec_.n) throw InvalidInput("level out of range");
  return impl_->reps[level];
}

Vec LocalTower::class_of(unsigned level, const LFElement& x) const {
  if (level > spec_.n) throw InvalidInput("level out of range");
  if (x.is_zero()) throw InvalidInput("class_of: zero has no class");
  const Impl& I = *impl_;
  const unsigned p = spec_.p;
  Vec out(class_dim(level), 0);

  if (spec_.kind == TowerKind::unramified) {
    if (x.digits < 2) throw PrecisionError("class_of needs two valid digits");
    out[0] = reduce_mod(x.val, p);
    const u64 q = ipow(p, static_cast<unsigned>(ipow(p, level)));
    const Coeffs w = I.ring.pow(x.unit, q - 1);
    const Coeffs d = I.ring.sub(w, I.one);
    Vec digit(degree_, 0);
    for (std::size_t k = 0; k < degree_; ++k) {
      if (d[k] % p != 0) throw InternalInconsistency("u^(q-1) is not a principal unit");
      digit[k] = static_cast<Scalar>((d[k] / p) % p);
    }
    const auto coords = I.residue_fields[level].coordinates(digit);
    if (!coords) throw InvalidInput("class_of: element does not lie in K_i");
    for (std::size_t t = 0; t < coords->size(); ++t) out[1 + t] = (p - (*coords)[t]) % p;
    return out;
  }

  const std::int64_t r = static_cast<std::int64_t>(ipow(p, spec_.n - level));
  const std::int64_t top = static_cast<std::int64_t>(ipow(p, level + 1));
  if (I.e * static_cast<std::int64_t>(x.digits) <= static_cast<std::int64_t>(ipow(p, spec_.n + 1))) {
    throw PrecisionError("class_of: precision below the p-th power threshold");
  }
  if (x.val % r != 0) throw InvalidInput("class_of: element does not lie in K_i");
  const std::int64_t vi = x.val / r;
  out[0] = reduce_mod(vi, p);
  const LFElement u = mul(x, pow(I.level_pi_inv[level], vi));
  LFElement w = pow(u, p - 1);
  const u64 lead_inv = inverse_mod(static_cast<Scalar>(I.level_pi_lead[level]), p);
  for (;;) {
    const Coeffs d = I.ring.sub(w.unit, I.one);
    const std::int64_t kappa = I.coeff_val(d, w.digits);
    if (kappa >= I.e * static_cast<std::int64_t>(w.digits)) break;
    if (kappa % r != 0) throw InvalidInput("class_of: element does not lie in K_i");
    const std::int64_t k = kappa / r;
    if (k > top) break;
    u64 c = I.lead_residue(d, kappa)[0];
    for (std::int64_t j = 0; j < k; ++j) c = c * lead_inv % p;
    if (k == top || k % p != 0) {
      out[I.slot_of[level].at(static_cast<u64>(k))] =
          static_cast<Scalar>((out[I.slot_of[level].at(static_cast<u64>(k))] + c) % p);
      w = mul(w, pow(I.filtration_inv[level].at(static_cast<u64>(k)), static_cast<std::int64_t>(c)));
    } else {
      const LFElement f = add(one(), mul(from_int(static_cast<std::int64_t>(c)),
                                         pow(I.level_pi[level], k / p)));
      w = mul(w, inv(pow(f, p)));
    }
  }
  for (std::size_t t = 1; t < out.size(); ++t) out[t] = (p - out[t]) % p;
  return out;
}

std::optional<LFElement> LocalTower::pth_root(const LFElement& x) const {
  if (x.is_zero()) return x;
  const Impl& I = *impl_;
  const unsigned p = spec_.p;
  if (x.val % static_cast<std::int64_t>(p) != 0) return std::nullopt;
  const u64 q = ipow(p, static_cast<unsigned>(I.f));

  // Teichmueller part: omega = lim u^{q^j}; its p-th root is omega^{q/p}.
  Coeffs omega = x.unit;
  for (unsigned j = 0; j <= digits_; ++j) omega = I.ring.pow(omega, q);
  const LFElement omega_el{0, omega, x.digits};
  LFElement w = mul(LFElement{0, x.unit, x.digits}, inv(omega_el));
  LFElement root{0, I.ring.pow(omega, q / p), x.digits};

  const std::int64_t cap = I.e * static_cast<std::int64_t>(x.digits);
  // Units above pe/(p-1) are p-th powers; below it only steps divisible by p are.
  for (std::int64_t guard = 0; guard <= cap + 2; ++guard) {
    const Coeffs d = I.ring.sub(w.unit, I.one);
    const std::int64_t k = I.coeff_val(d, w.digits);
    if (k >= I.e * static_cast<std::int64_t>(w.digits)) {
      root.val = x.val / static_cast<std::int64_t>(p);
      root.digits = x.digits > 1 ? x.digits - 1 : 1;
      return root;
    }
    const Coeffs c = I.lead_residue(d, k);
    const std::int64_t lhs = k * static_cast<std::int64_t>(p - 1);
    const std::int64_t threshold = static_cast<std::int64_t>(p) * I.e;
    Coeffs digit;
    std::int64_t shift = 0;
    if (lhs < threshold) {
      if (k % p != 0) return std::nullopt;
      digit = I.ring.reduce_mod_p(I.ring.pow(c, q / p));
      shift = k / static_cast<std::int64_t>(p);
    } else if (lhs == threshold) {
      return std::nullopt;
    } else {
      digit = I.ring.reduce_mod_p(I.ring.mul(c, I.unit_inverse(I.lead_p)));
      shift = k - I.e;
    }
    const LFElement f =
        add(one(), mul(LFElement{0, digit, digits_}, LFElement{shift, I.one, digits_}));
    root = mul(root, f);
    w = mul(w, inv(pow(f, p)));
  }
  throw InternalInconsistency("p-th root extraction did not terminate");
}

std::vector<LFElement> LocalTower::kummer_generators() const {
  if (spec_.kind != TowerKind::cyclotomic) {
    throw InvalidInput("Kummer generators need xi_p in the base field");
  }
  const unsigned n = spec_.n;
  std::vector<LFElement> out;
  LFElement a = pow(zeta(), spec_.p);
  for (unsigned i = n; i-- > 0;) {
    if (i + 1 < n) a = norm(a, i + 1, i);
    if (!is_zero(class_of(n, a))) throw InternalInconsistency("a_i is not a p-th power in K");
    if (is_zero(class_of(i, a))) throw InternalInconsistency("a_i is a p-th power in K_i");
    if (i + 1 < n && !is_zero(class_of(i + 1, a))) {
      throw InternalInconsistency("a_i is not a p-th power in K_{i+1}");
    }
    out.push_back(a);
  }
  return out;
}

GaloisDatum build_datum(const LocalTower& tower) {
  const unsigned p = tower.prime();
  const unsigned n = tower.height();
  GaloisDatum d;
  d.p = p;
  d.n = n;
  d.xi_in_F = tower.xi_in_base();

  const auto class_matrix = [&](unsigned level, const std::vector<LFElement>& elems) {
    std::vector<Vec> cols;
    cols.reserve(elems.size());
    for (const auto& x : elems) cols.push_back(tower.class_of(level, x));
    return FpMatrix::from_columns(p, tower.class_dim(level), cols);
  };
  const auto mapped = [&](const std::vector<LFElement>& src, auto&& fn) {
    std::vector<LFElement> out;
    out.reserve(src.size());
    for (const auto& x : src) out.push_back(fn(x));
    return out;
  };

  const auto& top_reps = tower.class_representatives(n);
  const auto sigma_of = [&](const LFElement& x) { return tower.galois(x, 1); };
  d.J = GModule(p, n, class_matrix(n, mapped(top_reps, sigma_of)));
  d.levels.resize(n + 1);

  std::vector<LFElement> kummer;
  if (d.xi_in_F) kummer = tower.kummer_generators();

  for (unsigned i = 0; i <= n; ++i) {
    LevelData& l = d.levels[i];
    const auto& reps = tower.class_representatives(i);
    if (i == n) {
      l.space = d.J;
      l.eps = FpMatrix::identity(p, d.J.dim());
      l.norm = FpMatrix::identity(p, d.J.dim());
    } else {
      l.space = GModule(p, i, class_matrix(i, mapped(reps, sigma_of)));
      l.eps = class_matrix(n, reps);
      l.norm = class_matrix(i, mapped(top_reps, [&](const LFElement& x) {
                              return tower.norm(x, n, i);
                            }));
      if (d.xi_in_F) l.a_class = tower.class_of(i, kummer[n - 1 - i]);
    }
    for (unsigned j = 0; j < i; ++j) {
      l.inter_norm[j] = class_matrix(j, mapped(reps, [&](const LFElement& x) {
                                       return tower.norm(x, i, j);
                                     }));
    }
  }

  if (p == 2 && n == 1) {
    const Vec minus_one = tower.class_of(0, tower.from_int(-1));
    d.minus_one_is_norm = solve(d.levels[0].norm, minus_one).has_value();
  }
  return d;
}

bool root_norm_crosscheck(const LocalTower& tower, const LFElement& alpha, const LFElement& gamma,
                          const LFElement& k, unsigned level) {
  const unsigned p = tower.prime();
  const unsigned n = tower.height();
  if (level >= n) throw InvalidInput("root_norm_crosscheck: need 0 <= i < n");
  if (p == 2 && n == 1) throw InvalidInput("root_norm_crosscheck: p = 2 needs n > 1");
  if (!tower.lies_in_level(gamma, level)) throw InvalidInput("gamma does not lie in K_i");
  const LFElement lhs_pre = tower.div(tower.galois(alpha), alpha);
  if (!tower.equal(lhs_pre, tower.mul(gamma, tower.pow(k, p)))) {
    throw InvalidInput("alpha^(sigma-1) != gamma k^p");
  }
  const auto root = tower.pth_root(tower.norm(alpha, n, 0));
  if (!root) throw InternalInconsistency("N(alpha) has no p-th root to precision");
  const LFElement lhs = tower.div(tower.galois(*root), *root);
  const LFElement rhs = tower.mul(
      tower.norm(k, n, 0),
      tower.pow(tower.norm(gamma, level, 0), static_cast<std::int64_t>(ipow(p, n - level - 1))));
  return tower.equal(lhs, rhs);
}

NormcondSample sample_normcond(const LocalTower& tower, const GaloisDatum& datum, unsigned level,
                               std::uint64_t seed) {
  const unsigned p = tower.prime();
  const unsigned n = tower.height();
  if (level >= n) throw InvalidInput("sample_normcond: need 0 <= i < n");
  std::mt19937_64 rng(seed);
  const GModule& J = datum.J;
  const FpSubspace candidates = preimage(J.nilpotent(), image(datum.levels[level].eps));
  Vec x(J.dim(), 0);
  for (const auto& b : candidates.basis()) {
    x = add(x, scale(b, static_cast<Scalar>(rng() % p), p), p);
  }

  const auto& reps = tower.class_representatives(n);
  LFElement alpha = tower.one();
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (x[t] != 0) alpha = tower.mul(alpha, tower.pow(reps[t], x[t]));
  }
  // Random p-th power factor.
  Coeffs beta_coeffs(tower.degree(), 0);
  beta_coeffs[0] = 1 + rng() % (p - 1);
  for (std::size_t k = 1; k < std::min<std::size_t>(4, beta_coeffs.size()); ++k) {
    beta_coeffs[k] = rng() % p;
  }
  const LFElement beta = tower.from_coeffs(beta_coeffs);
  alpha = tower.mul(alpha, tower.pow(beta, p));

  const Vec nx = J.nilpotent().apply(x);
  const auto h = solve(datum.levels[level].eps, nx);
  if (!h) throw InternalInconsistency("sample_normcond: (sigma-1)[alpha] is not in [K_i^x]");
  const auto& level_reps = tower.class_representatives(level);
  LFElement gamma = tower.one();
  for (std::size_t t = 0; t < h->size(); ++t) {
    if ((*h)[t] != 0) gamma = tower.mul(gamma, tower.pow(level_reps[t], (*h)[t]));
  }
  const LFElement quotient = tower.div(tower.div(tower.galois(alpha), alpha), gamma);
  const auto k = tower.pth_root(quotient);
  if (!k) throw InternalInconsistency("sample_normcond: sigma(alpha)/(alpha gamma) is not a p-th power");
  return NormcondSample{alpha, gamma, *k, level};
}

}  // namespace galmod
