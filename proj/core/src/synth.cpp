#include "galmod/synth.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <string>

#include "galmod/errors.hpp"

namespace galmod {

namespace {

bool is_level(const std::optional<Level>& m, unsigned i) {
  return m && !m->is_neg_infinity() && m->value() == static_cast<int>(i);
}

// Block sizes in construction order: X first, then Y_n down to Y_0.
struct Layout {
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> offsets;
  bool has_x = false;
  std::size_t dim = 0;
};

Layout layout_of(const SynthParams& params) {
  Layout out;
  if (params.m) {
    out.has_x = true;
    out.sizes.push_back(params.m->p_power(params.p) + 1);
  }
  for (unsigned i = params.n + 1; i-- > 0;) {
    const std::size_t count = params.e[i] - (is_level(params.m, i) ? 1 : 0);
    for (std::size_t k = 0; k < count; ++k) out.sizes.push_back(ipow(params.p, i));
  }
  for (auto s : out.sizes) {
    out.offsets.push_back(out.dim);
    out.dim += s;
  }
  return out;
}

// Coordinates spanning im eps_i: a leading segment of every block.
std::vector<std::size_t> image_coordinates(const SynthParams& params, const Layout& lay,
                                           unsigned i) {
  const std::uint64_t pi = ipow(params.p, i);
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < lay.sizes.size(); ++b) {
    std::uint64_t keep = std::min<std::uint64_t>(lay.sizes[b], pi);
    if (lay.has_x && b == 0) {
      const Level m = *params.m;
      if (m.is_neg_infinity()) {
        keep = 0;
      } else if (static_cast<int>(i) >= m.value()) {
        keep = m.p_power(params.p);
      } else {
        keep = pi;
      }
    }
    for (std::size_t k = 0; k < keep; ++k) out.push_back(lay.offsets[b] + k);
  }
  return out;
}

FpMatrix restrict_square(const FpMatrix& a, const std::vector<std::size_t>& idx, bool extra) {
  const std::size_t d = idx.size() + (extra ? 1 : 0);
  FpMatrix out(a.prime(), d, d);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    for (std::size_t c = 0; c < idx.size(); ++c) out.set(r, c, a(idx[r], idx[c]));
  }
  if (extra) out.set(d - 1, d - 1, 1);
  return out;
}

// Rows idx of a, followed by an optional extra row.
FpMatrix select_rows(const FpMatrix& a, const std::vector<std::size_t>& idx,
                     const std::optional<Vec>& extra_row) {
  FpMatrix out(a.prime(), idx.size() + (extra_row ? 1 : 0), a.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out.set(r, c, a(idx[r], c));
  }
  if (extra_row) {
    for (std::size_t c = 0; c < a.cols(); ++c) out.set(idx.size(), c, (*extra_row)[c]);
  }
  return out;
}

}  // namespace

void check_params(const SynthParams& params) {
  require_prime(params.p);
  if (params.n == 0) throw InvalidInput("n must be at least 1");
  if (params.e.size() != params.n + 1) {
    throw InvalidInput("e must have n+1 entries, got " + std::to_string(params.e.size()));
  }
  const bool p2n1 = params.p == 2 && params.n == 1;
  if (params.m) {
    if (!params.xi_in_F) throw InvalidInput("the Theorem 2 case needs xi_in_F");
    if (!params.m->is_neg_infinity()) {
      const auto mv = static_cast<unsigned>(params.m->value());
      if (mv >= params.n) throw InvalidInput("m must lie in {-inf, 0, ..., n-1}");
      if (params.e[mv] < 1) throw InvalidInput("m >= 0 requires e_m >= 1");
    }
    if (p2n1) {
      if (!params.minus_one_is_norm.value_or(false)) {
        throw InvalidInput("p=2, n=1 Theorem 2 case needs minus_one_is_norm = true");
      }
      if (!params.m->is_neg_infinity()) {
        throw InvalidInput("p=2, n=1 with -1 a norm forces m = -inf");
      }
    }
  } else if (params.xi_in_F) {
    if (!p2n1 || params.minus_one_is_norm.value_or(true)) {
      throw InvalidInput("Theorem 1 case needs xi_in_F = false, or p=2, n=1 with -1 not a norm");
    }
  }
  if (params.minus_one_is_norm && !(p2n1 && params.xi_in_F)) {
    throw InvalidInput("minus_one_is_norm is only meaningful for p=2, n=1 with xi_in_F");
  }
  // Guard the block sizes themselves against overflow.
  (void)ipow(params.p, params.n);
}

SynthExpectation expected_answer(const SynthParams& params) {
  check_params(params);
  SynthExpectation out;
  out.m = params.m;
  out.e = params.e;
  out.y_ranks = params.e;
  for (unsigned i = 0; i <= params.n; ++i) {
    if (is_level(params.m, i)) --out.y_ranks[i];
  }
  const Layout lay = layout_of(params);
  out.jordan_type.assign(lay.sizes.begin(), lay.sizes.end());
  std::sort(out.jordan_type.begin(), out.jordan_type.end(), std::greater<>());
  out.dim = lay.dim;
  return out;
}

GaloisDatum synthesize(const SynthParams& params) {
  check_params(params);
  const unsigned p = params.p;
  const unsigned n = params.n;
  const Layout lay = layout_of(params);
  if (lay.dim == 0) throw InvalidInput("parameters give dim J = 0");

  const GModule J = jordan_module(p, n, BlockMultiset(lay.sizes.begin(), lay.sizes.end()));
  const std::size_t dim = lay.dim;
  const std::uint64_t top = ipow(p, n);

  // Dual coordinate of delta, the last basis vector of the X block.
  Vec phi(dim, 0);
  if (lay.has_x) phi[lay.sizes[0] - 1] = 1;

  GaloisDatum d;
  d.p = p;
  d.n = n;
  d.J = J;
  d.xi_in_F = params.xi_in_F;
  d.minus_one_is_norm = params.minus_one_is_norm;
  d.levels.resize(n + 1);

  std::vector<std::vector<std::size_t>> coords(n);
  for (unsigned i = 0; i < n; ++i) {
    coords[i] = image_coordinates(params, lay, i);
    const auto& idx = coords[i];
    LevelData& l = d.levels[i];
    const bool with_a = params.xi_in_F;
    const std::size_t di = idx.size() + (with_a ? 1 : 0);
    l.space = GModule(p, i, restrict_square(J.sigma(), idx, with_a));
    l.eps = FpMatrix(p, dim, di);
    for (std::size_t c = 0; c < idx.size(); ++c) l.eps.set(idx[c], c, 1);
    std::optional<Vec> a_row;
    if (with_a) a_row = phi;
    l.norm = select_rows(J.nilpotent_power(top - ipow(p, i)), idx, a_row);
    if (with_a) l.a_class = unit_vector(di, di - 1);
  }

  LevelData& top_level = d.levels[n];
  top_level.space = J;
  top_level.eps = FpMatrix::identity(p, dim);
  top_level.norm = FpMatrix::identity(p, dim);

  for (unsigned i = 1; i <= n; ++i) {
    for (unsigned j = 0; j < i; ++j) {
      if (i == n) {
        d.levels[n].inter_norm[j] = d.levels[j].norm;
        continue;
      }
      // eps-part: select_j o N^{p^i - p^j} o eps_i; a_i -> a_j.
      const FpMatrix shifted = J.nilpotent_power(ipow(p, i) - ipow(p, j)) * d.levels[i].eps;
      FpMatrix m = select_rows(shifted, coords[j], std::nullopt);
      if (params.xi_in_F) {
        FpMatrix with_a(p, m.rows() + 1, m.cols());
        for (std::size_t r = 0; r < m.rows(); ++r) {
          for (std::size_t c = 0; c < m.cols(); ++c) with_a.set(r, c, m(r, c));
        }
        with_a.set(m.rows(), m.cols() - 1, 1);
        m = std::move(with_a);
      }
      d.levels[i].inter_norm[j] = std::move(m);
    }
  }

  if (!params.shuffle_seed) return d;

  // Conjugate everything by independent basis changes on J and each J(K_i).
  const std::uint64_t seed = *params.shuffle_seed;
  std::vector<FpMatrix> change(n + 1);
  std::vector<FpMatrix> change_inv(n + 1);
  for (unsigned i = 0; i <= n; ++i) {
    const std::size_t di = d.levels[i].space.dim();
    change[i] = random_invertible(p, di, seed * 1000003ULL + i);
    change_inv[i] = *change[i].inverse();
  }
  const FpMatrix& P = change[n];
  const FpMatrix& Pinv = change_inv[n];
  GaloisDatum s = d;
  s.J = GModule(p, n, P * d.J.sigma() * Pinv);
  for (unsigned i = 0; i <= n; ++i) {
    const LevelData& src = d.levels[i];
    LevelData& dst = s.levels[i];
    if (i == n) {
      dst.space = s.J;
      dst.eps = src.eps;
      dst.norm = src.norm;
    } else {
      dst.space = GModule(p, i, change[i] * src.space.sigma() * change_inv[i]);
      dst.eps = P * src.eps * change_inv[i];
      dst.norm = change[i] * src.norm * Pinv;
    }
    for (auto& [j, m] : dst.inter_norm) m = change[j] * src.inter_norm.at(j) * change_inv[i];
    if (src.a_class) dst.a_class = change[i].apply(*src.a_class);
  }
  return s;
}

FpMatrix random_invertible(unsigned p, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (;;) {
    FpMatrix m(p, dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = 0; c < dim; ++c) m.set(r, c, static_cast<Scalar>(rng() % p));
    }
    if (m.rank() == dim) return m;
  }
}

SynthParams random_params(unsigned p, unsigned n, std::uint64_t seed, std::size_t dim_cap,
                          std::size_t rank_cap) {
  require_prime(p);
  if (n == 0) throw InvalidInput("n must be at least 1");
  std::mt19937_64 rng(seed);
  const bool p2n1 = p == 2 && n == 1;
  for (unsigned attempt = 0; attempt < 100000; ++attempt) {
    SynthParams out;
    out.p = p;
    out.n = n;
    out.xi_in_F = rng() % 2 == 1;
    if (p2n1 && out.xi_in_F) {
      out.minus_one_is_norm = rng() % 2 == 1;
      if (*out.minus_one_is_norm) out.m = Level::neg_infinity();
    } else if (out.xi_in_F) {
      out.m = Level(static_cast<int>(rng() % (n + 1)) - 1);
    }
    out.e.resize(n + 1);
    for (auto& ei : out.e) ei = rng() % (rank_cap + 1);
    if (out.m && !out.m->is_neg_infinity()) {
      auto& em = out.e[static_cast<unsigned>(out.m->value())];
      if (em == 0) em = 1 + rng() % rank_cap;
    }
    const std::size_t dim = layout_of(out).dim;
    if (dim >= 1 && dim <= dim_cap) return out;
  }
  throw InvalidInput("no legal parameters within the dimension cap");
}

std::vector<SynthParams> enumerate_params(unsigned p, unsigned n, std::size_t rank_cap,
                                          std::size_t dim_cap) {
  require_prime(p);
  // Case flags: (m, xi_in_F, minus_one_is_norm).
  struct Case {
    std::optional<Level> m;
    bool xi;
    std::optional<bool> minus_one;
  };
  std::vector<Case> cases{{std::nullopt, false, std::nullopt}};
  if (p == 2 && n == 1) {
    cases.push_back({std::nullopt, true, false});
    cases.push_back({Level::neg_infinity(), true, true});
  } else {
    for (const Level m : exceptional_range(n)) cases.push_back({m, true, std::nullopt});
  }

  std::vector<SynthParams> out;
  std::vector<std::size_t> e(n + 1, 0);
  for (;;) {
    for (const auto& c : cases) {
      SynthParams params{p, n, c.m, e, c.xi, c.minus_one, std::nullopt};
      if (c.m && !c.m->is_neg_infinity() && e[static_cast<unsigned>(c.m->value())] == 0) continue;
      const std::size_t dim = layout_of(params).dim;
      if (dim >= 1 && dim <= dim_cap) out.push_back(std::move(params));
    }
    std::size_t k = 0;
    while (k <= n && e[k] == rank_cap) e[k++] = 0;
    if (k > n) break;
    ++e[k];
  }
  return out;
}

}  // namespace galmod
