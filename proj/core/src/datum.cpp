#include "galmod/datum.hpp"

#include <string>

#include "galmod/errors.hpp"

namespace galmod {

int Level::value() const {
  if (is_neg_infinity()) throw InvalidInput("level -inf has no finite value");
  return value_;
}

std::uint64_t Level::p_power(unsigned p) const {
  return is_neg_infinity() ? 0 : ipow(p, static_cast<unsigned>(value_));
}

std::string Level::to_string() const {
  return is_neg_infinity() ? std::string("-inf") : std::to_string(value_);
}

std::vector<Level> exceptional_range(unsigned top) {
  std::vector<Level> out{Level::neg_infinity()};
  for (unsigned i = 0; i < top; ++i) out.emplace_back(static_cast<int>(i));
  return out;
}

namespace {

std::string lvl(unsigned i) { return "level " + std::to_string(i); }

bool shape_ok(const GaloisDatum& d, std::vector<Violation>& out) {
  const std::size_t dj = d.J.dim();
  if (d.J.prime() != d.p || d.J.height() != d.n) {
    out.push_back({"shape", "J is not a module for a group of order p^n"});
    return false;
  }
  if (d.levels.size() != d.n + 1) {
    out.push_back({"shape", "expected " + std::to_string(d.n + 1) + " levels"});
    return false;
  }
  bool ok = true;
  for (unsigned i = 0; i <= d.n; ++i) {
    const LevelData& l = d.levels[i];
    const std::size_t di = l.space.dim();
    if (l.space.prime() != d.p || l.space.height() != i) {
      out.push_back({"shape", lvl(i) + ": space is not a G/H_i-module"});
      ok = false;
    }
    if (l.eps.rows() != dj || l.eps.cols() != di || l.norm.rows() != di || l.norm.cols() != dj) {
      out.push_back({"shape", lvl(i) + ": eps/norm have wrong shape"});
      ok = false;
    }
    for (unsigned j = 0; j < i; ++j) {
      auto it = l.inter_norm.find(j);
      if (it == l.inter_norm.end()) {
        out.push_back({"shape", lvl(i) + ": missing inter_norm to level " + std::to_string(j)});
        ok = false;
      } else if (it->second.rows() != d.levels[j].space.dim() || it->second.cols() != di) {
        out.push_back({"shape", lvl(i) + ": inter_norm to level " + std::to_string(j) +
                                    " has wrong shape"});
        ok = false;
      }
    }
    const bool want_a = d.xi_in_F && i < d.n;
    if (want_a != l.a_class.has_value()) {
      out.push_back({"a-class", lvl(i) + (want_a ? ": missing a_class" : ": unexpected a_class")});
      ok = false;
    } else if (l.a_class && l.a_class->size() != di) {
      out.push_back({"shape", lvl(i) + ": a_class has wrong length"});
      ok = false;
    }
  }
  return ok;
}

FpSubspace span_of(unsigned p, std::size_t dim, const std::optional<Vec>& v) {
  if (!v) return FpSubspace::zero(p, dim);
  return FpSubspace::span(p, dim, std::span<const Vec>(&*v, 1));
}

}  // namespace

std::vector<Violation> validate(const GaloisDatum& d) {
  std::vector<Violation> out;
  if (!shape_ok(d, out)) return out;
  const unsigned p = d.p;
  const std::size_t dj = d.J.dim();
  const std::uint64_t top = ipow(p, d.n);

  const LevelData& last = d.levels[d.n];
  if (!(last.space == d.J) || last.eps != FpMatrix::identity(p, dj) ||
      last.norm != FpMatrix::identity(p, dj)) {
    out.push_back({"top-level", "level n must be J with identity eps and norm"});
  }

  for (unsigned i = 0; i <= d.n; ++i) {
    const LevelData& l = d.levels[i];
    const std::size_t di = l.space.dim();
    if (l.eps * l.space.sigma() != d.J.sigma() * l.eps) {
      out.push_back({"equivariance", lvl(i) + ": eps does not commute with sigma"});
    }
    if (l.norm * d.J.sigma() != l.space.sigma() * l.norm) {
      out.push_back({"equivariance", lvl(i) + ": norm does not commute with sigma"});
    }
    const FpSubspace im_eps = image(l.eps);
    const FpSubspace fixed = fixed_points(d.J, i);
    if (!fixed.contains(im_eps)) {
      out.push_back({"eps-fixed", lvl(i) + ": image of eps not inside J^{H_i}"});
    }
    if (l.eps * l.norm != d.J.nilpotent_power(top - ipow(p, i))) {
      out.push_back({"eps-norm", lvl(i) + ": eps o norm differs from (sigma-1)^(p^n-p^i)"});
    }
    const FpSubspace a_line = span_of(p, di, l.a_class);
    if (kernel(l.eps) != a_line) {
      out.push_back({"kernel", lvl(i) + ": kernel of eps is not the Kummer line"});
    }
    if (l.a_class && l.space.sigma().apply(*l.a_class) != *l.a_class) {
      out.push_back({"a-class", lvl(i) + ": a_class is not G-fixed"});
    }
    for (const auto& [j, m] : l.inter_norm) {
      if (j >= i) {
        out.push_back({"inter-norm", lvl(i) + ": inter_norm to a level not below"});
        continue;
      }
      const LevelData& lj = d.levels[j];
      if (lj.norm != m * l.norm) {
        out.push_back({"inter-norm", lvl(i) + " -> " + std::to_string(j) + ": norm coherence fails"});
      }
      if (m * l.space.sigma() != lj.space.sigma() * m) {
        out.push_back({"inter-norm", lvl(i) + " -> " + std::to_string(j) + ": not equivariant"});
      }
      if (l.a_class && lj.a_class && m.apply(*l.a_class) != *lj.a_class) {
        out.push_back({"a-class", lvl(i) + " -> " + std::to_string(j) + ": norm of a_i is not a_j"});
      }
    }
    if (i < d.n) {
      // Exactness at J^{H_i}: fixed vectors with trivial norm class are exactly im eps_i,
      // and every fixed vector has norm class in <a_i>.
      const FpMatrix restricted = l.norm * fixed.basis_matrix();
      const FpSubspace trivial_norm = image(fixed.basis_matrix(), kernel(restricted));
      if (trivial_norm != im_eps) {
        out.push_back({"exactness", lvl(i) + ": {x in J^{H_i} : norm_i x = 0} != im eps_i"});
      }
      if (!a_line.contains(image(restricted))) {
        out.push_back({"exactness", lvl(i) + ": norm_i of a fixed vector leaves <a_i>"});
      }
    }
  }

  const FpSubspace jg = fixed_points(d.J, 0);
  const FpSubspace im0 = image(d.levels[0].eps);
  if (jg.contains(im0)) {
    const std::size_t extra = jg.dim() - im0.dim();
    const bool exceptional_fixed = !(d.levels[0].norm * jg.basis_matrix()).is_zero();
    if (extra > 1 || (extra == 1) != exceptional_fixed) {
      out.push_back({"fixed-submodule", "dim J^G / im eps_0 = " + std::to_string(extra) +
                                            " does not match the fixed exceptional case"});
    }
  }

  if (d.minus_one_is_norm && d.p == 2 && d.n == 1 && d.xi_in_F &&
      *d.minus_one_is_norm != xi_is_norm(d)) {
    out.push_back({"minus-one", "minus_one_is_norm contradicts the norm image on J^G"});
  }
  return out;
}

FpSubspace subfield_image(const GaloisDatum& d, unsigned level) {
  if (level > d.n) throw InvalidInput("level out of range");
  return image(d.levels[level].eps);
}

FpSubspace norm_image(const GaloisDatum& d, unsigned level) {
  if (level > d.n) throw InvalidInput("level out of range");
  const std::uint64_t shift = ipow(d.p, level) - 1;
  return image(d.J.nilpotent_power(shift), subfield_image(d, level));
}

std::vector<std::size_t> e_ranks(const GaloisDatum& d) {
  std::vector<FpSubspace> v;
  for (unsigned i = 0; i <= d.n; ++i) v.push_back(norm_image(d, i));
  std::vector<std::size_t> e(d.n + 1);
  for (unsigned i = 0; i < d.n; ++i) {
    if (!v[i].contains(v[i + 1])) throw InvalidInput("filtration not nested");
    e[i] = v[i].dim() - v[i + 1].dim();
  }
  e[d.n] = v[d.n].dim();
  return e;
}

bool exceptional_hypotheses_hold(const GaloisDatum& d) {
  if (!d.xi_in_F) return false;
  if (d.p == 2 && d.n == 1) return d.minus_one_is_norm.value_or(false);
  return true;
}

namespace {

// Candidate set S_level.
FpSubspace candidates(const GaloisDatum& d, Level level) {
  if (level.is_neg_infinity()) return kernel(d.J.nilpotent());
  return preimage(d.J.nilpotent(), subfield_image(d, static_cast<unsigned>(level.value())));
}

}  // namespace

bool is_exceptional(const GaloisDatum& d, Level m, std::span<const Scalar> z) {
  if (is_zero(d.levels[0].norm.apply(z))) return false;
  return candidates(d, m).contains(z);
}

std::optional<ExceptionalReport> find_exceptional(const GaloisDatum& d) {
  const FpMatrix& norm0 = d.levels[0].norm;
  for (const Level level : exceptional_range(d.n)) {
    const FpSubspace s = candidates(d, level);
    const Vec* first = nullptr;
    for (const auto& b : s.basis()) {
      if (!is_zero(norm0.apply(b))) {
        first = &b;
        break;
      }
    }
    if (first == nullptr) continue;

    // Shorten delta by elements of S with trivial norm class.
    const FpSubspace trivial = intersect(s, kernel(norm0));
    const FpMatrix basis = trivial.basis_matrix();
    Vec delta = *first;
    for (std::size_t k = 0; k <= d.J.nilpotency_index(); ++k) {
      const FpMatrix& nk = d.J.nilpotent_power(k);
      if (auto c = solve(nk * basis, nk.apply(delta))) {
        delta = sub(delta, basis.apply(*c), d.p);
        break;
      }
    }
    return ExceptionalReport{level, delta, norm0.apply(delta)};
  }
  return std::nullopt;
}

ExceptionalReport exceptional_search(const GaloisDatum& d) {
  if (!d.xi_in_F) throw HypothesisNotMet("exceptional elements need xi_p in F");
  if (d.p == 2 && d.n == 1 && !d.minus_one_is_norm.value_or(false)) {
    throw HypothesisNotMet("p = 2, n = 1 requires -1 to be a norm");
  }
  auto report = find_exceptional(d);
  if (!report) throw InternalInconsistency("no exceptional element found");
  const std::uint64_t expected = report->m.p_power(d.p) + 1;
  if (length(d.J, report->delta) != expected) {
    throw InternalInconsistency("exceptional element has length " +
                                std::to_string(length(d.J, report->delta)) + ", expected " +
                                std::to_string(expected));
  }
  return *report;
}

Level i_via_theorem3(const GaloisDatum& d) {
  if (!exceptional_hypotheses_hold(d)) {
    throw HypothesisNotMet("i(K/F) is defined only under the exceptional-element hypotheses");
  }
  for (const Level s : exceptional_range(d.n)) {
    const auto t = static_cast<unsigned>(s.successor().value());
    const FpSubspace fixed = fixed_points(d.J, t);
    if (!(d.levels[t].norm * fixed.basis_matrix()).is_zero()) return s;
  }
  throw InternalInconsistency("no level qualifies in the third characterization");
}

bool xi_is_norm(const GaloisDatum& d) {
  if (!d.xi_in_F) return false;
  const FpSubspace jg = fixed_points(d.J, 0);
  return !(d.levels[0].norm * jg.basis_matrix()).is_zero();
}

GaloisDatum restrict_to(const GaloisDatum& d, unsigned j) {
  if (j >= d.n) {
    throw InvalidInput("restrict: level " + std::to_string(j) + " out of range 0.." +
                       std::to_string(d.n - 1));
  }
  if (j == 0) return d;
  const std::uint64_t step = ipow(d.p, j);
  GaloisDatum out;
  out.p = d.p;
  out.n = d.n - j;
  out.J = GModule(d.p, out.n, d.J.sigma().pow(step));
  out.xi_in_F = d.xi_in_F;
  for (unsigned k = 0; k <= out.n; ++k) {
    const LevelData& src = d.levels[j + k];
    LevelData l;
    l.space = k == out.n ? out.J : GModule(d.p, k, src.space.sigma().pow(step));
    l.eps = src.eps;
    l.norm = src.norm;
    l.a_class = src.a_class;
    for (const auto& [from, m] : src.inter_norm) {
      if (from >= j) l.inter_norm.emplace(from - j, m);
    }
    out.levels.push_back(std::move(l));
  }
  if (out.p == 2 && out.n == 1 && out.xi_in_F) out.minus_one_is_norm = xi_is_norm(out);
  return out;
}

std::optional<Vec> solve_norm_equation(const GaloisDatum& d, std::span<const Scalar> gamma) {
  if (is_zero(gamma)) return std::nullopt;
  const std::size_t l = length(d.J, gamma);
  const std::uint64_t top = ipow(d.p, d.n);
  if (l == top) return Vec(gamma.begin(), gamma.end());
  const Vec target = d.J.apply_nilpotent(gamma, l - 1);
  return solve(d.J.nilpotent_power(top - 1), target);
}

}  // namespace galmod
