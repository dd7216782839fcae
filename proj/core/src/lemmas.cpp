#include "galmod/lemmas.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <string>

#include "galmod/errors.hpp"
#include "galmod/synth.hpp"

namespace galmod {

namespace {

std::string lvl(unsigned i) { return "level " + std::to_string(i); }

// s with v = s * a, or nullopt when v is off the line through a.
std::optional<Scalar> line_coefficient(std::span<const Scalar> v, const std::optional<Vec>& a,
                                       unsigned p) {
  if (!a) return is_zero(v) ? std::optional<Scalar>(0) : std::nullopt;
  std::size_t k = 0;
  while (k < a->size() && (*a)[k] == 0) ++k;
  const Scalar s = static_cast<Scalar>(static_cast<std::uint64_t>(v[k]) * inverse_mod((*a)[k], p) % p);
  if (scale(*a, s, p) != Vec(v.begin(), v.end())) return std::nullopt;
  return s;
}

class Collector {
 public:
  explicit Collector(Report& report) : report_(report) {}

  void check(const std::string& id, bool ok, const std::string& detail) {
    if (!ok) failures_[id].push_back(detail);
    checked_[id] += 1;
  }

  void finish(const std::string& id, const std::string& summary) {
    const auto it = failures_.find(id);
    if (it == failures_.end()) {
      report_.clauses.push_back({id, true, summary});
      return;
    }
    std::string detail = std::to_string(it->second.size()) + " of " +
                         std::to_string(checked_[id]) + " checks failed: " + it->second.front();
    report_.clauses.push_back({id, false, detail});
  }

 private:
  Report& report_;
  std::map<std::string, std::vector<std::string>> failures_;
  std::map<std::string, std::size_t> checked_;
};

void exact_sequence(const GaloisDatum& d, Collector& c) {
  for (unsigned i = 0; i < d.n; ++i) {
    const LevelData& l = d.levels[i];
    const FpSubspace fixed = fixed_points(d.J, i);
    const FpSubspace im_eps = image(l.eps);
    const FpMatrix restricted = l.norm * fixed.basis_matrix();
    const FpSubspace a_line =
        l.a_class ? FpSubspace::span(d.p, l.space.dim(), std::span<const Vec>(&*l.a_class, 1))
                  : FpSubspace::zero(d.p, l.space.dim());
    c.check("L.exact", kernel(l.eps) == a_line, lvl(i) + ": ker eps_i is not <a_i>");
    c.check("L.exact", image(fixed.basis_matrix(), kernel(restricted)) == im_eps,
            lvl(i) + ": kernel of the norm on J^{H_i} is not im eps_i");
    c.check("L.exact", a_line.contains(image(restricted)),
            lvl(i) + ": norm of J^{H_i} leaves <a_i>");
  }
  c.finish("L.exact", "exact at levels 0.." + std::to_string(d.n - 1));
}

void fixed_submodule(const GaloisDatum& d, Collector& c) {
  const FpSubspace jg = fixed_points(d.J, 0);
  const FpSubspace im0 = image(d.levels[0].eps);
  const bool nested = jg.contains(im0);
  c.check("L.fixed-submodule", nested, "im eps_0 not inside J^G");
  std::size_t extra = 0;
  if (nested) {
    extra = jg.dim() - im0.dim();
    const bool predicted = d.xi_in_F && xi_is_norm(d);
    c.check("L.fixed-submodule", extra <= 1, "dim J^G / im eps_0 = " + std::to_string(extra));
    c.check("L.fixed-submodule", (extra == 1) == predicted,
            "quotient dimension " + std::to_string(extra) + " but xi_p is " +
                (predicted ? "" : "not ") + "a norm");
    if (predicted && exceptional_hypotheses_hold(d)) {
      try {
        const Level m = exceptional_search(d).m;
        c.check("L.fixed-submodule", m.is_neg_infinity(),
                "fixed exceptional element present but m = " + m.to_string());
      } catch (const Error& e) {
        c.check("L.fixed-submodule", false, e.what());
      }
    }
  }
  c.finish("L.fixed-submodule", "dim J^G / im eps_0 = " + std::to_string(extra));
}

void norm_lemma(const GaloisDatum& d, Collector& c) {
  const std::uint64_t top = ipow(d.p, d.n);
  const auto& a0 = d.levels[0].a_class;
  const FpSubspace non_free = kernel(d.J.nilpotent_power(top - 1));
  for (const auto& z : non_free.basis()) {
    c.check("L.norm", line_coefficient(d.levels[0].norm.apply(z), a0, d.p).has_value(),
            "norm_0 of a non-free element is off <a_0>");
  }
  for (unsigned i = 1; i < d.n; ++i) {
    const LevelData& l = d.levels[i];
    const FpSubspace short_elements = kernel(d.J.nilpotent_power(top - ipow(d.p, i)));
    for (const auto& z : short_elements.basis()) {
      const auto s0 = line_coefficient(d.levels[0].norm.apply(z), a0, d.p);
      const auto si = line_coefficient(l.norm.apply(z), l.a_class, d.p);
      c.check("L.norm", si.has_value(), lvl(i) + ": norm_i of a short element is off <a_i>");
      c.check("L.norm", s0 == si, lvl(i) + ": Kummer exponents of norm_0 and norm_i differ");
    }
  }
  c.finish("L.norm", "norm classes on the Kummer line");
}

void proper_subfield(const GaloisDatum& d, Collector& c) {
  const FpMatrix& norm0 = d.levels[0].norm;
  for (unsigned i = 0; i < d.n; ++i) {
    const FpSubspace fixed = fixed_points(d.J, i);
    const FpSubspace trivial = image(fixed.basis_matrix(), kernel(norm0 * fixed.basis_matrix()));
    c.check("L.proper-subfield", trivial == subfield_image(d, i),
            lvl(i) + ": {z in J^{H_i} : norm_0 z = 0} != im eps_i");
  }
  c.finish("L.proper-subfield", "biconditional on J^{H_i} for i < n");
}

void submodule_subfield(const GaloisDatum& d, Collector& c) {
  try {
    const Decomposition dec = decompose(d);
    const FpSubspace u = y_module(dec, d, d.n);
    const std::uint64_t top = ipow(d.p, d.n);
    for (unsigned i = 0; i <= d.n; ++i) {
      const FpSubspace fixed = intersect(u, fixed_points(d.J, i));
      const FpMatrix& shift = d.J.nilpotent_power(top - ipow(d.p, i));
      c.check("L.submodule-subfield", fixed == image(shift, u),
              lvl(i) + ": U^{H_i} != N^{p^n-p^i} U");
      c.check("L.submodule-subfield", fixed == intersect(u, image(shift)),
              lvl(i) + ": U^{H_i} != U cap norm classes");
      c.check("L.submodule-subfield", fixed == intersect(u, subfield_image(d, i)),
              lvl(i) + ": U^{H_i} != U cap im eps_i");
    }
    c.finish("L.submodule-subfield", "free part of rank " + std::to_string(u.dim() / top));
  } catch (const Error& e) {
    c.check("L.submodule-subfield", false, std::string("decompose failed: ") + e.what());
    c.finish("L.submodule-subfield", "");
  }
}

void norm_equation(const GaloisDatum& d, const LemmaSuiteOptions& options, Collector& c) {
  std::optional<Level> m;
  if (exceptional_hypotheses_hold(d)) {
    try {
      m = exceptional_search(d).m;
    } catch (const Error&) {
    }
  }
  std::vector<Vec> samples = FpSubspace::full(d.p, d.J.dim()).basis();
  std::mt19937_64 rng(options.seed);
  const std::size_t index = d.J.nilpotency_index();
  for (std::size_t s = 0; s < options.samples; ++s) {
    Vec v(d.J.dim());
    for (auto& x : v) x = static_cast<Scalar>(rng() % d.p);
    samples.push_back(d.J.apply_nilpotent(v, index == 0 ? 0 : rng() % index));
  }
  const std::uint64_t top = ipow(d.p, d.n);
  std::size_t covered = 0;
  for (const auto& gamma : samples) {
    if (norm_equation_case(d, gamma, m) == NormEquationCase::none) continue;
    ++covered;
    const auto alpha = solve_norm_equation(d, gamma);
    c.check("L.norm-equation", alpha.has_value(), "no solution for a covered gamma");
    if (alpha) {
      const Vec target = d.J.apply_nilpotent(gamma, length(d.J, gamma) - 1);
      c.check("L.norm-equation", d.J.apply_nilpotent(*alpha, top - 1) == target,
              "returned alpha does not solve the equation");
    }
  }
  c.finish("L.norm-equation", std::to_string(covered) + " of " + std::to_string(samples.size()) +
                                  " samples covered by a lemma");
}

void minimal_length(const GaloisDatum& d, Report& report, Collector& c) {
  if (!exceptional_hypotheses_hold(d)) {
    report.notes.push_back("D.minimal-length skipped: exceptional hypotheses do not hold");
    return;
  }
  try {
    const ExceptionalReport rep = exceptional_search(d);
    const std::uint64_t pm = rep.m.p_power(d.p);
    const FpSubspace shorter = kernel(d.J.nilpotent_power(pm));
    c.check("D.minimal-length", (d.levels[0].norm * shorter.basis_matrix()).is_zero(),
            "an element of length <= p^m has nontrivial norm class");
    c.check("D.minimal-length", length(d.J, rep.delta) == pm + 1, "delta has the wrong length");
    const Vec shifted = add(rep.delta, d.J.apply_nilpotent(rep.delta), d.p);
    c.check("D.minimal-length", is_exceptional(d, rep.m, rep.delta) &&
                                    is_exceptional(d, rep.m, shifted) &&
                                    is_exceptional(d, rep.m, scale(rep.delta, d.p - 1, d.p)),
            "exceptionality not stable under unit multiples and N-translates");
    c.finish("D.minimal-length", "m = " + rep.m.to_string());
  } catch (const Error& e) {
    c.check("D.minimal-length", false, e.what());
    c.finish("D.minimal-length", "");
  }
}

}  // namespace

std::size_t length_under(const GaloisDatum& d, std::span<const Scalar> gamma,
                         std::uint64_t step) {
  const FpMatrix& power = d.J.nilpotent_power(step);
  Vec v(gamma.begin(), gamma.end());
  std::size_t k = 0;
  while (!is_zero(v)) {
    v = power.apply(v);
    ++k;
  }
  return k;
}

NormEquationCase norm_equation_case(const GaloisDatum& d, std::span<const Scalar> gamma,
                                    const std::optional<Level>& m) {
  if (is_zero(gamma)) return NormEquationCase::none;
  const unsigned p = d.p;
  const std::size_t l = length(d.J, gamma);
  const bool trivial_norm = is_zero(d.levels[0].norm.apply(gamma));

  if (p > 2 && d.n == 1 && l >= 2 && l < p) {
    if (!d.xi_in_F || l >= 3) return NormEquationCase::odd_height_one;
    if (m && !is_exceptional(d, *m, gamma)) return NormEquationCase::odd_height_one;
  }
  if (p == 2 && d.n == 2 && l == 3 && trivial_norm) return NormEquationCase::two_length_three;
  if (p > 2 && !subfield_image(d, d.n - 1).contains(gamma)) {
    const std::size_t lh = length_under(d, gamma, ipow(p, d.n - 1));
    if (!d.xi_in_F || lh >= 3 || (lh == 2 && trivial_norm)) return NormEquationCase::odd_lift;
  }
  if (p == 2 && d.n >= 2) {
    const std::size_t lh = length_under(d, gamma, ipow(2, d.n - 2));
    if (lh == 4 || (lh == 3 && trivial_norm)) return NormEquationCase::two_lift;
  }
  return NormEquationCase::none;
}

bool submodule_subfield_holds(const GModule& m, const FpSubspace& free_part) {
  const std::uint64_t top = m.group_order();
  for (unsigned i = 0; i <= m.height(); ++i) {
    const FpSubspace fixed = intersect(free_part, fixed_points(m, i));
    if (fixed != image(m.nilpotent_power(top - ipow(m.prime(), i)), free_part)) return false;
  }
  return true;
}

FreeSample random_free_sample(unsigned p, unsigned n, std::size_t dim_cap, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t top = ipow(p, n);
  const std::size_t max_rank = std::max<std::size_t>(1, dim_cap / top);
  const std::size_t rank = 1 + rng() % std::min<std::size_t>(max_rank, 3);
  BlockMultiset blocks(rank, top);
  std::size_t dim = rank * top;
  for (int tries = 0; tries < 4 && top > 1; ++tries) {
    const std::size_t size = 1 + rng() % (top - 1);
    if (dim + size > dim_cap) continue;
    blocks.push_back(size);
    dim += size;
  }
  std::sort(blocks.begin() + static_cast<std::ptrdiff_t>(rank), blocks.end(), std::greater<>());
  const GModule base = jordan_module(p, n, blocks);
  const FpMatrix change = random_invertible(p, dim, rng());
  std::vector<Vec> free_basis;
  for (std::size_t k = 0; k < rank * top; ++k) free_basis.push_back(change.column(k));
  return {GModule(p, n, change * base.sigma() * *change.inverse()),
          FpSubspace::span(p, dim, free_basis)};
}

Report lemma_suite(const GaloisDatum& d, const LemmaSuiteOptions& options) {
  Report report;
  if (const auto violations = validate(d); !violations.empty()) {
    throw InvalidInput("datum fails validation: " + violations.front().clause + ": " +
                       violations.front().detail);
  }
  Collector c(report);
  exact_sequence(d, c);
  fixed_submodule(d, c);
  norm_lemma(d, c);
  proper_subfield(d, c);
  submodule_subfield(d, c);
  norm_equation(d, options, c);
  minimal_length(d, report, c);
  return report;
}

}  // namespace galmod
