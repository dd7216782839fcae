#include <gtest/gtest.h>

#include "galmod/datum.hpp"
#include "galmod/errors.hpp"
#include "galmod/local_fields.hpp"
#include "galmod/synth.hpp"
#include "generators.hpp"

namespace galmod {
namespace {

using testing::Gen;

SynthParams params(unsigned p, unsigned n, std::optional<Level> m, std::vector<std::size_t> e) {
  SynthParams out;
  out.p = p;
  out.n = n;
  out.m = m;
  out.e = std::move(e);
  out.xi_in_F = m.has_value();
  if (p == 2 && n == 1 && out.xi_in_F) out.minus_one_is_norm = true;
  return out;
}

// n = 1, trivial action, every class comes from F and nothing is a norm.
GaloisDatum trivial_model(unsigned p, std::size_t dim) {
  GaloisDatum d;
  d.p = p;
  d.n = 1;
  d.J = GModule(p, 1, FpMatrix::identity(p, dim));
  LevelData base;
  base.space = GModule(p, 0, FpMatrix::identity(p, dim));
  base.eps = FpMatrix::identity(p, dim);
  base.norm = FpMatrix(p, dim, dim);
  LevelData top;
  top.space = d.J;
  top.eps = FpMatrix::identity(p, dim);
  top.norm = FpMatrix::identity(p, dim);
  top.inter_norm.emplace(0, FpMatrix(p, dim, dim));
  d.levels = {base, top};
  return d;
}

TEST(Level, OrderingAndArithmetic) {
  const Level ninf = Level::neg_infinity();
  EXPECT_LT(ninf, Level(0));
  EXPECT_LT(Level(0), Level(2));
  EXPECT_EQ(ninf.successor(), Level(0));
  EXPECT_EQ(Level(1).successor(), Level(2));
  EXPECT_EQ(ninf.p_power(3), 0u);
  EXPECT_EQ(Level(2).p_power(3), 9u);
  EXPECT_EQ(ninf.to_string(), "-inf");
  EXPECT_EQ(Level(4).to_string(), "4");
  EXPECT_THROW((void)ninf.value(), InvalidInput);
  EXPECT_EQ(exceptional_range(2), (std::vector<Level>{ninf, Level(0), Level(1)}));
}

TEST(Validate, SynthesizedDataAreClean) {
  EXPECT_TRUE(validate(synthesize(params(3, 2, Level(1), {1, 2, 1}))).empty());
  EXPECT_TRUE(validate(synthesize(params(2, 1, std::nullopt, {1, 1}))).empty());
}

TEST(Validate, ZeroedEpsIsCaught) {
  GaloisDatum d = synthesize(params(3, 1, Level::neg_infinity(), {1, 1}));
  LevelData& l = d.levels[0];
  l.eps = FpMatrix(3, l.eps.rows(), l.eps.cols());
  const auto v = validate(d);
  ASSERT_FALSE(v.empty());
  const bool names_eps_norm = std::any_of(v.begin(), v.end(), [](const Violation& x) {
    return x.clause == "eps-norm";
  });
  EXPECT_TRUE(names_eps_norm);
}

TEST(Validate, MissingKummerClassIsCaught) {
  GaloisDatum d = synthesize(params(3, 1, Level::neg_infinity(), {1, 1}));
  d.levels[0].a_class.reset();
  EXPECT_FALSE(validate(d).empty());
}

TEST(Validate, WrongLevelCountIsCaught) {
  GaloisDatum d = synthesize(params(3, 1, std::nullopt, {1, 1}));
  d.levels.pop_back();
  EXPECT_FALSE(validate(d).empty());
}

TEST(Validate, LocalDataAtTwoPrecisionsAreClean) {
  for (const std::size_t prec : {60u, 65u}) {
    const GaloisDatum d = build_datum(make_tower(3, TowerKind::cyclotomic, 1, prec));
    EXPECT_TRUE(validate(d).empty()) << prec;
  }
}

TEST(ERanks, TrivialModel) {
  const GaloisDatum d = trivial_model(3, 4);
  ASSERT_TRUE(validate(d).empty());
  EXPECT_EQ(e_ranks(d), (std::vector<std::size_t>{4, 0}));
}

TEST(ERanks, SynthesizedAndLocal) {
  EXPECT_EQ(e_ranks(synthesize(params(3, 1, Level::neg_infinity(), {1, 1}))),
            (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(e_ranks(build_datum(make_tower(3, TowerKind::unramified, 1, 40))),
            (std::vector<std::size_t>{1, 1}));
}

TEST(ExceptionalSearch, MinusInfinityHasLengthOne) {
  const GaloisDatum d = synthesize(params(3, 1, Level::neg_infinity(), {1, 1}));
  const ExceptionalReport r = exceptional_search(d);
  EXPECT_TRUE(r.m.is_neg_infinity());
  EXPECT_EQ(length(d.J, r.delta), 1u);
  EXPECT_TRUE(is_exceptional(d, r.m, r.delta));
}

TEST(ExceptionalSearch, LevelOneHasLengthFour) {
  const GaloisDatum d = synthesize(params(3, 2, Level(1), {1, 1, 1}));
  const ExceptionalReport r = exceptional_search(d);
  EXPECT_EQ(r.m, Level(1));
  EXPECT_EQ(length(d.J, r.delta), 4u);
  EXPECT_FALSE(is_zero(r.norm_class));
}

TEST(ExceptionalSearch, NeedsXiInF) {
  EXPECT_THROW((void)exceptional_search(synthesize(params(3, 1, std::nullopt, {1, 1}))),
               HypothesisNotMet);
}

TEST(Theorem3, SynthesizedLevelZero) {
  const GaloisDatum d = synthesize(params(3, 2, Level(0), {1, 1, 1}));
  EXPECT_EQ(i_via_theorem3(d), Level(0));
  EXPECT_EQ(exceptional_search(d).m, Level(0));
}

TEST(Theorem3, CyclotomicTowerAgrees) {
  const GaloisDatum d = build_datum(make_tower(3, TowerKind::cyclotomic, 1, 60));
  EXPECT_EQ(i_via_theorem3(d), exceptional_search(d).m);
}

TEST(Restrict, LevelZeroIsIdentity) {
  const GaloisDatum d = synthesize(params(3, 2, Level(1), {1, 1, 1}));
  EXPECT_EQ(restrict_to(d, 0), d);
  EXPECT_THROW((void)restrict_to(d, 2), InvalidInput);
}

TEST(Restrict, ShiftsTheExceptionalLevel) {
  const GaloisDatum d = synthesize(params(3, 2, Level(1), {1, 1, 1}));
  const GaloisDatum r = restrict_to(d, 1);
  EXPECT_TRUE(validate(r).empty());
  EXPECT_EQ(r.n, 1u);
  EXPECT_EQ(exceptional_search(r).m, Level(0));

  const GaloisDatum e = synthesize(params(3, 2, Level::neg_infinity(), {1, 1, 1}));
  EXPECT_TRUE(exceptional_search(restrict_to(e, 1)).m.is_neg_infinity());
}

TEST(SolveNormEquation, Examples) {
  const GaloisDatum d = synthesize(params(3, 1, std::nullopt, {1, 1}));
  EXPECT_FALSE(solve_norm_equation(d, Vec(d.J.dim(), 0)));

  // The free generator is its own witness.
  const FpSubspace free = image(d.J.nilpotent_power(2));
  ASSERT_EQ(free.dim(), 1u);
  Vec gen;
  for (std::size_t k = 0; k < d.J.dim(); ++k) {
    const Vec u = unit_vector(d.J.dim(), k);
    if (length(d.J, u) == 3) {
      gen = u;
      break;
    }
  }
  ASSERT_FALSE(gen.empty());
  EXPECT_EQ(*solve_norm_equation(d, gen), gen);
}

TEST(SolveNormEquation, UnexceptionalLengthTwo) {
  Gen g(5);
  SynthParams sp = params(3, 1, Level(0), {2, 2});
  sp.shuffle_seed = 7;
  const GaloisDatum d = synthesize(sp);
  const Level m = exceptional_search(d).m;
  std::size_t found = 0;
  for (int t = 0; t < 400 && found < 10; ++t) {
    const Vec gamma = g.vec(3, d.J.dim());
    if (length(d.J, gamma) != 2 || is_exceptional(d, m, gamma)) continue;
    ++found;
    const auto alpha = solve_norm_equation(d, gamma);
    ASSERT_TRUE(alpha);
    EXPECT_EQ(d.J.apply_nilpotent(*alpha, 2), d.J.apply_nilpotent(gamma, 1));
  }
  EXPECT_GT(found, 0u);
}

TEST(XiIsNorm, MatchesFixedQuotient) {
  const GaloisDatum ninf = synthesize(params(3, 1, Level::neg_infinity(), {1, 1}));
  const GaloisDatum zero = synthesize(params(3, 1, Level(0), {1, 1}));
  EXPECT_TRUE(xi_is_norm(ninf));
  EXPECT_FALSE(xi_is_norm(zero));
}

// Structural axioms re-checked directly on random synthesized data.
TEST(DatumProperty, AxiomsHoldOnRandomData) {
  for (const unsigned p : {2u, 3u, 5u}) {
    for (unsigned n = 1; n <= 3; ++n) {
      for (std::uint64_t seed = 0; seed < 12; ++seed) {
        SynthParams sp = random_params(p, n, seed, 60, 2);
        sp.shuffle_seed = seed + 100;
        const GaloisDatum d = synthesize(sp);
        ASSERT_TRUE(validate(d).empty());
        const std::uint64_t top = ipow(p, n);
        for (unsigned i = 0; i <= n; ++i) {
          const LevelData& l = d.levels[i];
          EXPECT_EQ(l.eps * l.norm, d.J.nilpotent_power(top - ipow(p, i)));
          EXPECT_EQ(l.eps * l.space.sigma(), d.J.sigma() * l.eps);
          EXPECT_EQ(l.norm * d.J.sigma(), l.space.sigma() * l.norm);
          EXPECT_TRUE(fixed_points(d.J, i).contains(image(l.eps)));
          for (const auto& [j, m] : l.inter_norm) EXPECT_EQ(m * l.norm, d.levels[j].norm);
          if (l.a_class) EXPECT_TRUE(is_zero(l.eps.apply(*l.a_class)));
        }
        const auto e = e_ranks(d);
        EXPECT_EQ(e, sp.e);
        if (exceptional_hypotheses_hold(d)) {
          EXPECT_EQ(exceptional_search(d).m, i_via_theorem3(d));
        }
      }
    }
  }
}

}  // namespace
}  // namespace galmod
