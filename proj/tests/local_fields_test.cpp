#include <gtest/gtest.h>

#include "galmod/decompose.hpp"
#include "galmod/errors.hpp"
#include "galmod/local_fields.hpp"

namespace galmod {
namespace {

std::size_t classical_dim(const TowerSpec& spec, unsigned level) {
  const std::size_t degree =
      ipow(spec.p, level) * (spec.kind == TowerKind::cyclotomic ? spec.p - 1 : 1);
  return degree + 1 + (spec.kind == TowerKind::cyclotomic ? 1 : 0);
}

class Towers : public ::testing::Test {
 protected:
  static const LocalTower& unramified() {
    static const LocalTower t = make_tower(3, TowerKind::unramified, 1, 40);
    return t;
  }
  static const LocalTower& zeta9() {
    static const LocalTower t = make_tower(3, TowerKind::cyclotomic, 1, 60);
    return t;
  }
  static const LocalTower& zeta27() {
    static const LocalTower t = make_tower(3, TowerKind::cyclotomic, 2, 62);
    return t;
  }
};

TEST_F(Towers, UnramifiedFrobeniusHasOrderThree) {
  const LocalTower& t = unramified();
  EXPECT_EQ(t.degree(), 3u);
  EXPECT_EQ(t.ramification(), 1u);
  const LFElement x = t.generator();
  EXPECT_FALSE(t.equal(t.galois(x, 1), x));
  EXPECT_TRUE(t.equal(t.galois(x, 3), x));
}

TEST_F(Towers, CyclotomicSigmaActsOnZeta) {
  const LocalTower& t = zeta9();
  EXPECT_EQ(t.degree(), 6u);
  const LFElement z = t.zeta();
  EXPECT_TRUE(t.equal(t.galois(z, 1), t.pow(z, 4)));
  EXPECT_TRUE(t.equal(t.galois(z, 3), z));
  EXPECT_TRUE(t.equal(t.pow(z, 9), t.one()));
  EXPECT_FALSE(t.equal(t.pow(z, 3), t.one()));
}

TEST(Tower, RejectsUnsupportedConfigurations) {
  EXPECT_THROW((void)make_tower(2, TowerKind::cyclotomic, 2, 40), InvalidInput);
  EXPECT_THROW((void)make_tower(2, TowerKind::unramified, 1, 20), InvalidInput);
  EXPECT_THROW((void)make_tower(3, TowerKind::cyclotomic, 1, 10), PrecisionError);
  EXPECT_THROW((void)make_tower(3, TowerKind::unramified, 1, 45), PrecisionError);
  EXPECT_THROW((void)make_tower(3, TowerKind::unramified, 0, 20), InvalidInput);
  EXPECT_THROW((void)tower_kind_from_string("eisenstein"), InvalidInput);
  EXPECT_EQ(tower_kind_from_string("cyclotomic"), TowerKind::cyclotomic);
}

TEST_F(Towers, InverseAndProducts) {
  for (const LocalTower* t : {&unramified(), &zeta9(), &zeta27()}) {
    const LFElement x = t->add(t->generator(), t->from_int(2));
    EXPECT_TRUE(t->equal(t->mul(x, t->inv(x)), t->one()));
    const LFElement y = t->uniformizer();
    EXPECT_TRUE(t->equal(t->div(t->mul(x, y), y), x));
    EXPECT_EQ(t->valuation(t->pow(y, 5)), 5);
  }
}

TEST_F(Towers, BinomialValuationPattern) {
  // (1 + pi)^3 - 1 = 3 pi + 3 pi^2 + pi^3 with v(3) = e = 6, so the pi^3 term dominates.
  const LocalTower& t = zeta9();
  const LFElement one_plus = t.add(t.one(), t.uniformizer());
  EXPECT_EQ(t.valuation(t.sub(t.pow(one_plus, 3), t.one())), 3);
  EXPECT_EQ(t.valuation(t.from_int(3)), 6);
}

TEST_F(Towers, NormsAreFixed) {
  for (const LocalTower* t : {&unramified(), &zeta9(), &zeta27()}) {
    const LFElement x = t->add(t->generator(), t->from_int(5));
    const LFElement nx = t->norm(x, t->height(), 0);
    EXPECT_TRUE(t->lies_in_level(nx, 0));
    EXPECT_FALSE(t->lies_in_level(x, 0));
  }
}

TEST_F(Towers, NormTransitivity) {
  const LocalTower& t = zeta27();
  const LFElement x = t.add(t.generator(), t.from_int(7));
  EXPECT_TRUE(t.equal(t.norm(t.norm(x, 2, 1), 1, 0), t.norm(x, 2, 0)));
}

TEST_F(Towers, FrobeniusOnTeichmullerDigit) {
  const LocalTower& t = unramified();
  LFElement w = t.add(t.generator(), t.from_int(1));
  for (unsigned k = 0; k < t.digits(); ++k) w = t.pow(w, 27);
  EXPECT_TRUE(t.equal(t.galois(w, 1), t.pow(w, 3)));
}

TEST_F(Towers, PthPowersHaveTrivialClass) {
  for (const LocalTower* t : {&unramified(), &zeta9()}) {
    const LFElement v = t->add(t->generator(), t->from_int(4));
    const Vec c = t->class_of(t->height(), t->pow(v, 3));
    EXPECT_TRUE(is_zero(c));
    EXPECT_FALSE(is_zero(t->class_of(t->height(), v)));
    const auto root = t->pth_root(t->pow(v, 3));
    ASSERT_TRUE(root);
    EXPECT_TRUE(t->equal(t->pow(*root, 3), t->pow(v, 3)));
  }
}

TEST_F(Towers, ClassDimensions) {
  EXPECT_EQ(unramified().class_dim(1), 4u);
  EXPECT_EQ(zeta9().class_dim(1), 8u);
  EXPECT_FALSE(is_zero(zeta9().class_of(1, zeta9().zeta())));
  for (const LocalTower* t : {&unramified(), &zeta9(), &zeta27()}) {
    for (unsigned i = 0; i <= t->height(); ++i) {
      EXPECT_EQ(t->class_dim(i), classical_dim(t->spec(), i)) << to_string(t->kind()) << i;
      const auto& reps = t->class_representatives(i);
      for (std::size_t k = 0; k < reps.size(); ++k) {
        EXPECT_EQ(t->class_of(i, reps[k]), unit_vector(reps.size(), k));
      }
    }
  }
}

TEST_F(Towers, ClassOfIsAHomomorphism) {
  const LocalTower& t = zeta9();
  const LFElement x = t.add(t.generator(), t.from_int(2));
  const LFElement y = t.add(t.pow(t.generator(), 2), t.from_int(1));
  EXPECT_EQ(t.class_of(1, t.mul(x, y)), add(t.class_of(1, x), t.class_of(1, y), 3));
}

TEST_F(Towers, KummerGenerators) {
  const LocalTower& t = zeta27();
  const auto a = t.kummer_generators();
  ASSERT_EQ(a.size(), 2u);
  // a_1 then a_0; N(a_1) and a_0 agree up to p-th powers in F.
  EXPECT_EQ(t.class_of(0, t.norm(a[0], 1, 0)), t.class_of(0, a[1]));
  EXPECT_TRUE(is_zero(t.class_of(2, a[0])));
  EXPECT_FALSE(is_zero(t.class_of(1, a[0])));
  EXPECT_THROW((void)unramified().kummer_generators(), InvalidInput);

  const auto a1 = zeta9().kummer_generators();
  ASSERT_EQ(a1.size(), 1u);
  EXPECT_TRUE(is_zero(zeta9().class_of(1, a1[0])));
  EXPECT_FALSE(is_zero(zeta9().class_of(0, a1[0])));
}

TEST_F(Towers, DatumPipelines) {
  const GaloisDatum u = build_datum(unramified());
  ASSERT_TRUE(validate(u).empty());
  EXPECT_EQ(u.J.dim(), 4u);
  EXPECT_EQ(e_ranks(u), (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(summand_sizes(decompose(u), 3), (BlockMultiset{3, 1}));

  const GaloisDatum c = build_datum(zeta9());
  ASSERT_TRUE(validate(c).empty());
  const Decomposition dec = decompose(c);
  ASSERT_TRUE(dec.theorem2());
  EXPECT_EQ(x_module(dec, c).dim(), dec.m->p_power(3) + 1);
  EXPECT_EQ(exceptional_search(c).m, i_via_theorem3(c));
}

TEST_F(Towers, ExtractedMatricesSatisfyTheNormIdentities) {
  for (const LocalTower* t : {&unramified(), &zeta9(), &zeta27()}) {
    const GaloisDatum d = build_datum(*t);
    const std::uint64_t top = ipow(d.p, d.n);
    for (unsigned i = 0; i <= d.n; ++i) {
      const LevelData& l = d.levels[i];
      EXPECT_EQ(l.eps * l.norm, d.J.nilpotent_power(top - ipow(d.p, i)));
      for (const auto& [j, m] : l.inter_norm) EXPECT_EQ(m * l.norm, d.levels[j].norm);
    }
  }
}

TEST(TowerPrecision, DatumIsStable) {
  const std::pair<TowerSpec, std::size_t> cases[] = {
      {{3, TowerKind::unramified, 1, 35}, 40},
      {{3, TowerKind::cyclotomic, 1, 60}, 65},
      {{2, TowerKind::cyclotomic, 1, 20}, 25},
  };
  for (const auto& [spec, higher] : cases) {
    TowerSpec other = spec;
    other.precision = higher;
    EXPECT_EQ(build_datum(LocalTower(spec)), build_datum(LocalTower(other))) << to_string(spec.kind);
  }
}

TEST(TowerP2, MinusOneFlagIsDerived) {
  const GaloisDatum d = build_datum(make_tower(2, TowerKind::cyclotomic, 1, 20));
  ASSERT_TRUE(d.minus_one_is_norm);
  EXPECT_EQ(*d.minus_one_is_norm, xi_is_norm(d));
  EXPECT_TRUE(validate(d).empty());
}

TEST_F(Towers, RootNormFixedAlpha) {
  const LocalTower& t = zeta9();
  const LFElement alpha = t.from_int(7);
  EXPECT_TRUE(root_norm_crosscheck(t, alpha, t.one(), t.one(), 0));
}

TEST_F(Towers, RootNormKummerRoot) {
  const LocalTower& t = zeta9();
  const LFElement a0 = t.kummer_generators().front();
  const auto alpha = t.pth_root(a0);
  ASSERT_TRUE(alpha);
  const LFElement gamma = t.div(t.galois(*alpha, 1), *alpha);
  EXPECT_TRUE(t.lies_in_level(gamma, 0));
  EXPECT_TRUE(root_norm_crosscheck(t, *alpha, gamma, t.one(), 0));
}

TEST_F(Towers, RootNormSamples) {
  const LocalTower& t = zeta27();
  const GaloisDatum d = build_datum(t);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const unsigned level = static_cast<unsigned>(s % 2);
    const NormcondSample sample = sample_normcond(t, d, level, s);
    EXPECT_TRUE(root_norm_crosscheck(t, sample.alpha, sample.gamma, sample.k, level)) << s;
  }
}

TEST_F(Towers, RootNormNegativeControl) {
  const LocalTower& t = zeta27();
  const GaloisDatum d = build_datum(t);
  std::size_t rejected = 0;
  for (std::uint64_t s = 0; s < 6; ++s) {
    const NormcondSample sample = sample_normcond(t, d, 0, s);
    const LFElement bad_k = t.mul(sample.k, t.uniformizer());
    try {
      if (!root_norm_crosscheck(t, sample.alpha, sample.gamma, bad_k, 0)) ++rejected;
    } catch (const InvalidInput&) {
      ++rejected;
    }
  }
  EXPECT_EQ(rejected, 6u);
  EXPECT_THROW((void)root_norm_crosscheck(t, t.generator(), t.one(), t.one(), 0), InvalidInput);
}

}  // namespace
}  // namespace galmod
