#include <gtest/gtest.h>

#include "galmod/errors.hpp"
#include "galmod/fp_linalg.hpp"
#include "generators.hpp"

namespace galmod {
namespace {

using testing::Gen;

FpSubspace line(unsigned p, Vec v) { return FpSubspace::span(p, v.size(), std::vector<Vec>{v}); }

TEST(FpMatrix, EntriesAreReduced) {
  const FpMatrix m = FpMatrix::from_rows(5, {{7, -1}, {10, 4}});
  EXPECT_EQ(m(0, 0), 2u);
  EXPECT_EQ(m(0, 1), 4u);
  EXPECT_EQ(m(1, 0), 0u);
}

TEST(FpMatrix, RejectsCompositeModulus) {
  EXPECT_THROW(FpMatrix(4, 2, 2), InvalidInput);
  EXPECT_THROW(FpMatrix(1, 2, 2), InvalidInput);
}

TEST(FpMatrix, ProductShapeMismatchThrows) {
  EXPECT_THROW((void)(FpMatrix(3, 2, 3) * FpMatrix(3, 2, 3)), DimensionMismatch);
  EXPECT_THROW((void)(FpMatrix(3, 2, 2) * FpMatrix(5, 2, 2)), DimensionMismatch);
}

TEST(Solve, IdentityCase) {
  const auto x = solve(FpMatrix::identity(3, 2), Vec{2, 1});
  ASSERT_TRUE(x);
  EXPECT_EQ(*x, (Vec{2, 1}));
}

TEST(Solve, UpperTriangular) {
  const auto x = solve(FpMatrix::from_rows(3, {{1, 1}, {0, 1}}), Vec{2, 1});
  ASSERT_TRUE(x);
  EXPECT_EQ(*x, (Vec{1, 1}));
}

TEST(Solve, ZeroMapHasNoSolution) {
  EXPECT_FALSE(solve(FpMatrix(2, 2, 2), Vec{1, 0}));
}

TEST(Subspace, TransverseLinesIntersectInZero) {
  EXPECT_EQ(intersect(line(2, {1, 0}), line(2, {0, 1})).dim(), 0u);
}

TEST(Subspace, CoordinateComplement) {
  EXPECT_EQ(complement(FpSubspace::full(3, 2), line(3, {1, 0})), line(3, {0, 1}));
}

TEST(Subspace, SumOfTwoLinesIsFull) {
  EXPECT_EQ(sum(line(3, {1, 1}), line(3, {1, 2})), FpSubspace::full(3, 2));
}

TEST(Subspace, EqualSpansHaveIdenticalBases) {
  const FpSubspace a = FpSubspace::span(5, 3, std::vector<Vec>{{1, 2, 3}, {0, 1, 1}});
  const FpSubspace b = FpSubspace::span(5, 3, std::vector<Vec>{{1, 3, 4}, {2, 4, 1}, {1, 2, 3}});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.basis(), b.basis());
}

TEST(Preimage, IdentityReturnsW) {
  const FpSubspace w = line(3, {1, 2});
  EXPECT_EQ(preimage(FpMatrix::identity(3, 2), w), w);
}

TEST(Preimage, ZeroMapGivesFullDomain) {
  EXPECT_EQ(preimage(FpMatrix(3, 2, 2), line(3, {1, 2})), FpSubspace::full(3, 2));
}

TEST(Preimage, EnumeratedExample) {
  const FpMatrix a = FpMatrix::from_rows(2, {{1, 1}, {0, 0}});
  EXPECT_EQ(preimage(a, line(2, {1, 0})), FpSubspace::full(2, 2));
}

TEST(Subspace, AmbientMismatchThrows) {
  EXPECT_THROW((void)sum(FpSubspace::full(3, 2), FpSubspace::full(3, 3)), DimensionMismatch);
  EXPECT_THROW((void)sum(FpSubspace::full(3, 2), FpSubspace::full(5, 2)), DimensionMismatch);
}

// Properties over random matrices and subspaces.

TEST(FpLinalgProperty, RankNullity) {
  Gen g(11);
  for (int t = 0; t < 300; ++t) {
    const unsigned p = g.prime();
    const std::size_t rows = g.between(1, 9);
    const std::size_t cols = g.between(1, 9);
    const FpMatrix a = g.low_rank(p, rows, cols, g.between(0, 6));
    EXPECT_EQ(a.rank() + kernel(a).dim(), cols);
    EXPECT_EQ(image(a).dim(), a.rank());
    EXPECT_EQ(a.transpose().rank(), a.rank());
    const FpSubspace ker = kernel(a);
    for (const auto& k : ker.basis()) EXPECT_TRUE(is_zero(a.apply(k)));
  }
}

TEST(FpLinalgProperty, SolveAgreesWithImage) {
  Gen g(12);
  for (int t = 0; t < 300; ++t) {
    const unsigned p = g.prime();
    const FpMatrix a = g.low_rank(p, g.between(1, 7), g.between(1, 7), g.between(0, 5));
    const Vec b = g.vec(p, a.rows());
    const auto x = solve(a, b);
    EXPECT_EQ(x.has_value(), image(a).contains(b));
    if (x) EXPECT_EQ(a.apply(*x), b);
    const Vec reachable = a.apply(g.vec(p, a.cols()));
    const auto y = solve(a, reachable);
    ASSERT_TRUE(y);
    EXPECT_EQ(a.apply(*y), reachable);
  }
}

TEST(FpLinalgProperty, InverseExactlyForFullRank) {
  Gen g(13);
  for (int t = 0; t < 200; ++t) {
    const unsigned p = g.prime();
    const std::size_t n = g.between(1, 7);
    const FpMatrix a = g.matrix(p, n, n);
    const auto inv = a.inverse();
    EXPECT_EQ(inv.has_value(), a.rank() == n);
    if (inv) {
      EXPECT_EQ(a * *inv, FpMatrix::identity(p, n));
      EXPECT_EQ(*inv * a, FpMatrix::identity(p, n));
    }
  }
}

TEST(FpLinalgProperty, SubspaceLattice) {
  Gen g(14);
  for (int t = 0; t < 300; ++t) {
    const unsigned p = g.prime();
    const std::size_t dim = g.between(1, 8);
    const FpSubspace u = g.subspace(p, dim, g.between(0, 5));
    const FpSubspace v = g.subspace(p, dim, g.between(0, 5));
    const FpSubspace s = sum(u, v);
    const FpSubspace i = intersect(u, v);
    EXPECT_EQ(s.dim() + i.dim(), u.dim() + v.dim());
    EXPECT_TRUE(s.contains(u) && s.contains(v));
    EXPECT_TRUE(u.contains(i) && v.contains(i));
    EXPECT_EQ(sum(v, u), s);
    EXPECT_EQ(intersect(v, u), i);

    const FpSubspace w = complement(s, u);
    EXPECT_EQ(w.dim() + u.dim(), s.dim());
    EXPECT_EQ(intersect(w, u).dim(), 0u);
    EXPECT_EQ(sum(w, u), s);
    EXPECT_EQ(quotient_representatives(s, u).size(), s.dim() - u.dim());
  }
}

TEST(FpLinalgProperty, CoordinatesReconstructVectors) {
  Gen g(15);
  for (int t = 0; t < 200; ++t) {
    const unsigned p = g.prime();
    const std::size_t dim = g.between(1, 8);
    const FpSubspace u = g.subspace(p, dim, g.between(1, 5));
    const Vec c = g.vec(p, u.dim());
    const Vec v = u.basis_matrix().apply(c);
    const auto back = u.coordinates(v);
    ASSERT_TRUE(back);
    EXPECT_EQ(*back, c);
    const Vec r = g.vec(p, dim);
    EXPECT_EQ(u.contains(r), is_zero(u.reduce(r)));
  }
}

TEST(FpLinalgProperty, PreimageAndImageAdjunction) {
  Gen g(16);
  for (int t = 0; t < 200; ++t) {
    const unsigned p = g.prime();
    const std::size_t rows = g.between(1, 7);
    const std::size_t cols = g.between(1, 7);
    const FpMatrix a = g.matrix(p, rows, cols);
    const FpSubspace w = g.subspace(p, rows, g.between(0, 4));
    const FpSubspace pre = preimage(a, w);
    EXPECT_TRUE(w.contains(image(a, pre)));
    EXPECT_TRUE(pre.contains(kernel(a)));
    EXPECT_EQ(image(a, pre), intersect(w, image(a)));
  }
}

TEST(FpLinalgProperty, AnnihilatorDimension) {
  Gen g(17);
  for (int t = 0; t < 200; ++t) {
    const unsigned p = g.prime();
    const std::size_t dim = g.between(1, 8);
    const FpSubspace u = g.subspace(p, dim, g.between(0, 5));
    const FpSubspace ann = annihilator(u);
    EXPECT_EQ(ann.dim() + u.dim(), dim);
    EXPECT_EQ(annihilator(ann), u);
  }
}

}  // namespace
}  // namespace galmod
