#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tucker_ra;
using namespace tucker_ra::testing;

namespace {

DenseTensor iota_tensor(const Shape& shape) {
  DenseTensor t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i + 1);
  return t;
}

}  // namespace

TEST(DenseTensor, RejectsBadConstruction) {
  EXPECT_THROW(DenseTensor(Shape{}), std::invalid_argument);
  EXPECT_THROW(DenseTensor(Shape{2, 0}), std::invalid_argument);
  EXPECT_THROW(DenseTensor(Shape{2, 2}, std::vector<double>(3, 0.0)), std::invalid_argument);
  EXPECT_THROW(DenseTensor(Shape{2}, std::vector<double>{1.0, std::nan("")}), std::invalid_argument);
  EXPECT_THROW(DenseTensor(Shape{1}, std::vector<double>{INFINITY}), std::invalid_argument);
}

TEST(DenseTensor, LinearizationIsModeOneFastest) {
  const DenseTensor t = iota_tensor({2, 3, 4});
  EXPECT_EQ(t.at({1, 0, 0}), 2.0);
  EXPECT_EQ(t.at({0, 1, 0}), 3.0);
  EXPECT_EQ(t.at({0, 0, 1}), 7.0);
  EXPECT_EQ(t.at({1, 2, 3}), 24.0);
}

TEST(FrobeniusNorm, Examples) {
  EXPECT_DOUBLE_EQ(frobenius_norm(DenseTensor({1, 2}, {3.0, 4.0})), 5.0);
  EXPECT_EQ(frobenius_norm(DenseTensor({3, 2, 5})), 0.0);
  const DenseTensor r = random_tensor({4, 4, 4}, 11);
  EXPECT_NEAR(frobenius_norm(r), loop_norm(r), 1e-13 * loop_norm(r));
}

TEST(Unfold, MatchesHandExample) {
  const Matrix m = unfold(iota_tensor({2, 2, 2}), 0);
  Matrix expected(2, 4);
  expected << 1, 3, 5, 7, 2, 4, 6, 8;
  EXPECT_EQ(m, expected);
}

TEST(Unfold, MatchesIndexFormulaOnEveryMode) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Shape shape = random_shape(gen, 5, 4);
    const DenseTensor t = random_tensor(shape, 100 + trial);
    for (std::size_t n = 0; n < shape.size(); ++n) {
      EXPECT_EQ(unfold(t, n), index_formula_unfold(t, n)) << "shape " << shape_to_string(shape) << " mode " << n;
    }
  }
}

TEST(Unfold, OrderOneIsColumn) {
  const DenseTensor t({4}, {1, 2, 3, 4});
  const Matrix m = unfold(t, 0);
  EXPECT_EQ(m.rows(), 4);
  EXPECT_EQ(m.cols(), 1);
  EXPECT_EQ(m(2, 0), 3.0);
}

TEST(Unfold, ModeOutOfRange) {
  EXPECT_THROW(unfold(DenseTensor({2, 2}), 2), std::out_of_range);
}

TEST(Fold, InvertsHandExample) {
  Matrix m(2, 4);
  m << 1, 3, 5, 7, 2, 4, 6, 8;
  EXPECT_EQ(fold(m, 0, {2, 2, 2}), iota_tensor({2, 2, 2}));
  const DenseTensor scalar = fold(Matrix::Constant(1, 1, 2.5), 0, {1, 1});
  EXPECT_EQ(scalar.shape(), (Shape{1, 1}));
  EXPECT_EQ(scalar[0], 2.5);
}

TEST(Fold, DimensionMismatch) {
  EXPECT_THROW(fold(Matrix::Zero(2, 3), 0, {2, 2, 2}), std::invalid_argument);
  EXPECT_THROW(fold(Matrix::Zero(3, 4), 0, {2, 2, 2}), std::invalid_argument);
}

TEST(Fold, RoundTripIsBitExact) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Shape shape = random_shape(gen, 5, 5);
    const DenseTensor t = random_tensor(shape, 500 + trial);
    for (std::size_t n = 0; n < shape.size(); ++n) {
      EXPECT_TRUE(bit_equal(fold(unfold(t, n), n, shape), t));
      const Matrix m = unfold(t, n);
      EXPECT_EQ(unfold(fold(m, n, shape), n), m);
      EXPECT_TRUE(bit_equal(fold(m, n, shape), index_formula_fold(m, n, shape)));
    }
  }
}

TEST(Unfold, PreservesNorm) {
  const DenseTensor t = random_tensor({3, 5, 2, 4}, 9);
  for (std::size_t n = 0; n < 4; ++n) EXPECT_NEAR(unfold(t, n).norm(), frobenius_norm(t), 1e-13 * frobenius_norm(t));
}

TEST(Ttm, IdentityIsBitExact) {
  const DenseTensor t = random_tensor({3, 4, 5}, 1);
  for (std::size_t n = 0; n < 3; ++n) {
    const Matrix eye = Matrix::Identity(static_cast<Eigen::Index>(t.dim(n)), static_cast<Eigen::Index>(t.dim(n)));
    EXPECT_TRUE(bit_equal(ttm(t, eye, n), t));
    EXPECT_TRUE(bit_equal(ttm(t, eye, n, Transpose::yes), t));
  }
}

TEST(Ttm, MatchesMatricizedProductOracle) {
  const DenseTensor t = random_tensor({3, 4, 5}, 2);
  const Matrix u = random_matrix(2, 3, 3);
  const DenseTensor expected = index_formula_fold(loop_matmul(u, index_formula_unfold(t, 0)), 0, {2, 4, 5});
  EXPECT_LT(rel_diff(ttm(t, u, 0), expected), 1e-13);

  for (std::size_t n = 0; n < 3; ++n) {
    const Matrix v = random_matrix(t.dim(n), 3, 40 + n);
    Shape out_shape = t.shape();
    out_shape[n] = 3;
    const DenseTensor exp_t =
        index_formula_fold(loop_matmul(v.transpose(), index_formula_unfold(t, n)), n, out_shape);
    EXPECT_LT(rel_diff(ttm(t, v, n, Transpose::yes), exp_t), 1e-13);
  }
}

TEST(Ttm, DistinctModesCommute) {
  const DenseTensor t = random_tensor({4, 3, 5}, 4);
  const Matrix u = random_matrix(2, 4, 5);
  const Matrix v = random_matrix(6, 3, 6);
  const DenseTensor uv = ttm(ttm(t, u, 0), v, 1);
  const DenseTensor vu = ttm(ttm(t, v, 1), u, 0);
  EXPECT_LT(rel_diff(uv, vu), 1e-13);
}

TEST(Ttm, DimensionMismatch) {
  const DenseTensor t = random_tensor({4, 3}, 4);
  EXPECT_THROW(ttm(t, Matrix::Zero(2, 3), 0), std::invalid_argument);
  EXPECT_THROW(ttm(t, Matrix::Zero(3, 2), 0, Transpose::yes), std::invalid_argument);
  EXPECT_THROW(ttm(t, Matrix::Zero(2, 4), 2), std::out_of_range);
}

TEST(TtmChain, EmptyAndSingle) {
  const DenseTensor t = random_tensor({3, 4, 2}, 7);
  EXPECT_TRUE(bit_equal(ttm_chain(t, {}), t));
  const Matrix u = random_matrix(5, 4, 8);
  EXPECT_TRUE(bit_equal(ttm_chain(t, {{&u, 1, Transpose::no}}), ttm(t, u, 1)));
}

TEST(TtmChain, OrderIndependent) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 50; ++trial) {
    Shape shape = random_shape(gen, 4, 5);
    const DenseTensor t = random_tensor(shape, 900 + trial);
    std::vector<Matrix> mats;
    std::uniform_int_distribution<std::size_t> out_dim(1, 6);
    for (std::size_t n = 0; n < shape.size(); ++n) mats.push_back(random_matrix(out_dim(gen), shape[n], 1000 + n));
    std::vector<ModeFactor> chain;
    DenseTensor sequential = t;
    for (std::size_t n = 0; n < shape.size(); ++n) {
      chain.push_back({&mats[n], n, Transpose::no});
      sequential = ttm(sequential, mats[n], n);
    }
    EXPECT_LT(rel_diff(ttm_chain(t, chain), sequential), 1e-13);
    std::reverse(chain.begin(), chain.end());
    EXPECT_LT(rel_diff(ttm_chain(t, chain), sequential), 1e-13);
  }
}

TEST(TtmChain, RejectsDuplicateMode) {
  const DenseTensor t = random_tensor({3, 3}, 1);
  const Matrix u = Matrix::Identity(3, 3);
  EXPECT_THROW(ttm_chain(t, {{&u, 0, Transpose::no}, {&u, 0, Transpose::no}}), std::invalid_argument);
}

TEST(Kron, Examples) {
  EXPECT_EQ(kron(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), Matrix::Identity(6, 6));
  Matrix a(1, 2);
  a << 1, 2;
  Matrix b(2, 1);
  b << 3, 4;
  Matrix expected(2, 2);
  expected << 3, 6, 4, 8;
  EXPECT_EQ(kron(a, b), expected);
  const Matrix x = random_matrix(3, 4, 1);
  const Matrix y = random_matrix(2, 5, 2);
  EXPECT_NEAR(kron(x, y).norm(), x.norm() * y.norm(), 1e-13 * x.norm() * y.norm());
}

TEST(Kron, ElementCap) {
  EXPECT_THROW(kron(Matrix::Zero(100, 100), Matrix::Zero(100, 100), 1000), std::length_error);
}

TEST(MultilinearRank, Examples) {
  GaussianStream rng(5);
  TuckerModel rank_one;
  rank_one.core = DenseTensor({1, 1, 1}, {2.0});
  for (std::size_t d : {4, 5, 6}) rank_one.factors.push_back(random_orthonormal(rng, d, 1));
  EXPECT_EQ(multilinear_rank(reconstruct(rank_one), 1e-10).ranks, (std::vector<std::size_t>{1, 1, 1}));

  TuckerModel structured;
  structured.core = random_tensor({3, 4, 5}, 6);
  for (std::size_t d : {7, 8, 9}) {
    const std::size_t r = structured.factors.size() + 3;
    structured.factors.push_back(random_orthonormal(rng, d, r));
  }
  const MultilinearRank mr = multilinear_rank(reconstruct(structured), 1e-10);
  EXPECT_EQ(mr.ranks, (std::vector<std::size_t>{3, 4, 5}));
  EXPECT_FALSE(mr.degenerate);

  const MultilinearRank zero = multilinear_rank(DenseTensor({3, 3, 3}), 1e-10);
  EXPECT_EQ(zero.ranks, (std::vector<std::size_t>{0, 0, 0}));
  EXPECT_TRUE(zero.degenerate);
}
