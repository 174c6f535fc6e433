#pragma once

// Seeded random streams. std::mt19937_64 has a standard-mandated output
// sequence; the uniform and normal transforms are spelled out here (instead of
// using <random> distributions, whose algorithms vary across standard
// libraries) so that a seed produces the same numbers everywhere.

#include "tucker_ra/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace tucker_ra {

class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1) from the top 53 bits.
  double uniform() {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  /// Standard normal via Box-Muller; values are produced in pairs.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Column-major fill.
  Matrix normal_matrix(std::size_t rows, std::size_t cols) {
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = normal();
    return m;
  }

  DenseTensor normal_tensor(const Shape& shape) {
    DenseTensor t(shape);
    for (double& v : t.data()) v = normal();
    return t;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Orthonormal basis (thin Q of Householder QR) of a Gaussian rows x cols draw.
inline Matrix random_orthonormal(GaussianStream& rng, std::size_t rows, std::size_t cols) {
  const Matrix g = rng.normal_matrix(rows, cols);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
}

}  // namespace tucker_ra
