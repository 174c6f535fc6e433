#pragma once

// Generators for the experiment tensors: random low multilinear-rank tensors,
// normalized Gaussian noise, and the regularized 2D Coulomb kernel.

#include "tucker_ra/random.hpp"
#include "tucker_ra/tensor.hpp"
#include "tucker_ra/tucker_model.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tucker_ra {

struct NoisySpec {
  Shape shape;
  Truncation true_rank;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

/// Gaussian core of shape `trunc` times orthonormalized Gaussian factors.
/// Draw order: core entries (linearization order), then factors for modes
/// 1..N, each column-major.
inline DenseTensor random_low_rank_tensor(const Shape& shape, const Truncation& trunc, std::uint64_t seed) {
  if (trunc.order() != shape.size()) throw std::invalid_argument("random_low_rank_tensor: order mismatch");
  for (std::size_t n = 0; n < shape.size(); ++n) {
    if (trunc[n] > shape[n]) {
      throw std::invalid_argument("random_low_rank_tensor: rank exceeds dimension in mode " + std::to_string(n + 1));
    }
  }
  GaussianStream rng(seed);
  TuckerModel model;
  model.core = rng.normal_tensor(trunc.ranks());
  for (std::size_t n = 0; n < shape.size(); ++n) model.factors.push_back(random_orthonormal(rng, shape[n], trunc[n]));
  return reconstruct(model);
}

/// A / ||A|| + delta * E / ||E|| with E standard Gaussian.
inline DenseTensor add_gaussian_noise(const DenseTensor& a, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw std::invalid_argument("add_gaussian_noise: delta must be non-negative");
  const double na = frobenius_norm(a);
  if (na == 0.0) throw std::invalid_argument("add_gaussian_noise: zero-norm input");
  DenseTensor out(a.shape());
  out.as_vector() = a.as_vector() / na;
  if (delta == 0.0) return out;
  GaussianStream rng(seed);
  const DenseTensor e = rng.normal_tensor(a.shape());
  out.as_vector() += (delta / frobenius_norm(e)) * e.as_vector();
  return out;
}

/// Low-rank signal drawn from `seed`, noise from `seed + 1`.
inline DenseTensor noisy_low_rank_tensor(const NoisySpec& spec) {
  return add_gaussian_noise(random_low_rank_tensor(spec.shape, spec.true_rank, spec.seed), spec.delta, spec.seed + 1);
}

/// Uniform grid of `count` points on [lo, hi], endpoints included.
inline double grid_point(std::size_t i, std::size_t count, double lo, double hi) {
  return lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(count - 1);
}

inline double coulomb_kernel(double x1, double x2, double x3, double x4) {
  return std::log(0.1 + std::abs(x1 - x2) + std::abs(x3 - x4));
}

/// f(x1,x2,x3,x4) = ln(0.1 + |x1 - x2| + |x3 - x4|) on an I^4 grid.
inline DenseTensor coulomb_kernel_tensor(std::size_t size, double lo = -100.0, double hi = 100.0) {
  if (size < 2) throw std::invalid_argument("coulomb_kernel_tensor: size must be at least 2");
  if (!(lo < hi)) throw std::invalid_argument("coulomb_kernel_tensor: need lo < hi");
  std::vector<double> x(size);
  for (std::size_t i = 0; i < size; ++i) x[i] = grid_point(i, size, lo, hi);
  DenseTensor t({size, size, size, size});
  double* out = t.data().data();
  for (std::size_t i4 = 0; i4 < size; ++i4)
    for (std::size_t i3 = 0; i3 < size; ++i3)
      for (std::size_t i2 = 0; i2 < size; ++i2)
        for (std::size_t i1 = 0; i1 < size; ++i1) *out++ = coulomb_kernel(x[i1], x[i2], x[i3], x[i4]);
  return t;
}

}  // namespace tucker_ra
