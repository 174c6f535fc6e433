#pragma once

// Matrix SVD access and the tail-energy rank rule used by every
// tolerance-driven truncation.

#include "tucker_ra/tensor.hpp"

#include <Eigen/SVD>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tucker_ra {

struct SvdFactors {
  Matrix u;                    // rows x k, orthonormal columns
  std::vector<double> sigma;   // k values, non-increasing
  Matrix vt;                   // k x cols, orthonormal rows (empty when not requested)
};

enum class RightVectors : bool { skip = false, compute = true };

/// Thin SVD with min(rows, cols) triplets.
inline SvdFactors full_svd(const Matrix& m, RightVectors right = RightVectors::compute) {
  if (m.size() == 0) throw std::invalid_argument("full_svd: empty matrix");
  if (!m.allFinite()) throw std::invalid_argument("full_svd: non-finite input");
  unsigned opts = Eigen::ComputeThinU;
  if (right == RightVectors::compute) opts |= Eigen::ComputeThinV;
  Eigen::BDCSVD<Matrix> svd(m, opts);
  if (svd.info() != Eigen::Success) {
    throw std::runtime_error("full_svd: factorization of " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + " matrix did not converge");
  }
  SvdFactors out;
  out.u = svd.matrixU();
  const Vector& s = svd.singularValues();
  out.sigma.assign(s.data(), s.data() + s.size());
  if (right == RightVectors::compute) out.vt = svd.matrixV().transpose();
  return out;
}

/// Leading R triplets of the thin SVD.
inline SvdFactors truncated_svd(const Matrix& m, std::size_t rank, RightVectors right = RightVectors::compute) {
  const auto k = static_cast<std::size_t>(std::min(m.rows(), m.cols()));
  if (rank < 1 || rank > k) {
    throw std::out_of_range("truncated_svd: rank " + std::to_string(rank) + " outside [1, " + std::to_string(k) +
                            "]");
  }
  SvdFactors f = full_svd(m, right);
  const auto r = static_cast<Eigen::Index>(rank);
  f.u = f.u.leftCols(r).eval();
  f.sigma.resize(rank);
  if (right == RightVectors::compute) f.vt = f.vt.topRows(r).eval();
  return f;
}

/// Sum of sigma_r^2 for r > R (1-based), accumulated from the smallest value up.
inline double tail_energy(std::span<const double> sigma, std::size_t rank) {
  if (rank > sigma.size()) {
    throw std::out_of_range("tail_energy: rank " + std::to_string(rank) + " exceeds " +
                            std::to_string(sigma.size()) + " singular values");
  }
  double tail = 0.0;
  for (std::size_t r = sigma.size(); r > rank; --r) tail += sigma[r - 1] * sigma[r - 1];
  return tail;
}

/// Smallest R >= 1 whose tail energy fits in `budget`; negative budgets are
/// treated as zero.
inline std::size_t select_rank(std::span<const double> sigma, double budget) {
  if (sigma.empty()) throw std::invalid_argument("select_rank: no singular values");
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] >= 0.0) || (i > 0 && sigma[i] > sigma[i - 1])) {
      throw std::invalid_argument("select_rank: singular values must be non-negative and non-increasing");
    }
  }
  if (!(budget > 0.0)) budget = 0.0;
  // Walk the tail from the back; the first index where adding one more value
  // overflows the budget is the answer.
  double tail = 0.0;
  std::size_t rank = sigma.size();
  while (rank > 1) {
    const double next = tail + sigma[rank - 1] * sigma[rank - 1];
    if (next > budget) break;
    tail = next;
    --rank;
  }
  return rank;
}

}  // namespace tucker_ra
