#pragma once

// Dense N-way tensors stored mode-1-fastest (column-major generalization), so
// the mode-1 unfolding is a plain reshape of the data buffer.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tucker_ra {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string shape_to_string(const Shape& shape, char sep = 'x') {
  std::ostringstream os;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << sep;
    os << shape[i];
  }
  return os.str();
}

class DenseTensor {
 public:
  DenseTensor() : shape_{1}, data_(1, 0.0) {}

  /// Zero-filled tensor of the given shape.
  explicit DenseTensor(Shape shape) : shape_(std::move(shape)) {
    validate_shape(shape_);
    data_.assign(shape_numel(shape_), 0.0);
  }

  DenseTensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    validate_shape(shape_);
    if (data_.size() != shape_numel(shape_)) {
      throw std::invalid_argument("DenseTensor: data length " + std::to_string(data_.size()) +
                                  " does not match shape " + shape_to_string(shape_));
    }
    for (double v : data_) {
      if (!std::isfinite(v)) throw std::invalid_argument("DenseTensor: non-finite entry");
    }
  }

  std::size_t order() const { return shape_.size(); }
  const Shape& shape() const { return shape_; }
  std::size_t dim(std::size_t mode) const { return shape_.at(mode); }
  std::size_t size() const { return data_.size(); }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  double operator[](std::size_t linear) const { return data_[linear]; }
  double& operator[](std::size_t linear) { return data_[linear]; }

  /// Entry at 0-based multi-index.
  double at(const std::vector<std::size_t>& idx) const { return data_[linear_index(idx)]; }
  double& at(const std::vector<std::size_t>& idx) { return data_[linear_index(idx)]; }

  std::size_t linear_index(const std::vector<std::size_t>& idx) const {
    if (idx.size() != shape_.size()) throw std::invalid_argument("DenseTensor: index order mismatch");
    std::size_t lin = 0;
    std::size_t stride = 1;
    for (std::size_t k = 0; k < shape_.size(); ++k) {
      if (idx[k] >= shape_[k]) throw std::out_of_range("DenseTensor: index out of range");
      lin += idx[k] * stride;
      stride *= shape_[k];
    }
    return lin;
  }

  Eigen::Map<const Vector> as_vector() const {
    return {data_.data(), static_cast<Eigen::Index>(data_.size())};
  }
  Eigen::Map<Vector> as_vector() { return {data_.data(), static_cast<Eigen::Index>(data_.size())}; }

  bool operator==(const DenseTensor& other) const = default;

 private:
  static void validate_shape(const Shape& shape) {
    if (shape.empty()) throw std::invalid_argument("DenseTensor: order must be at least 1");
    for (std::size_t d : shape) {
      if (d == 0) throw std::invalid_argument("DenseTensor: zero-length mode in shape " + shape_to_string(shape));
    }
  }

  Shape shape_;
  std::vector<double> data_;
};

inline double squared_norm(const DenseTensor& t) { return t.as_vector().squaredNorm(); }

inline double frobenius_norm(const DenseTensor& t) { return t.as_vector().norm(); }

inline DenseTensor operator-(const DenseTensor& a, const DenseTensor& b) {
  if (a.shape() != b.shape()) throw std::invalid_argument("tensor subtraction: shape mismatch");
  DenseTensor out(a.shape());
  out.as_vector() = a.as_vector() - b.as_vector();
  return out;
}

namespace detail {

inline void check_mode(const DenseTensor& t, std::size_t mode) {
  if (mode >= t.order()) {
    throw std::out_of_range("mode " + std::to_string(mode + 1) + " out of range for order-" +
                            std::to_string(t.order()) + " tensor");
  }
}

// Sizes of the modes before and after `mode` in the linearization.
inline std::pair<std::size_t, std::size_t> outer_inner(const Shape& shape, std::size_t mode) {
  std::size_t left = 1;
  for (std::size_t k = 0; k < mode; ++k) left *= shape[k];
  std::size_t right = 1;
  for (std::size_t k = mode + 1; k < shape.size(); ++k) right *= shape[k];
  return {left, right};
}

}  // namespace detail

/// Mode-`mode` matricization (0-based mode). Column index runs over the
/// remaining modes with the lowest mode fastest.
inline Matrix unfold(const DenseTensor& t, std::size_t mode) {
  detail::check_mode(t, mode);
  const auto [left, right] = detail::outer_inner(t.shape(), mode);
  const std::size_t rows = t.dim(mode);
  Matrix m(rows, left * right);
  const double* src = t.data().data();
  for (std::size_t r = 0; r < right; ++r) {
    for (std::size_t i = 0; i < rows; ++i) {
      const double* slab = src + (r * rows + i) * left;
      for (std::size_t l = 0; l < left; ++l) m(i, r * left + l) = slab[l];
    }
  }
  return m;
}

inline DenseTensor fold(const Matrix& m, std::size_t mode, const Shape& shape) {
  DenseTensor out(shape);
  detail::check_mode(out, mode);
  const auto [left, right] = detail::outer_inner(shape, mode);
  const std::size_t rows = shape[mode];
  if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) != left * right) {
    throw std::invalid_argument("fold: matrix " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                " does not match shape " + shape_to_string(shape) + " at mode " +
                                std::to_string(mode + 1));
  }
  double* dst = out.data().data();
  for (std::size_t r = 0; r < right; ++r) {
    for (std::size_t i = 0; i < rows; ++i) {
      double* slab = dst + (r * rows + i) * left;
      for (std::size_t l = 0; l < left; ++l) slab[l] = m(i, r * left + l);
    }
  }
  for (double v : out.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("fold: non-finite entry");
  }
  return out;
}

enum class Transpose : bool { no = false, yes = true };

/// Mode-n product: B_(n) = U * A_(n), or U^T * A_(n) when transposed.
inline DenseTensor ttm(const DenseTensor& t, const Matrix& u, std::size_t mode, Transpose transpose = Transpose::no) {
  detail::check_mode(t, mode);
  const bool tr = transpose == Transpose::yes;
  const auto in_dim = static_cast<Eigen::Index>(tr ? u.rows() : u.cols());
  const auto out_dim = static_cast<Eigen::Index>(tr ? u.cols() : u.rows());
  if (static_cast<std::size_t>(in_dim) != t.dim(mode)) {
    throw std::invalid_argument("ttm: factor " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()) +
                                (tr ? " (transposed)" : "") + " incompatible with mode " +
                                std::to_string(mode + 1) + " of size " + std::to_string(t.dim(mode)));
  }
  if (out_dim == 0) throw std::invalid_argument("ttm: factor yields an empty mode");

  Shape out_shape = t.shape();
  out_shape[mode] = static_cast<std::size_t>(out_dim);
  DenseTensor out(out_shape);
  const auto [left, right] = detail::outer_inner(t.shape(), mode);
  const auto l = static_cast<Eigen::Index>(left);

  using ConstMap = Eigen::Map<const Matrix>;
  using MutMap = Eigen::Map<Matrix>;
  if (left == 1) {
    ConstMap a(t.data().data(), in_dim, static_cast<Eigen::Index>(right));
    MutMap b(out.data().data(), out_dim, static_cast<Eigen::Index>(right));
    if (tr) b.noalias() = u.transpose() * a;
    else b.noalias() = u * a;
    return out;
  }
  // Each trailing index r owns a contiguous (left x I_n) slab.
  for (std::size_t r = 0; r < right; ++r) {
    ConstMap a(t.data().data() + r * left * in_dim, l, in_dim);
    MutMap b(out.data().data() + r * left * out_dim, l, out_dim);
    if (tr) b.noalias() = a * u;
    else b.noalias() = a * u.transpose();
  }
  return out;
}

struct ModeFactor {
  const Matrix* matrix;
  std::size_t mode;
  Transpose transpose = Transpose::no;
};

/// Applies several mode products. Modes must be distinct; contractions run
/// greedily, each step picking the factor whose result is smallest.
inline DenseTensor ttm_chain(const DenseTensor& t, const std::vector<ModeFactor>& factors) {
  std::vector<bool> seen(t.order(), false);
  for (const auto& f : factors) {
    detail::check_mode(t, f.mode);
    if (seen[f.mode]) throw std::invalid_argument("ttm_chain: duplicate mode " + std::to_string(f.mode + 1));
    seen[f.mode] = true;
    const auto in_dim = f.transpose == Transpose::yes ? f.matrix->rows() : f.matrix->cols();
    if (static_cast<std::size_t>(in_dim) != t.dim(f.mode)) {
      throw std::invalid_argument("ttm_chain: factor incompatible with mode " + std::to_string(f.mode + 1));
    }
  }

  std::vector<ModeFactor> pending = factors;
  DenseTensor current = t;
  while (!pending.empty()) {
    std::size_t best = 0;
    std::size_t best_size = 0;
    std::size_t best_mode = 0;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const auto& f = pending[i];
      const auto out_dim =
          static_cast<std::size_t>(f.transpose == Transpose::yes ? f.matrix->cols() : f.matrix->rows());
      const std::size_t result_size = current.size() / current.dim(f.mode) * out_dim;
      if (i == 0 || result_size < best_size || (result_size == best_size && f.mode < best_mode)) {
        best = i;
        best_size = result_size;
        best_mode = f.mode;
      }
    }
    current = ttm(current, *pending[best].matrix, pending[best].mode, pending[best].transpose);
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return current;
}

/// Contracts every mode except `skip` with the transpose of its factor.
inline DenseTensor project_all_but(const DenseTensor& t, const std::vector<Matrix>& factors, std::size_t skip) {
  std::vector<ModeFactor> chain;
  for (std::size_t m = 0; m < factors.size(); ++m) {
    if (m != skip) chain.push_back({&factors[m], m, Transpose::yes});
  }
  return ttm_chain(t, chain);
}

inline DenseTensor project_all(const DenseTensor& t, const std::vector<Matrix>& factors) {
  return project_all_but(t, factors, factors.size());
}

inline std::size_t default_kron_cap() { return std::size_t{1} << 26; }

/// Kronecker product; throws when the result would exceed `element_cap` entries.
inline Matrix kron(const Matrix& a, const Matrix& b, std::size_t element_cap = default_kron_cap()) {
  const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
  if (cols != 0 && rows > element_cap / cols) {
    throw std::length_error("kron: result of " + std::to_string(rows) + "x" + std::to_string(cols) +
                            " exceeds element cap " + std::to_string(element_cap));
  }
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

struct MultilinearRank {
  std::vector<std::size_t> ranks;
  // Set for an all-zero input; ranks are then all zero.
  bool degenerate = false;
};

/// Counts singular values of each unfolding exceeding tol * sigma_max.
inline MultilinearRank multilinear_rank(const DenseTensor& t, double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("multilinear_rank: tol must be non-negative");
  MultilinearRank out;
  out.ranks.assign(t.order(), 0);
  if (frobenius_norm(t) == 0.0) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t n = 0; n < t.order(); ++n) {
    const Matrix m = unfold(t, n);
    Eigen::BDCSVD<Matrix> svd(m);
    const Vector& s = svd.singularValues();
    const double cutoff = tol * s(0);
    out.ranks[n] = static_cast<std::size_t>((s.array() > cutoff).count());
  }
  return out;
}

}  // namespace tucker_ra
