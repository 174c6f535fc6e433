#pragma once

#include "tucker_ra/tensor.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tucker_ra {

/// Per-mode target ranks (R_1, ..., R_N), all >= 1.
class Truncation {
 public:
  Truncation() = default;
  explicit Truncation(std::vector<std::size_t> ranks) : ranks_(std::move(ranks)) {
    for (std::size_t r : ranks_) {
      if (r < 1) throw std::invalid_argument("Truncation: ranks must be positive");
    }
  }

  std::size_t order() const { return ranks_.size(); }
  std::size_t operator[](std::size_t mode) const { return ranks_.at(mode); }
  const std::vector<std::size_t>& ranks() const { return ranks_; }

  /// Componentwise <=.
  bool dominated_by(const Truncation& other) const {
    if (order() != other.order()) return false;
    for (std::size_t n = 0; n < order(); ++n) {
      if (ranks_[n] > other.ranks_[n]) return false;
    }
    return true;
  }

  std::string to_string(char sep = 'x') const { return shape_to_string(ranks_, sep); }

  bool operator==(const Truncation&) const = default;

 private:
  std::vector<std::size_t> ranks_;
};

inline Truncation full_truncation(const Shape& shape) { return Truncation(shape); }

struct TuckerModel {
  DenseTensor core;
  std::vector<Matrix> factors;  // factor n is I_n x R_n

  Truncation truncation() const { return Truncation(core.shape()); }

  Shape full_shape() const {
    Shape s;
    s.reserve(factors.size());
    for (const auto& f : factors) s.push_back(static_cast<std::size_t>(f.rows()));
    return s;
  }

  void validate() const {
    if (factors.size() != core.order()) throw std::invalid_argument("TuckerModel: factor count != core order");
    for (std::size_t n = 0; n < factors.size(); ++n) {
      if (static_cast<std::size_t>(factors[n].cols()) != core.dim(n)) {
        throw std::invalid_argument("TuckerModel: factor " + std::to_string(n + 1) + " column count mismatch");
      }
      if (factors[n].cols() > factors[n].rows()) {
        throw std::invalid_argument("TuckerModel: rank exceeds dimension in mode " + std::to_string(n + 1));
      }
    }
  }
};

/// Largest |U^T U - I| entry over all factors.
inline double orthonormality_defect(const std::vector<Matrix>& factors) {
  double worst = 0.0;
  for (const auto& u : factors) {
    const Matrix g = u.transpose() * u - Matrix::Identity(u.cols(), u.cols());
    worst = std::max(worst, g.cwiseAbs().maxCoeff());
  }
  return worst;
}

/// core x_1 U1 x_2 U2 ... x_N UN
inline DenseTensor reconstruct(const TuckerModel& model) {
  model.validate();
  std::vector<ModeFactor> chain;
  for (std::size_t n = 0; n < model.factors.size(); ++n) chain.push_back({&model.factors[n], n, Transpose::no});
  return ttm_chain(model.core, chain);
}

/// ||A - reconstruct(model)|| / ||A||
inline double rel_error(const DenseTensor& a, const TuckerModel& model) {
  const double na = frobenius_norm(a);
  if (na == 0.0) throw std::invalid_argument("rel_error: reference tensor has zero norm");
  const DenseTensor approx = reconstruct(model);
  if (approx.shape() != a.shape()) throw std::invalid_argument("rel_error: shape mismatch");
  return (a.as_vector() - approx.as_vector()).norm() / na;
}

/// Core entries plus factor entries: prod R_n + sum I_n R_n.
inline std::size_t num_params(const TuckerModel& model) {
  std::size_t p = model.core.size();
  for (const auto& f : model.factors) p += static_cast<std::size_t>(f.rows() * f.cols());
  return p;
}

inline std::size_t num_params(const Shape& shape, const Truncation& trunc) {
  std::size_t core = 1;
  std::size_t fac = 0;
  for (std::size_t n = 0; n < shape.size(); ++n) {
    core *= trunc[n];
    fac += shape[n] * trunc[n];
  }
  return core + fac;
}

/// prod I_n / R_n
inline double compression_rate(const TuckerModel& model) {
  double rate = 1.0;
  for (const auto& f : model.factors) rate *= static_cast<double>(f.rows()) / static_cast<double>(f.cols());
  return rate;
}

/// Model with the given orthonormal factors and core A x_n U_n^T.
inline TuckerModel project_model(const DenseTensor& a, std::vector<Matrix> factors) {
  TuckerModel m;
  m.core = project_all(a, factors);
  m.factors = std::move(factors);
  return m;
}

}  // namespace tucker_ra
