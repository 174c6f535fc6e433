#pragma once

// Higher-order orthogonal iteration: fixed-rank HOOI, rank-adaptive HOOI,
// feasible initializers, classical (unconstrained) Tucker-ALS, and a
// Kronecker-product brute-force evaluation of the per-mode sub-problem.

#include "tucker_ra/hosvd.hpp"
#include "tucker_ra/random.hpp"
#include "tucker_ra/svdrank.hpp"
#include "tucker_ra/tensor.hpp"
#include "tucker_ra/tucker_model.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tucker_ra {

struct HooiConfig {
  std::size_t max_iter = 500;
  double fit_tol = 1e-8;
  double epsilon = 0.0;  // relative error tolerance, adaptive runs only

  void validate(bool adaptive) const {
    if (max_iter < 1) throw std::invalid_argument("HooiConfig: max_iter must be >= 1");
    if (!(fit_tol >= 0.0)) throw std::invalid_argument("HooiConfig: fit_tol must be >= 0");
    if (adaptive && !(epsilon > 0.0 && epsilon < 1.0)) {
      throw std::invalid_argument("HooiConfig: epsilon must lie in (0, 1)");
    }
  }
};

class InfeasibleInitError : public std::runtime_error {
 public:
  InfeasibleInitError(double measured, double epsilon)
      : std::runtime_error("rank-adaptive HOOI: initial guess has relative error " + std::to_string(measured) +
                           " > tolerance " + std::to_string(epsilon)),
        measured_(measured) {}
  double measured() const { return measured_; }

 private:
  double measured_;
};

struct FixedRank {
  std::size_t rank;
};
struct AdaptiveRank {
  double epsilon;
};
using ModeRankRule = std::variant<FixedRank, AdaptiveRank>;

struct ModeUpdate {
  Matrix factor;       // leading left singular vectors of B_(n)
  SvdFactors svd;      // of B_(n); right vectors are not formed
  std::size_t rank = 0;
  double budget = 0.0;      // adaptive only: ||B||^2 - (1 - eps^2) ||A||^2 before clamping
  bool infeasible = false;  // adaptive only: budget came out negative
  DenseTensor core;         // B x_n factor^T
  double core_norm_sq = 0.0;
};

/// Refreshes factor `mode` given all other factors (which must have
/// orthonormal columns).
inline ModeUpdate update_mode(const DenseTensor& a, const std::vector<Matrix>& factors, std::size_t mode,
                              const ModeRankRule& rule) {
  if (factors.size() != a.order()) throw std::invalid_argument("update_mode: need one factor per mode");
  detail::check_mode(a, mode);
  const DenseTensor b = project_all_but(a, factors, mode);
  const Matrix bn = unfold(b, mode);

  ModeUpdate out;
  out.svd = full_svd(bn, RightVectors::skip);
  if (const auto* fixed = std::get_if<FixedRank>(&rule)) {
    if (fixed->rank < 1 || fixed->rank > a.dim(mode)) {
      throw std::invalid_argument("update_mode: rank " + std::to_string(fixed->rank) + " invalid for mode " +
                                  std::to_string(mode + 1));
    }
    out.rank = fixed->rank;
  } else {
    const double eps = std::get<AdaptiveRank>(rule).epsilon;
    out.budget = squared_norm(b) - (1.0 - eps * eps) * squared_norm(a);
    out.infeasible = out.budget < 0.0;
    out.rank = select_rank(out.svd.sigma, out.budget);
  }
  out.factor = detail::leading_vectors(out.svd, out.rank);

  Shape core_shape = b.shape();
  core_shape[mode] = out.rank;
  out.core = fold(out.factor.transpose() * bn, mode, core_shape);
  out.core_norm_sq = squared_norm(out.core);
  return out;
}

namespace detail {

inline void check_factors(const DenseTensor& a, const std::vector<Matrix>& factors, const char* who) {
  if (factors.size() != a.order()) throw std::invalid_argument(std::string(who) + ": need one factor per mode");
  for (std::size_t n = 0; n < factors.size(); ++n) {
    if (static_cast<std::size_t>(factors[n].rows()) != a.dim(n) || factors[n].cols() < 1 ||
        factors[n].cols() > factors[n].rows()) {
      throw std::invalid_argument(std::string(who) + ": factor " + std::to_string(n + 1) + " has shape " +
                                  std::to_string(factors[n].rows()) + "x" + std::to_string(factors[n].cols()) +
                                  ", incompatible with mode size " + std::to_string(a.dim(n)));
    }
  }
}

// Relative error implied by orthonormal factors: sqrt(||A||^2 - ||G||^2) / ||A||.
inline double projected_error(double norm_a_sq, double core_norm_sq) {
  return std::sqrt(std::max(0.0, norm_a_sq - core_norm_sq) / norm_a_sq);
}

}  // namespace detail

struct HooiResult {
  TuckerModel model;
  std::vector<double> mode_errors;   // after every mode update, from ||A||^2 - ||G||^2
  std::vector<double> sweep_errors;  // after every sweep, by explicit reconstruction
  std::size_t sweeps = 0;
  bool converged = false;
};

inline HooiResult hooi(const DenseTensor& a, const Truncation& trunc, std::vector<Matrix> init,
                       const HooiConfig& cfg = {}) {
  cfg.validate(false);
  detail::check_truncation(a.shape(), trunc, "hooi");
  detail::check_factors(a, init, "hooi");
  for (std::size_t n = 0; n < a.order(); ++n) {
    if (static_cast<std::size_t>(init[n].cols()) != trunc[n]) {
      throw std::invalid_argument("hooi: initial factor " + std::to_string(n + 1) + " does not match truncation");
    }
  }
  const double norm_a_sq = squared_norm(a);
  if (norm_a_sq == 0.0) throw std::invalid_argument("hooi: zero tensor");
  const double norm_a = std::sqrt(norm_a_sq);

  HooiResult out;
  std::vector<Matrix> factors = std::move(init);
  double prev_core_norm = frobenius_norm(project_all(a, factors));
  DenseTensor core;
  while (out.sweeps < cfg.max_iter) {
    for (std::size_t n = 0; n < a.order(); ++n) {
      ModeUpdate up = update_mode(a, factors, n, FixedRank{trunc[n]});
      factors[n] = std::move(up.factor);
      out.mode_errors.push_back(detail::projected_error(norm_a_sq, up.core_norm_sq));
      core = std::move(up.core);
    }
    ++out.sweeps;
    TuckerModel current{core, factors};
    out.sweep_errors.push_back(rel_error(a, current));
    const double core_norm = frobenius_norm(core);
    if (std::abs(core_norm - prev_core_norm) < cfg.fit_tol * norm_a) {
      out.converged = true;
      break;
    }
    prev_core_norm = core_norm;
  }
  out.model = TuckerModel{std::move(core), std::move(factors)};
  return out;
}

struct ModeStep {
  std::size_t sweep;
  std::size_t mode;
  std::size_t rank;
  double budget;
  bool infeasible;
};

struct RankHistory {
  // Entry 0 is the initial guess; entry k is the state after sweep k.
  std::vector<Truncation> truncations;
  std::vector<double> rel_errors;
  std::vector<ModeStep> steps;

  std::size_t infeasible_steps() const {
    std::size_t c = 0;
    for (const auto& s : steps) c += s.infeasible ? 1 : 0;
    return c;
  }

  /// True when every truncation is componentwise <= its predecessor.
  bool monotone() const {
    for (std::size_t k = 1; k < truncations.size(); ++k) {
      if (!truncations[k].dominated_by(truncations[k - 1])) return false;
    }
    return true;
  }
};

struct AdaptiveResult {
  TuckerModel model;
  RankHistory history;
  std::size_t sweeps = 0;
  bool converged = false;
};

/// Rank-adaptive HOOI. `init` must be feasible: its projected model has
/// relative error <= cfg.epsilon.
inline AdaptiveResult rank_adaptive_hooi(const DenseTensor& a, const HooiConfig& cfg, std::vector<Matrix> init) {
  cfg.validate(true);
  detail::check_factors(a, init, "rank_adaptive_hooi");
  const double norm_a_sq = squared_norm(a);
  if (norm_a_sq == 0.0) throw std::invalid_argument("rank_adaptive_hooi: zero tensor");
  const double norm_a = std::sqrt(norm_a_sq);
  const double eps = cfg.epsilon;

  AdaptiveResult out;
  std::vector<Matrix> factors = std::move(init);
  TuckerModel start = project_model(a, factors);
  const double init_err = rel_error(a, start);
  if (init_err > eps) throw InfeasibleInitError(init_err, eps);
  out.history.truncations.push_back(start.truncation());
  out.history.rel_errors.push_back(init_err);

  double prev_core_norm = frobenius_norm(start.core);
  DenseTensor core = std::move(start.core);
  while (out.sweeps < cfg.max_iter) {
    for (std::size_t n = 0; n < a.order(); ++n) {
      ModeUpdate up = update_mode(a, factors, n, AdaptiveRank{eps});
      out.history.steps.push_back({out.sweeps + 1, n, up.rank, up.budget, up.infeasible});
      factors[n] = std::move(up.factor);
      core = std::move(up.core);
    }
    ++out.sweeps;
    TuckerModel current{core, factors};
    const Truncation ranks = current.truncation();
    out.history.truncations.push_back(ranks);
    out.history.rel_errors.push_back(rel_error(a, current));

    const double core_norm = frobenius_norm(core);
    const bool ranks_stalled = ranks == out.history.truncations[out.history.truncations.size() - 2];
    if (ranks_stalled && std::abs(core_norm - prev_core_norm) < cfg.fit_tol * norm_a) {
      out.converged = true;
      break;
    }
    prev_core_norm = core_norm;
  }
  out.model = TuckerModel{std::move(core), std::move(factors)};
  return out;
}

/// Factors of the uniform-budget st-HOSVD model; feasible by construction.
inline std::vector<Matrix> init_st_hosvd(const DenseTensor& a, double eps) { return st_hosvd_tol(a, eps).factors; }

/// Random orthonormal factors whose common column count doubles from 1
/// (capped per mode at I_n) until the projected model meets `eps`.
inline std::vector<Matrix> init_random(const DenseTensor& a, double eps, std::uint64_t seed) {
  detail::check_tolerance(eps, "init_random");
  if (squared_norm(a) == 0.0) throw std::invalid_argument("init_random: zero tensor");
  GaussianStream rng(seed);
  std::size_t width = 1;
  for (;;) {
    std::vector<Matrix> factors;
    bool full = true;
    for (std::size_t n = 0; n < a.order(); ++n) {
      const std::size_t r = std::min(width, a.dim(n));
      full = full && r == a.dim(n);
      factors.push_back(random_orthonormal(rng, a.dim(n), r));
    }
    if (rel_error(a, project_model(a, factors)) <= eps) return factors;
    if (full) {
      throw std::logic_error("init_random: full-rank orthogonal factors failed the tolerance check");
    }
    width *= 2;
  }
}

/// Relative cutoff for the pseudoinverses in classical ALS: singular values
/// below kAlsPinvCutoff * sigma_max are treated as zero.
inline constexpr double kAlsPinvCutoff = 1e-12;

namespace detail {

inline Matrix pinv(const Matrix& m) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(m);
  cod.setThreshold(kAlsPinvCutoff);
  return cod.pseudoInverse();
}

// Exact least-squares core for fixed (not necessarily orthonormal) factors.
inline DenseTensor als_core(const DenseTensor& a, const std::vector<Matrix>& factors) {
  std::vector<Matrix> pinvs;
  pinvs.reserve(factors.size());
  for (const auto& f : factors) pinvs.push_back(pinv(f));
  std::vector<ModeFactor> chain;
  for (std::size_t n = 0; n < pinvs.size(); ++n) chain.push_back({&pinvs[n], n, Transpose::no});
  return ttm_chain(a, chain);
}

}  // namespace detail

struct AlsResult {
  TuckerModel model;
  // Relative error after the core step and after every factor step.
  std::vector<double> objective;
  std::size_t cycles = 0;
};

/// Classical Tucker-ALS: cycles core -> U1 -> ... -> UN, each an unconstrained
/// least-squares solve. Iterates are not orthogonalized. The returned model is
/// re-expressed in orthonormal bases of the final factor column spaces with
/// the matching least-squares core.
inline AlsResult classical_als(const DenseTensor& a, const Truncation& trunc, TuckerModel init,
                               const HooiConfig& cfg = {}) {
  cfg.validate(false);
  detail::check_truncation(a.shape(), trunc, "classical_als");
  init.validate();
  if (init.full_shape() != a.shape() || init.truncation() != trunc) {
    throw std::invalid_argument("classical_als: initial model does not conform to tensor and truncation");
  }
  const double norm_a = frobenius_norm(a);
  if (norm_a == 0.0) throw std::invalid_argument("classical_als: zero tensor");

  AlsResult out;
  DenseTensor core = std::move(init.core);
  std::vector<Matrix> factors = std::move(init.factors);
  const auto objective = [&] { return rel_error(a, TuckerModel{core, factors}); };

  double prev = objective();
  while (out.cycles < cfg.max_iter) {
    core = detail::als_core(a, factors);
    out.objective.push_back(objective());
    for (std::size_t n = 0; n < a.order(); ++n) {
      // Y_(n) = G_(n) (kron of other factors)^T; solve min_X ||A_(n) - X Y_(n)||.
      std::vector<ModeFactor> chain;
      for (std::size_t m = 0; m < a.order(); ++m) {
        if (m != n) chain.push_back({&factors[m], m, Transpose::no});
      }
      const Matrix yn = unfold(ttm_chain(core, chain), n);
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(yn.transpose());
      cod.setThreshold(kAlsPinvCutoff);
      factors[n] = cod.solve(unfold(a, n).transpose()).transpose();
      out.objective.push_back(objective());
    }
    ++out.cycles;
    const double now = out.objective.back();
    if (std::abs(prev - now) < cfg.fit_tol) break;
    prev = now;
  }

  std::vector<Matrix> bases;
  for (const auto& f : factors) {
    Eigen::HouseholderQR<Matrix> qr(f);
    bases.push_back(qr.householderQ() * Matrix::Identity(f.rows(), f.cols()));
  }
  out.model = project_model(a, std::move(bases));
  return out;
}

inline AlsResult classical_als(const DenseTensor& a, const Truncation& trunc, const HooiConfig& cfg = {}) {
  return classical_als(a, trunc, t_hosvd_rank(a, trunc), cfg);
}

/// Optimal value of min_{rank X <= R} ||A_(n) - X M2^T||_F^2 with M2 the
/// Kronecker product of the other (orthonormal) factors, evaluated by forming
/// M2 and its orthogonal complement explicitly. Small problems only.
inline double subproblem_bruteforce(const DenseTensor& a, const std::vector<Matrix>& factors, std::size_t mode,
                                    std::size_t rank, std::size_t element_cap = std::size_t{1} << 22) {
  detail::check_factors(a, factors, "subproblem_bruteforce");
  detail::check_mode(a, mode);
  const std::size_t cols = a.size() / a.dim(mode);
  if (cols > element_cap / cols) {
    throw std::length_error("subproblem_bruteforce: problem exceeds element cap");
  }
  // U^(N) (x) ... (x) U^(n+1) (x) U^(n-1) (x) ... (x) U^(1)
  Matrix m2 = Matrix::Identity(1, 1);
  for (std::size_t k = a.order(); k-- > 0;) {
    if (k == mode) continue;
    m2 = kron(m2, factors[k], element_cap);
  }
  const Matrix an = unfold(a, mode);
  const Matrix projected = an * m2;

  Eigen::HouseholderQR<Matrix> qr(m2);
  const Matrix q = qr.householderQ() * Matrix::Identity(m2.rows(), m2.rows());
  const Matrix complement = q.rightCols(m2.rows() - m2.cols());
  const double outside = (an * complement).squaredNorm();

  const SvdFactors svd = full_svd(projected, RightVectors::skip);
  const std::size_t r = std::min(rank, svd.sigma.size());
  return tail_energy(svd.sigma, r) + outside;
}

}  // namespace tucker_ra
