#pragma once

// One-pass HOSVD baselines: truncated HOSVD, sequentially truncated HOSVD,
// their uniform-budget tolerance variants, and the greedy truncation searches.

#include "tucker_ra/svdrank.hpp"
#include "tucker_ra/tensor.hpp"
#include "tucker_ra/tucker_model.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace tucker_ra {

/// Relative threshold used when a numerical multilinear rank is needed as a
/// starting point (top-down greedy search).
inline constexpr double kNumericalRankTol = 1e-12;

namespace detail {

inline void check_tolerance(double eps, const char* who) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument(std::string(who) + ": tolerance must lie in (0, 1)");
}

inline void check_truncation(const Shape& shape, const Truncation& trunc, const char* who) {
  if (trunc.order() != shape.size()) {
    throw std::invalid_argument(std::string(who) + ": truncation order " + std::to_string(trunc.order()) +
                                " != tensor order " + std::to_string(shape.size()));
  }
  for (std::size_t n = 0; n < shape.size(); ++n) {
    if (trunc[n] > shape[n]) {
      throw std::invalid_argument(std::string(who) + ": rank " + std::to_string(trunc[n]) + " exceeds dimension " +
                                  std::to_string(shape[n]) + " in mode " + std::to_string(n + 1));
    }
  }
}

// Leading `rank` left singular vectors, padded with an orthonormal complement
// when the unfolding has fewer columns than `rank`.
inline Matrix leading_vectors(const SvdFactors& svd, std::size_t rank) {
  const auto have = static_cast<std::size_t>(svd.u.cols());
  const auto rows = svd.u.rows();
  if (rank <= have) return svd.u.leftCols(static_cast<Eigen::Index>(rank));
  Matrix out(rows, static_cast<Eigen::Index>(rank));
  out.leftCols(static_cast<Eigen::Index>(have)) = svd.u;
  Eigen::HouseholderQR<Matrix> qr(svd.u);
  const Matrix q = qr.householderQ() * Matrix::Identity(rows, rows);
  out.rightCols(static_cast<Eigen::Index>(rank - have)) =
      q.middleCols(static_cast<Eigen::Index>(have), static_cast<Eigen::Index>(rank - have));
  return out;
}

using RankRule = std::function<std::size_t(std::size_t mode, const std::vector<double>& sigma)>;

}  // namespace detail

/// Left singular factors of every unfolding of `a`.
inline std::vector<SvdFactors> mode_svds(const DenseTensor& a) {
  std::vector<SvdFactors> out;
  out.reserve(a.order());
  for (std::size_t n = 0; n < a.order(); ++n) out.push_back(full_svd(unfold(a, n), RightVectors::skip));
  return out;
}

/// t-HOSVD model at `trunc` from precomputed unfolding SVDs.
inline TuckerModel t_hosvd_from_svds(const DenseTensor& a, const std::vector<SvdFactors>& svds, const Truncation& trunc) {
  detail::check_truncation(a.shape(), trunc, "t_hosvd");
  std::vector<Matrix> factors;
  factors.reserve(a.order());
  for (std::size_t n = 0; n < a.order(); ++n) factors.push_back(detail::leading_vectors(svds[n], trunc[n]));
  return project_model(a, std::move(factors));
}

inline TuckerModel t_hosvd_rank(const DenseTensor& a, const Truncation& trunc) {
  detail::check_truncation(a.shape(), trunc, "t_hosvd_rank");
  return t_hosvd_from_svds(a, mode_svds(a), trunc);
}

inline TuckerModel t_hosvd_tol(const DenseTensor& a, double eps) {
  detail::check_tolerance(eps, "t_hosvd_tol");
  const auto svds = mode_svds(a);
  const double budget = eps * eps * squared_norm(a) / static_cast<double>(a.order());
  std::vector<std::size_t> ranks;
  for (const auto& s : svds) ranks.push_back(select_rank(s.sigma, budget));
  return t_hosvd_from_svds(a, svds, Truncation(ranks));
}

struct StHosvdTrace {
  TuckerModel model;
  // Tail energy dropped at each step, in processing order.
  std::vector<double> discarded;
};

inline std::vector<std::size_t> ascending_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

namespace detail {

inline StHosvdTrace st_hosvd_impl(const DenseTensor& a, const std::vector<std::size_t>& order, const RankRule& rule) {
  std::vector<bool> seen(a.order(), false);
  if (order.size() != a.order()) throw std::invalid_argument("st_hosvd: order must list every mode once");
  for (std::size_t m : order) {
    if (m >= a.order() || seen[m]) throw std::invalid_argument("st_hosvd: order must be a permutation of the modes");
    seen[m] = true;
  }

  StHosvdTrace out;
  out.model.factors.resize(a.order());
  DenseTensor current = a;
  for (std::size_t n : order) {
    const SvdFactors svd = full_svd(unfold(current, n), RightVectors::skip);
    const std::size_t rank = rule(n, svd.sigma);
    out.discarded.push_back(rank <= svd.sigma.size() ? tail_energy(svd.sigma, rank) : 0.0);
    out.model.factors[n] = leading_vectors(svd, rank);
    current = ttm(current, out.model.factors[n], n, Transpose::yes);
  }
  out.model.core = std::move(current);
  return out;
}

}  // namespace detail

inline StHosvdTrace st_hosvd_rank_trace(const DenseTensor& a, const Truncation& trunc,
                                        const std::vector<std::size_t>& order) {
  detail::check_truncation(a.shape(), trunc, "st_hosvd_rank");
  return detail::st_hosvd_impl(a, order, [&](std::size_t n, const std::vector<double>&) { return trunc[n]; });
}

inline TuckerModel st_hosvd_rank(const DenseTensor& a, const Truncation& trunc,
                                 const std::vector<std::size_t>& order) {
  return st_hosvd_rank_trace(a, trunc, order).model;
}

inline TuckerModel st_hosvd_rank(const DenseTensor& a, const Truncation& trunc) {
  return st_hosvd_rank(a, trunc, ascending_order(a.order()));
}

inline StHosvdTrace st_hosvd_tol_trace(const DenseTensor& a, double eps, const std::vector<std::size_t>& order) {
  detail::check_tolerance(eps, "st_hosvd_tol");
  const double budget = eps * eps * squared_norm(a) / static_cast<double>(a.order());
  return detail::st_hosvd_impl(a, order,
                               [&](std::size_t, const std::vector<double>& sigma) { return select_rank(sigma, budget); });
}

inline TuckerModel st_hosvd_tol(const DenseTensor& a, double eps) {
  return st_hosvd_tol_trace(a, eps, ascending_order(a.order())).model;
}

// ---------------------------------------------------------------------------
// Greedy truncation search over the sum-of-tails surrogate
//   E(R) = sum_n tail_energy(sigma_n, R_n),
// an upper bound on the squared t-HOSVD error.

struct GreedySearch {
  Truncation truncation;
  double surrogate = 0.0;
  std::vector<Truncation> path;  // every visited truncation, start included
};

inline double surrogate_error(const std::vector<std::vector<double>>& spectra, const std::vector<std::size_t>& ranks) {
  double e = 0.0;
  for (std::size_t n = 0; n < spectra.size(); ++n) e += tail_energy(spectra[n], ranks[n]);
  return e;
}

namespace detail {

// Mode whose increment removes the most surrogate error; lowest index on ties.
// Returns spectra.size() when no mode can grow.
inline std::size_t best_increment(const std::vector<std::vector<double>>& spectra,
                                  const std::vector<std::size_t>& ranks) {
  std::size_t best = spectra.size();
  double best_drop = -1.0;
  for (std::size_t n = 0; n < spectra.size(); ++n) {
    if (ranks[n] >= spectra[n].size()) continue;
    const double drop = spectra[n][ranks[n]] * spectra[n][ranks[n]];
    if (drop > best_drop) {
      best = n;
      best_drop = drop;
    }
  }
  return best;
}

}  // namespace detail

/// Grows ranks from (1, ..., 1) until the surrogate fits in `budget`.
inline GreedySearch greedy_search_bottom_up(const std::vector<std::vector<double>>& spectra, double budget) {
  std::vector<std::size_t> ranks(spectra.size(), 1);
  GreedySearch out;
  out.path.emplace_back(ranks);
  double e = surrogate_error(spectra, ranks);
  while (e > budget) {
    const std::size_t n = detail::best_increment(spectra, ranks);
    if (n == spectra.size()) break;
    ++ranks[n];
    e = surrogate_error(spectra, ranks);
    out.path.emplace_back(ranks);
  }
  out.truncation = Truncation(ranks);
  out.surrogate = e;
  return out;
}

/// Shrinks ranks from `start`, each step dropping the direction that adds
/// the least surrogate error, while the surrogate stays within `budget`.
inline GreedySearch greedy_search_top_down(const std::vector<std::vector<double>>& spectra,
                                           std::vector<std::size_t> start, double budget) {
  if (start.size() != spectra.size()) throw std::invalid_argument("greedy_search_top_down: start order mismatch");
  for (std::size_t n = 0; n < start.size(); ++n) start[n] = std::clamp<std::size_t>(start[n], 1, spectra[n].size());
  GreedySearch out;
  out.path.emplace_back(start);
  double e = surrogate_error(spectra, start);
  for (;;) {
    std::size_t best = spectra.size();
    double best_add = 0.0;
    for (std::size_t n = 0; n < spectra.size(); ++n) {
      if (start[n] <= 1) continue;
      const double add = spectra[n][start[n] - 1] * spectra[n][start[n] - 1];
      if (e + add > budget) continue;
      if (best == spectra.size() || add < best_add) {
        best = n;
        best_add = add;
      }
    }
    if (best == spectra.size()) break;
    --start[best];
    e = surrogate_error(spectra, start);
    out.path.emplace_back(start);
  }
  out.truncation = Truncation(start);
  out.surrogate = e;
  return out;
}

namespace detail {

inline std::vector<std::vector<double>> spectra_of(const std::vector<SvdFactors>& svds) {
  std::vector<std::vector<double>> out;
  out.reserve(svds.size());
  for (const auto& s : svds) out.push_back(s.sigma);
  return out;
}

// Materializes t-HOSVD at the searched truncation and grows it until the exact
// error meets the tolerance. The surrogate bounds the true error, so the loop
// only runs if something upstream is wrong.
inline TuckerModel materialize_checked(const DenseTensor& a, const std::vector<SvdFactors>& svds,
                                       std::vector<std::size_t> ranks, double eps) {
  const auto spectra = spectra_of(svds);
  TuckerModel model = t_hosvd_from_svds(a, svds, Truncation(ranks));
  while (rel_error(a, model) > eps) {
    const std::size_t n = best_increment(spectra, ranks);
    if (n == spectra.size()) break;
    ++ranks[n];
    model = t_hosvd_from_svds(a, svds, Truncation(ranks));
  }
  return model;
}

}  // namespace detail

inline TuckerModel greedy_hosvd_bottom_up(const DenseTensor& a, double eps) {
  detail::check_tolerance(eps, "greedy_hosvd_bottom_up");
  const auto svds = mode_svds(a);
  const double budget = eps * eps * squared_norm(a);
  const GreedySearch found = greedy_search_bottom_up(detail::spectra_of(svds), budget);
  return detail::materialize_checked(a, svds, found.truncation.ranks(), eps);
}

inline TuckerModel greedy_hosvd_top_down(const DenseTensor& a, double eps) {
  detail::check_tolerance(eps, "greedy_hosvd_top_down");
  const auto svds = mode_svds(a);
  const auto spectra = detail::spectra_of(svds);
  std::vector<std::size_t> start(a.order());
  for (std::size_t n = 0; n < a.order(); ++n) {
    const auto& s = spectra[n];
    const double cutoff = kNumericalRankTol * s.front();
    start[n] = static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [&](double v) { return v > cutoff; }));
  }
  const double budget = eps * eps * squared_norm(a);
  const GreedySearch found = greedy_search_top_down(spectra, start, budget);
  return detail::materialize_checked(a, svds, found.truncation.ranks(), eps);
}

}  // namespace tucker_ra
