#pragma once

// Exponent bookkeeping of the bootstrap argument: the constant system
// (p1, qbar, lambda_q, lambda, theta, alpha), its two feasibility conditions
// (alpha > 1 and 1 < theta qbar alpha' / p1 < q), the step-count / radius
// schedule of the iteration, and the window-integral monitor it feeds. The
// arithmetic is templated so that rational inputs stay exact end to end.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgs/quadrature.hpp"
#include "pgs/rational.hpp"
#include "pgs/selfsimilar.hpp"

namespace pgs {

class InfeasibleScheduleError : public std::runtime_error {
 public:
  InfeasibleScheduleError(const std::string& condition, const std::string& detail)
      : std::runtime_error("infeasible exponent schedule, violated " + condition + ": " + detail),
        condition_(condition) {}
  const std::string& condition() const { return condition_; }

 private:
  std::string condition_;
};

template <class Scalar>
struct ExponentScheduleT {
  Scalar p, q;
  Scalar p1;        // 1 + 1/p
  Scalar qbar;      // q < qbar < q + 1/(p+1)
  Scalar lambda_q;  // p + 1 - (p-1)/(q+1)
  Scalar lambda;    // 2 < lambda < lambda_q
  Scalar theta;     // (p+1)(lambda-2) / ((p-1) lambda)
  Scalar alpha;     // 2 / ((1-theta) qbar)
  Scalar alpha_conj;
  Scalar holder_ratio;  // theta qbar alpha_conj / p1
};

using ExponentSchedule = ExponentScheduleT<double>;
using ExactExponentSchedule = ExponentScheduleT<Rational>;

template <class Scalar>
ExponentScheduleT<Scalar> compute_schedule(Scalar p, Scalar q, Scalar qbar, Scalar lambda) {
  const Scalar one(1), two(2);
  if (!(p > one)) throw std::domain_error("exponent schedule: p must be > 1");
  if (!(q >= two)) throw std::domain_error("exponent schedule: q must be >= 2");
  ExponentScheduleT<Scalar> s{};
  s.p = p;
  s.q = q;
  s.p1 = one + one / p;
  s.qbar = qbar;
  s.lambda_q = p + one - (p - one) / (q + one);
  s.lambda = lambda;
  if (!(q < qbar) || !(qbar < q + one / (p + one)))
    throw InfeasibleScheduleError("the qbar window", "need q < qbar < q + 1/(p+1)");
  if (!(two < lambda) || !(lambda < s.lambda_q))
    throw InfeasibleScheduleError("the lambda window", "need 2 < lambda < lambda_q");
  s.theta = (p + one) * (lambda - two) / ((p - one) * lambda);
  const Scalar denom = (one - s.theta) * qbar;
  s.alpha = two / denom;
  if (!(s.alpha > one))
    throw InfeasibleScheduleError("the exponent condition alpha > 1", "alpha = 2/((1-theta) qbar) <= 1");
  s.alpha_conj = s.alpha / (s.alpha - one);
  s.holder_ratio = s.theta * s.qbar * s.alpha_conj / s.p1;
  if (!(one < s.holder_ratio) || !(s.holder_ratio < q))
    throw InfeasibleScheduleError("the Hoelder-ratio condition", "need 1 < theta qbar alpha'/p1 < q");
  return s;
}

namespace detail {

inline double default_qbar(double p, double q) { return q + 1.0 / (2.0 * (p + 1.0)); }

inline bool schedule_feasible(double p, double q, double qbar, double lambda) {
  try {
    compute_schedule<double>(p, q, qbar, lambda);
    return true;
  } catch (const InfeasibleScheduleError&) {
    return false;
  }
}

}  // namespace detail

// Fills the default qbar (midpoint of the admissible window) and, when lambda
// is not supplied, finds a feasible lambda by bisection on the conjunction of
// the two feasibility conditions. Both threshold expressions are monotone
// increasing on (2, lambda_q), so feasibility is an upper subinterval and the
// search starts from lambda_q - 1e-6.
inline ExponentSchedule exponent_schedule(double p, double q, std::optional<double> qbar = std::nullopt,
                                          std::optional<double> lambda = std::nullopt) {
  if (!(p > 1.0)) throw std::domain_error("exponent schedule: p must be > 1");
  if (!(q >= 2.0)) throw std::domain_error("exponent schedule: q must be >= 2");
  const double qb = qbar.value_or(detail::default_qbar(p, q));
  if (lambda) return compute_schedule<double>(p, q, qb, *lambda);
  const double lambda_q = p + 1.0 - (p - 1.0) / (q + 1.0);
  double hi = lambda_q - 1e-6;
  if (!detail::schedule_feasible(p, q, qb, hi))
    throw InfeasibleScheduleError("the lambda search",
                                  "no feasible lambda below lambda_q for this (p, q, qbar)");
  double lo = 2.0;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (detail::schedule_feasible(p, q, qb, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return compute_schedule<double>(p, q, qb, hi);
}

struct BootstrapStage {
  Rational q;
  double radius;
};

struct BootstrapChain {
  int steps = 0;  // m = floor((p+1)(q_target - 2)) + 1, 0 for the base case
  std::vector<BootstrapStage> stages;
};

// Radius / integrability schedule of the iteration: m steps of exponent gain
// 1/(p+1) starting from q = 2, radii shrinking by 4 from 4^m R_target. The
// final exponent is capped just below q_target to respect the strict
// inequality qbar < q + 1/(p+1).
inline BootstrapChain bootstrap_chain(const Rational& p, const Rational& q_target, double R_target) {
  if (!(p > Rational(1))) throw std::domain_error("bootstrap_chain: p must be > 1");
  if (!(q_target >= Rational(2))) throw std::domain_error("bootstrap_chain: q_target must be >= 2");
  if (!(R_target > 0.0)) throw std::domain_error("bootstrap_chain: R_target must be positive");
  BootstrapChain chain;
  if (q_target == Rational(2)) {
    chain.steps = 0;
    chain.stages.push_back({Rational(2), R_target});
    return chain;
  }
  const Rational excess = (p + Rational(1)) * (q_target - Rational(2));
  chain.steps = static_cast<int>(excess.floor()) + 1;
  // per-step gain stays strictly below 1/(p+1); the floor(.)+1 step count
  // leaves enough slack that the shaved gain still reaches the capped target
  // for any chain shorter than 4096 steps
  const Rational gain = Rational(4095, 4096) / (p + Rational(1));
  const Rational cap = q_target - Rational(1, 1000000000);
  double radius = R_target;
  for (int k = 0; k < chain.steps; ++k) radius *= 4.0;
  Rational qk(2);
  chain.stages.push_back({qk, radius});
  for (int k = 1; k <= chain.steps; ++k) {
    qk = qk + gain;
    if (!(qk < cap)) qk = cap;
    radius /= 4.0;
    chain.stages.push_back({qk, radius});
  }
  return chain;
}

struct StageWindowExtrema {
  double q;
  double radius;
  double max_window;
  double min_window;
};

// Sliding unit-window integrals of ||W; W^{1,2}_rho(B_R)||^{2q} for each
// chain stage; boundedness of the maximum is the monitored statement, the
// constants themselves are not computed.
inline std::vector<StageWindowExtrema> verify_schedule_on_run(const BootstrapChain& chain,
                                                              const RescaledTrajectory& traj,
                                                              const SystemParams& params) {
  if (traj.span() < 2.0 * (1.0 - 1e-12))
    throw std::invalid_argument("verify_schedule_on_run: trajectory must span at least 2 units of s");
  std::vector<StageWindowExtrema> out;
  const auto per_window = static_cast<std::size_t>(std::llround(1.0 / traj.ds));
  for (const auto& stage : chain.stages) {
    if (stage.radius > traj.frames.front().grid().half_extent() * (1.0 + 1e-12))
      throw TruncationError("verify_schedule_on_run: stage radius exceeds the grid");
    std::vector<double> norm(traj.frames.size());
    for (std::size_t k = 0; k < traj.frames.size(); ++k)
      norm[k] = weighted_sobolev_norm(traj.frames[k], params.beta_exp(), stage.radius);
    const double expo = 2.0 * stage.q.to_double();
    double best = -std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + per_window < norm.size(); ++k) {
      double acc = 0.0;
      for (std::size_t j = k; j < k + per_window; ++j)
        acc += 0.5 * (std::pow(norm[j], expo) + std::pow(norm[j + 1], expo)) * traj.ds;
      best = std::max(best, acc);
      worst = std::min(worst, acc);
    }
    out.push_back({stage.q.to_double(), stage.radius, best, worst});
  }
  return out;
}

}  // namespace pgs
