#ifndef HYBRIDGRAD_PROBLEM_HPP
#define HYBRIDGRAD_PROBLEM_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>

#include "hybridgrad/types.hpp"

namespace hybridgrad {

/// Regularity constants of an objective. The curvature of f is sandwiched as
/// -ell_f |v|^2 <= <H(x)v, v> <= L_f |v|^2, the gradient dominates the gap as
/// 0.5 |grad f(x)|^2 >= mu_f (f(x) - f_star), and the Hessian is H_f-Lipschitz.
struct Constants {
  double L_f = 0.0;
  double ell_f = 0.0;
  double mu_f = 0.0;
  double H_f = 0.0;
  std::optional<double> f_star;  // optimal value, when analytically known
};

/// A twice-differentiable objective. Second-order information is exposed only
/// through the quadratic form <H(x)v, v>, which is all the feedback laws need.
/// Instances are immutable after construction and safe to share across threads.
struct Problem {
  Eigen::Index dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<double(const Vector&, const Vector&)> hessian_quad;
  Constants constants;
  // Radius of the ball around the origin on which mu_f is claimed; infinite
  // for globally gradient-dominated objectives.
  double pl_radius = std::numeric_limits<double>::infinity();
};

/// f(x) = 0.5 x^T Q x + c^T x for symmetric positive definite Q.
/// Constants and f_star are computed exactly from an eigen-solve of Q.
Problem make_quadratic(const Matrix& Q, const Vector& c);

/// f(x) = |Ax - b|^2 for an explicit design matrix / target pair. Rejects
/// rank-deficient A (the gradient-domination constant would vanish).
Problem make_lmse(const Matrix& A, const Vector& b);

/// Seeded least-mean-square-error instance: A in R^{rows x cols} and b in
/// R^{rows} are drawn entry by entry (A row-major first, then b) from a
/// standard normal generator driven by mt19937_64(seed).
Problem make_lmse(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

/// Log-loss f(x) = sum_i log(1 + exp(labels_i * <features_i, x>)) with labels
/// in {-1, +1}. The gradient-domination constant is caller-supplied: the loss
/// is only locally gradient-dominated (inside |x| <= box_radius) and there is
/// no closed-form constant to derive.
Problem make_logistic(const Matrix& features, const Vector& labels,
                      double box_radius, double mu_f);

struct FdReport {
  double grad_err;  // relative deviation of the gradient from central differences of f
  double hess_err;  // relative deviation of <H(x)v, v> from central differences of <grad f, v>
};

/// Central finite-difference probe of the gradient and of the Hessian
/// quadratic form along a random unit direction. Returns the measured
/// relative errors; never throws on large errors.
FdReport fd_check(const Problem& problem, const Vector& x, double h,
                  std::uint64_t seed = 0);

}  // namespace hybridgrad

#endif  // HYBRIDGRAD_PROBLEM_HPP
