#include "hybridgrad/problem.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hybridgrad {

namespace {

double log1p_exp(double z) {
  // log(1 + e^z) without overflow for large |z|
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

Problem make_quadratic(const Matrix& Q, const Vector& c) {
  if (Q.rows() != Q.cols())
    throw std::invalid_argument("quadratic: Q must be square");
  if (c.size() != Q.rows())
    throw std::invalid_argument("quadratic: c dimension mismatch");
  if (!Q.isApprox(Q.transpose()))
    throw std::invalid_argument("quadratic: Q must be symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> es(Q);
  const double lambda_min = es.eigenvalues().minCoeff();
  const double lambda_max = es.eigenvalues().maxCoeff();
  if (lambda_min <= 0.0)
    throw std::invalid_argument("quadratic: Q must be positive definite");

  const Vector x_star = Q.llt().solve(-c);
  const double f_star = 0.5 * x_star.dot(Q * x_star) + c.dot(x_star);

  Problem p;
  p.dim = Q.rows();
  p.value = [Q, c](const Vector& x) { return 0.5 * x.dot(Q * x) + c.dot(x); };
  p.gradient = [Q, c](const Vector& x) { return Vector(Q * x + c); };
  p.hessian_quad = [Q](const Vector&, const Vector& v) { return v.dot(Q * v); };
  p.constants = Constants{lambda_max, 0.0, lambda_min, 0.0, f_star};
  return p;
}

Problem make_lmse(const Matrix& A, const Vector& b) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (n < 1 || m < n)
    throw std::invalid_argument("lmse: need rows >= cols >= 1");
  if (b.size() != m) throw std::invalid_argument("lmse: b dimension mismatch");

  const Matrix gram = A.transpose() * A;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  const double lambda_min = es.eigenvalues().minCoeff();
  const double lambda_max = es.eigenvalues().maxCoeff();
  if (lambda_min <= 1e-12 * lambda_max) {
    std::ostringstream msg;
    msg << "lmse: design matrix is rank-deficient (lambda_min(A^T A) = "
        << lambda_min << "); the gradient-domination constant would be zero";
    throw std::invalid_argument(msg.str());
  }

  // Normal-equations solution; exact for a full-rank Gram matrix.
  const Vector x_star = gram.ldlt().solve(A.transpose() * b);
  const double f_star = (A * x_star - b).squaredNorm();

  Problem p;
  p.dim = n;
  p.value = [A, b](const Vector& x) { return (A * x - b).squaredNorm(); };
  p.gradient = [A, b](const Vector& x) {
    return Vector(2.0 * (A.transpose() * (A * x - b)));
  };
  p.hessian_quad = [A](const Vector&, const Vector& v) {
    return 2.0 * (A * v).squaredNorm();
  };
  p.constants = Constants{2.0 * lambda_max, 0.0, 2.0 * lambda_min, 0.0, f_star};
  return p;
}

Problem make_lmse(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  if (cols < 1 || rows < cols)
    throw std::invalid_argument("lmse: need rows >= cols >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix A(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) A(i, j) = gauss(rng);
  Vector b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) b(i) = gauss(rng);
  return make_lmse(A, b);
}

Problem make_logistic(const Matrix& features, const Vector& labels,
                      double box_radius, double mu_f) {
  const Eigen::Index m = features.rows();
  const Eigen::Index n = features.cols();
  if (m == 0 || n == 0) throw std::invalid_argument("logistic: empty data");
  if (labels.size() != m)
    throw std::invalid_argument("logistic: label dimension mismatch");
  for (Eigen::Index i = 0; i < m; ++i)
    if (labels(i) != 1.0 && labels(i) != -1.0)
      throw std::invalid_argument("logistic: labels must be +/-1");
  if (box_radius <= 0.0)
    throw std::invalid_argument("logistic: box_radius must be positive");
  if (mu_f <= 0.0)
    throw std::invalid_argument("logistic: mu_f must be positive");

  Eigen::SelfAdjointEigenSolver<Matrix> es(features.transpose() * features);
  const double L_f = es.eigenvalues().maxCoeff() / 4.0;

  // |sigma''| <= 1/(6 sqrt 3), so the Hessian sum_i sigma'(z_i) a_i a_i^T is
  // Lipschitz with constant (1/(6 sqrt 3)) sum_i |a_i|^3.
  double cube_sum = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    cube_sum += std::pow(features.row(i).norm(), 3);
  const double H_f = cube_sum / (6.0 * std::sqrt(3.0));

  Problem p;
  p.dim = n;
  p.value = [features, labels](const Vector& x) {
    const Vector z = labels.cwiseProduct(features * x);
    double f = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) f += log1p_exp(z(i));
    return f;
  };
  p.gradient = [features, labels](const Vector& x) {
    const Vector z = labels.cwiseProduct(features * x);
    Vector w(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) w(i) = sigmoid(z(i)) * labels(i);
    return Vector(features.transpose() * w);
  };
  p.hessian_quad = [features, labels](const Vector& x, const Vector& v) {
    const Vector z = labels.cwiseProduct(features * x);
    const Vector av = features * v;
    double q = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double s = sigmoid(z(i));
      q += s * (1.0 - s) * av(i) * av(i);
    }
    return q;
  };
  p.constants = Constants{L_f, 0.0, mu_f, H_f, std::nullopt};
  p.pl_radius = box_radius;
  return p;
}

FdReport fd_check(const Problem& problem, const Vector& x, double h,
                  std::uint64_t seed) {
  if (h <= 0.0) throw std::invalid_argument("fd_check: h must be positive");
  const Eigen::Index n = problem.dim;

  Vector grad_fd(n);
  Vector e = Vector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e(j) = h;
    grad_fd(j) = (problem.value(x + e) - problem.value(x - e)) / (2.0 * h);
    e(j) = 0.0;
  }
  const Vector g = problem.gradient(x);
  const double grad_err = (grad_fd - g).norm() / (1.0 + g.norm());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index j = 0; j < n; ++j) v(j) = gauss(rng);
  if (v.norm() == 0.0) v.setConstant(1.0);
  v.normalize();

  const double quad_fd = (problem.gradient(x + h * v).dot(v) -
                          problem.gradient(x - h * v).dot(v)) /
                         (2.0 * h);
  const double quad = problem.hessian_quad(x, v);
  const double hess_err = std::abs(quad_fd - quad) / (1.0 + std::abs(quad));

  return FdReport{grad_err, hess_err};
}

}  // namespace hybridgrad
