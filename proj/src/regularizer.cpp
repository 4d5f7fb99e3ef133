#include "fpl/regularizer.hpp"

#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace fpl {
namespace {

constexpr int kGaussPoints = 24;

struct GaussRule {
  std::array<double, kGaussPoints> nodes{};    // on [0, 1]
  std::array<double, kGaussPoints> weights{};  // sum to 1
};

// Golub-Welsch on the Legendre Jacobi matrix.
GaussRule make_gauss_rule() {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(kGaussPoints, kGaussPoints);
  for (int k = 1; k < kGaussPoints; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = beta;
    J(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  GaussRule rule;
  for (int k = 0; k < kGaussPoints; ++k) {
    const double v0 = eig.eigenvectors()(0, k);
    rule.nodes[k] = 0.5 * (eig.eigenvalues()[k] + 1.0);
    rule.weights[k] = v0 * v0;  // 2 v0^2 on [-1,1], halved for [0,1]
  }
  return rule;
}

const GaussRule& gauss_rule() {
  static const GaussRule rule = make_gauss_rule();
  return rule;
}

// int_0^tau (eps + sigma)^q dsigma without cancellation for tau << eps.
double identity_branch(double tau, double epsilon, double q) {
  if (q == 0.0) return tau;
  return std::pow(epsilon, q + 1.0) * std::expm1((q + 1.0) * std::log1p(tau / epsilon)) /
         (q + 1.0);
}

}  // namespace

double f_n_primitive(double tau, int n, double epsilon, double p) {
  detail::require_nonnegative(tau);
  const double q = 0.5 * (p - 2.0);
  const double n2 = static_cast<double>(n) * n;
  if (tau <= n2) return identity_branch(tau, epsilon, q);

  double value = identity_branch(n2, epsilon, q);
  const double t_end = std::min(tau - n2, 1.0);
  if (q == 0.0) {
    value += t_end;
  } else {
    const GaussRule& rule = gauss_rule();
    double blend_part = 0.0;
    for (int k = 0; k < kGaussPoints; ++k) {
      const double t = t_end * rule.nodes[k];
      blend_part += rule.weights[k] * std::pow(epsilon + n2 + detail::blend(t), q);
    }
    value += t_end * blend_part;
  }
  if (tau > n2 + 1.0) value += std::pow(epsilon + n2 + 1.0, q) * (tau - n2 - 1.0);
  return value;
}

}  // namespace fpl
