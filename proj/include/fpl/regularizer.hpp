#ifndef FPL_REGULARIZER_HPP_
#define FPL_REGULARIZER_HPP_

#include <cmath>
#include <stdexcept>

namespace fpl {

/// Overshoot bound of the cubic blend: max_t t^2 (1 - t) = 4/27 at t = 2/3.
inline constexpr double kBlendOvershoot = 4.0 / 27.0;

/// Regularization pair (epsilon, n) of the (eps, p)-regularized operator.
struct RegParams {
  double epsilon = 1e-2;
  int n = 1;
  double delta = kBlendOvershoot;

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
  }
};

namespace detail {

template <typename Scalar>
Scalar blend(Scalar t) {
  return t * (Scalar(1) + t * (Scalar(1) - t));  // -t^3 + t^2 + t
}

template <typename Scalar>
Scalar blend_prime(Scalar t) {
  return Scalar(1) + t * (Scalar(2) - Scalar(3) * t);  // -3t^2 + 2t + 1
}

template <typename Scalar>
void require_nonnegative(Scalar tau) {
  if (!(tau >= Scalar(0))) throw std::invalid_argument("F_n requires tau >= 0");
}

}  // namespace detail

/// C^1 cutoff: identity up to n^2, constant n^2+1 beyond n^2+1, cubic
/// Hermite blend in between with tau <= F_n(tau) <= tau + 4/27.
template <typename Scalar>
Scalar f_n(Scalar tau, int n) {
  detail::require_nonnegative(tau);
  const Scalar n2 = Scalar(n) * Scalar(n);
  if (tau <= n2) return tau;
  if (tau > n2 + Scalar(1)) return n2 + Scalar(1);
  return n2 + detail::blend(tau - n2);
}

template <typename Scalar>
Scalar f_n_prime(Scalar tau, int n) {
  detail::require_nonnegative(tau);
  const Scalar n2 = Scalar(n) * Scalar(n);
  if (tau < n2) return Scalar(1);
  if (tau > n2 + Scalar(1)) return Scalar(0);
  return detail::blend_prime(tau - n2);
}

/// G_n for one pair: F_n(|du|^2 / dx^{2s}).
template <typename Scalar>
Scalar g_n(Scalar du, Scalar dx, Scalar s, int n) {
  if (!(dx > Scalar(0))) throw std::invalid_argument("g_n requires dx > 0");
  using std::pow;
  return f_n(du * du / pow(dx, Scalar(2) * s), n);
}

/// Phi(tau) = int_0^tau [eps + F_n(sigma)]^{(p-2)/2} dsigma, the primitive
/// that turns the regularized form into a gradient.
double f_n_primitive(double tau, int n, double epsilon, double p);

}  // namespace fpl

#endif  // FPL_REGULARIZER_HPP_
