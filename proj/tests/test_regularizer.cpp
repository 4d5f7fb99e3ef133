#include <doctest.h>

#include <random>

#include "fpl/regularizer.hpp"

using namespace fpl;

TEST_CASE("f_n branch values") {
  CHECK(f_n(1.0, 2) == 1.0);
  CHECK(f_n(6.0, 2) == 5.0);
  CHECK(f_n(4.5, 2) == doctest::Approx(4.625).epsilon(1e-15));
  CHECK(f_n(0.0, 1) == 0.0);
}

TEST_CASE("f_n derivative values") {
  CHECK(f_n_prime(1.0, 2) == 1.0);
  CHECK(f_n_prime(6.0, 2) == 0.0);
  CHECK(f_n_prime(4.5, 2) == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("negative arguments are rejected") {
  CHECK_THROWS_AS(f_n(-1e-12, 1), std::invalid_argument);
  CHECK_THROWS_AS(f_n_prime(-1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(g_n(1.0, 0.0, 0.75, 1), std::invalid_argument);
}

TEST_CASE("g_n composes f_n with the s-difference quotient") {
  CHECK(g_n(0.0, 0.25, 0.75, 2) == 0.0);
  CHECK(g_n(0.1, 0.25, 0.75, 2) == doctest::Approx(0.08).epsilon(1e-13));
  CHECK(g_n(10.0, 0.25, 0.75, 2) == 5.0);
}

TEST_CASE("sandwich, monotonicity and the overshoot bound") {
  std::mt19937_64 rng(11);
  for (int n : {1, 2, 4, 8}) {
    const double n2 = double(n) * n;
    std::uniform_real_distribution<double> blend(n2, n2 + 1.0);
    double prev_f = 0.0, max_gap = 0.0;
    for (int i = 0; i <= 4000; ++i) {
      const double tau = 2.0 * (n2 + 1.0) * i / 4000.0;
      const double f = f_n(tau, n);
      CHECK(f >= prev_f);
      prev_f = f;
    }
    for (int i = 0; i < 2000; ++i) {
      const double tau = blend(rng);
      const double f = f_n(tau, n);
      CHECK(f >= tau);
      CHECK(f <= tau + kBlendOvershoot + 1e-15);
      max_gap = std::max(max_gap, f - tau);
    }
    // The bound is attained at t = 2/3.
    CHECK(f_n(n2 + 2.0 / 3.0, n) - (n2 + 2.0 / 3.0) == doctest::Approx(kBlendOvershoot));
    CHECK(max_gap <= kBlendOvershoot);
  }
}

TEST_CASE("derivative matches centered differences, including the junctions") {
  const double step = 1e-7;
  for (int n : {1, 2, 4, 8}) {
    const double n2 = double(n) * n;
    std::vector<double> taus = {n2 - 1e-9, n2, n2 + 1e-9, n2 + 1.0 - 1e-9, n2 + 1.0,
                                n2 + 1.0 + 1e-9};
    for (int i = 1; i < 400; ++i) taus.push_back(2.0 * (n2 + 1.0) * i / 400.0);
    for (double tau : taus) {
      const double fd = (f_n(tau + step, n) - f_n(tau - step, n)) / (2.0 * step);
      CHECK(std::abs(f_n_prime(tau, n) - fd) <= 1e-6);
    }
  }
}

TEST_CASE("primitive differentiates back to the integrand") {
  for (double p : {2.0, 3.0, 4.0, 5.5}) {
    for (int n : {1, 3}) {
      const double eps = 1e-2;
      const double n2 = double(n) * n;
      for (double tau : {0.0, 0.3, n2 - 0.2, n2 + 0.4, n2 + 0.9, n2 + 3.0}) {
        const double t = std::max(tau, 1e-6);
        const double fd = (f_n_primitive(t + 1e-6, n, eps, p) - f_n_primitive(t - 1e-6, n, eps, p)) / 2e-6;
        const double integrand = std::pow(eps + f_n(t, n), 0.5 * (p - 2.0));
        CHECK(fd == doctest::Approx(integrand).epsilon(1e-6));
      }
      CHECK(f_n_primitive(0.0, n, eps, p) == 0.0);
    }
  }
}

TEST_CASE("primitive is exact on the identity branch") {
  const double eps = 0.05, p = 4.0;
  // integral_0^tau (eps + s) ds
  CHECK(f_n_primitive(0.7, 1, eps, p) == doctest::Approx(eps * 0.7 + 0.245).epsilon(1e-14));
  // p = 2: integrand is 1
  CHECK(f_n_primitive(17.3, 2, eps, 2.0) == doctest::Approx(17.3).epsilon(1e-14));
}

TEST_CASE("regularization parameters are validated") {
  RegParams rp;
  CHECK(rp.delta == kBlendOvershoot);
  CHECK(rp.delta < 1.0);
  rp.epsilon = 0.0;
  CHECK_THROWS_AS(rp.validate(), std::invalid_argument);
  rp.epsilon = 1e-3;
  rp.n = 0;
  CHECK_THROWS_AS(rp.validate(), std::invalid_argument);
}
