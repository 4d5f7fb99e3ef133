#ifndef FPL_TESTS_HELPERS_HPP_
#define FPL_TESTS_HELPERS_HPP_

#include <random>

#include "fpl/forms.hpp"
#include "oracles.hpp"

namespace testing_support {

struct Case {
  fpl::Discretization disc;
  oracle::Instance inst;
  Eigen::VectorXd kappa;
};

inline Eigen::VectorXd normal_vector(int size, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v[i] = normal(rng);
  return v;
}

inline Case make_case(int m, double s, double p, fpl::Variant variant, std::mt19937_64& rng,
                      double a = 0.0, double b = 1.0, double c = 1.0) {
  Case out;
  const fpl::Grid g = fpl::build_grid(a, b, m);
  const fpl::FracParams fp{s, p, c, variant};
  std::optional<double> r_trunc;
  if (variant == fpl::Variant::Full) r_trunc = 1.6 * (b - a);
  out.disc = fpl::make_discretization(g, fp, r_trunc);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  out.kappa.resize(out.disc.num_offsets());
  for (int k = 0; k < out.kappa.size(); ++k) out.kappa[k] = unif(rng);
  out.inst.a = a;
  out.inst.b = b;
  out.inst.m = m;
  out.inst.s = s;
  out.inst.p = p;
  out.inst.c = c;
  out.inst.variant = variant;
  out.inst.r_trunc = r_trunc.value_or(0.0);
  out.inst.kappa.assign(out.kappa.data(), out.kappa.data() + out.kappa.size());
  return out;
}

inline Case random_case(std::mt19937_64& rng, double p, fpl::Variant variant, int max_m = 6) {
  std::uniform_int_distribution<int> mdist(1, max_m);
  std::uniform_real_distribution<double> sdist(variant == fpl::Variant::Regional ? 0.55 : 0.2, 0.95);
  std::uniform_real_distribution<double> cdist(0.5, 2.0);
  const int m = mdist(rng);
  return make_case(m, sdist(rng), p, variant, rng, 0.0, 1.0, cdist(rng));
}

}  // namespace testing_support

#endif  // FPL_TESTS_HELPERS_HPP_
