#include "fpl/forms.hpp"

#include <cmath>
#include <string>

namespace fpl {
namespace {

void require_size(const Discretization& d, const Eigen::VectorXd& x, const char* what) {
  if (x.size() != d.m())
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(d.m()) +
                                " interior values, got " + std::to_string(x.size()));
}

void require_kappa(const Discretization& d, const Eigen::VectorXd& kappa) {
  if (kappa.size() != d.num_offsets())
    throw std::invalid_argument("kappa: expected " + std::to_string(d.num_offsets()) +
                                " offset values, got " + std::to_string(kappa.size()));
}

double difference(const PairTerm& t, const StateVector& u) {
  return t.j == PairTerm::kZeroPartner ? u[t.i] : u[t.i] - u[t.j];
}

// |du|^{p-2} |du|^2 / d^{1+sp}: flux factor and weight of the unregularized form.
struct PowerLaw {
  double p;

  double coeff(const PairTerm&, double du) const {
    return p == 2.0 ? 1.0 : std::pow(std::abs(du), p - 2.0);
  }
  double weight(const PairTerm& t) const { return t.w; }
  // Per unordered pair, before the c * kappa factor.
  double potential(const PairTerm& t, double du) const {
    return std::pow(std::abs(du), p) / p * t.w;
  }
  double curvature(const PairTerm& t, double du) const {
    return (p - 1.0) * coeff(t, du) * t.w;
  }
};

// [eps + F_n(du^2/d^{2s})]^{(p-2)/2} |du|^2 / d^{1+2s}.
struct RegularizedLaw {
  RegParams rp;
  double q;  // (p-2)/2

  double coeff(const PairTerm& t, double du) const {
    if (q == 0.0) return 1.0;
    return std::pow(rp.epsilon + f_n(du * du / t.d2s, rp.n), q);
  }
  double weight(const PairTerm& t) const { return t.w2; }
  double potential(const PairTerm& t, double du) const {
    const double tau = du * du / t.d2s;
    return 0.5 * f_n_primitive(tau, rp.n, rp.epsilon, 2.0 * q + 2.0) * t.d2s * t.w2;
  }
  double curvature(const PairTerm& t, double du) const {
    if (q == 0.0) return t.w2;
    const double tau = du * du / t.d2s;
    const double base = rp.epsilon + f_n(tau, rp.n);
    const double a = std::pow(base, q);
    return (a + 2.0 * q * std::pow(base, q - 1.0) * f_n_prime(tau, rp.n) * tau) * t.w2;
  }
};

template <class Law>
double form_impl(const Discretization& d, const StateVector& u, const StateVector& v,
                 const Eigen::VectorXd& kappa, const Law& law) {
  require_size(d, u, "u");
  require_size(d, v, "v");
  require_kappa(d, kappa);
  double pair_sum = 0.0;
  for (const PairTerm& t : d.pairs) {
    const double du = difference(t, u);
    const double dv = difference(t, v);
    pair_sum += d.kappa_at(t, kappa) * law.coeff(t, du) * du * dv * law.weight(t);
  }
  return u.dot(v) * d.grid.h + d.fp.c_norm * pair_sum;
}

template <class Law>
double potential_impl(const Discretization& d, const StateVector& u, const Eigen::VectorXd& f,
                      const Eigen::VectorXd& kappa, const Law& law) {
  require_size(d, u, "u");
  require_size(d, f, "f");
  require_kappa(d, kappa);
  double pair_sum = 0.0;
  for (const PairTerm& t : d.pairs)
    pair_sum += d.kappa_at(t, kappa) * law.potential(t, difference(t, u));
  const double h = d.grid.h;
  return d.fp.c_norm * pair_sum + 0.5 * u.squaredNorm() * h - f.dot(u) * h;
}

template <class Law>
Eigen::VectorXd operator_impl(const Discretization& d, const StateVector& u,
                              const Eigen::VectorXd& kappa, const Law& law) {
  require_size(d, u, "u");
  require_kappa(d, kappa);
  Eigen::VectorXd out = u * d.grid.h;
  const double c = d.fp.c_norm;
  for (const PairTerm& t : d.pairs) {
    const double du = difference(t, u);
    const double flux = c * d.kappa_at(t, kappa) * law.coeff(t, du) * du * law.weight(t);
    out[t.i] += flux;
    if (t.j != PairTerm::kZeroPartner) out[t.j] -= flux;
  }
  return out;
}

template <class Law>
Eigen::MatrixXd hessian_impl(const Discretization& d, const StateVector& u,
                             const Eigen::VectorXd& kappa, const Law& law) {
  require_size(d, u, "u");
  require_kappa(d, kappa);
  const int m = d.m();
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(m, m) * d.grid.h;
  const double c = d.fp.c_norm;
  for (const PairTerm& t : d.pairs) {
    const double g = c * d.kappa_at(t, kappa) * law.curvature(t, difference(t, u));
    H(t.i, t.i) += g;
    if (t.j != PairTerm::kZeroPartner) {
      H(t.j, t.j) += g;
      H(t.i, t.j) -= g;
      H(t.j, t.i) -= g;
    }
  }
  return H;
}

RegularizedLaw make_regularized(const Discretization& d, const RegParams& rp) {
  rp.validate();
  return RegularizedLaw{rp, 0.5 * (d.fp.p - 2.0)};
}

PairTerm make_pair(int i, int j, int k, double dist, double h, const FracParams& fp) {
  PairTerm t;
  t.i = i;
  t.j = j;
  t.k = k;
  t.dist = dist;
  t.w = h * h / std::pow(dist, 1.0 + fp.s * fp.p);
  t.w2 = h * h / std::pow(dist, 1.0 + 2.0 * fp.s);
  t.d2s = std::pow(dist, 2.0 * fp.s);
  return t;
}

}  // namespace

ControlField ControlField::constant(int size, double value, double lo, double hi,
                                    double alpha) {
  ControlField c;
  c.values = Eigen::VectorXd::Constant(size, value);
  c.lo = Eigen::VectorXd::Constant(size, lo);
  c.hi = Eigen::VectorXd::Constant(size, hi);
  c.alpha = alpha;
  return c;
}

void ControlField::validate() const {
  if (lo.size() != values.size() || hi.size() != values.size())
    throw ConfigError("control bounds must match the number of offsets");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
  for (int k = 0; k < size(); ++k) {
    if (!(alpha <= lo[k] && lo[k] <= hi[k]))
      throw ConfigError("bounds violate 0 < alpha <= xi1 <= xi2 at offset " +
                        std::to_string(k + 1));
    if (!(lo[k] <= values[k] && values[k] <= hi[k]))
      throw ConfigError("kappa outside [xi1, xi2] at offset " + std::to_string(k + 1));
  }
}

double tail_integral(double radius, double exponent) {
  return std::pow(radius, -exponent) / exponent;
}

Eigen::VectorXd assemble_full_variant_tail(const Grid& grid, const FracParams& fp,
                                           double r_trunc) {
  const DifferenceGrid dg = build_difference_grid(grid, Variant::Full, r_trunc);
  const double r_eff = (dg.size() + 0.5) * grid.h;
  return Eigen::VectorXd::Constant(grid.m, 2.0 * tail_integral(r_eff, fp.s * fp.p));
}

Discretization make_discretization(const Grid& grid, const FracParams& fp,
                                   std::optional<double> r_trunc,
                                   std::optional<double> kappa_far) {
  fp.validate();
  Discretization d;
  d.grid = grid;
  d.fp = fp;
  d.diff = build_difference_grid(grid, fp.variant, r_trunc);
  const int m = grid.m;
  const int K = d.diff.size();
  const double h = grid.h;

  // Grid indices 1..m are interior; state index is grid index - 1.
  for (int gi = 1; gi <= m; ++gi) {
    for (int gj = gi + 1; gj <= m; ++gj)
      d.pairs.push_back(make_pair(gi - 1, gj - 1, gj - gi, d.diff.offset(gj - gi), h, fp));
    // Zero partners: boundary nodes (regional) or every exterior node within
    // the truncation radius (full).
    const int left_max = fp.variant == Variant::Regional ? gi : K;
    for (int k = gi; k <= left_max; ++k)
      d.pairs.push_back(make_pair(gi - 1, PairTerm::kZeroPartner, k, d.diff.offset(k), h, fp));
    const int right_min = m + 1 - gi;
    const int right_max = fp.variant == Variant::Regional ? right_min : K;
    for (int k = right_min; k <= right_max; ++k)
      d.pairs.push_back(make_pair(gi - 1, PairTerm::kZeroPartner, k, d.diff.offset(k), h, fp));
  }

  if (fp.variant == Variant::Full) {
    d.kappa_far = kappa_far;
    d.r_eff = (K + 0.5) * h;
    const double tail_w = 2.0 * tail_integral(d.r_eff, fp.s * fp.p);
    const double tail_w2 = 2.0 * tail_integral(d.r_eff, 2.0 * fp.s);
    for (int i = 0; i < m; ++i) {
      PairTerm t;
      t.i = i;
      t.j = PairTerm::kZeroPartner;
      t.k = 0;
      t.dist = d.r_eff;
      t.w = h * tail_w;
      t.w2 = h * tail_w2;
      t.d2s = std::pow(d.r_eff, 2.0 * fp.s);
      d.pairs.push_back(t);
    }
  }
  return d;
}

double energy_form(const Discretization& d, const StateVector& u, const StateVector& v,
                   const Eigen::VectorXd& kappa) {
  return form_impl(d, u, v, kappa, PowerLaw{d.fp.p});
}

double regularized_form(const Discretization& d, const StateVector& u, const StateVector& v,
                        const Eigen::VectorXd& kappa, const RegParams& rp) {
  return form_impl(d, u, v, kappa, make_regularized(d, rp));
}

double energy_functional(const Discretization& d, const StateVector& u,
                         const Eigen::VectorXd& f, const Eigen::VectorXd& kappa) {
  return potential_impl(d, u, f, kappa, PowerLaw{d.fp.p});
}

double regularized_potential(const Discretization& d, const StateVector& u,
                             const Eigen::VectorXd& f, const Eigen::VectorXd& kappa,
                             const RegParams& rp) {
  return potential_impl(d, u, f, kappa, make_regularized(d, rp));
}

double quasi_norm(const Discretization& d, const StateVector& u, const Eigen::VectorXd& kappa,
                  const RegParams& rp) {
  require_size(d, u, "u");
  require_kappa(d, kappa);
  const RegularizedLaw law = make_regularized(d, rp);
  double sum = 0.0;
  for (const PairTerm& t : d.pairs) {
    const double du = difference(t, u);
    sum += d.kappa_at(t, kappa) * law.coeff(t, du) * du * du * t.w2;
  }
  return std::pow(2.0 * sum, 1.0 / d.fp.p);
}

double kappa_p_energy(const Discretization& d, const StateVector& u,
                      const Eigen::VectorXd& kappa) {
  require_size(d, u, "u");
  require_kappa(d, kappa);
  const double p = d.fp.p;
  double sum = 0.0;
  for (const PairTerm& t : d.pairs)
    sum += d.kappa_at(t, kappa) * std::pow(std::abs(difference(t, u)), p) * t.w;
  return 2.0 * sum;
}

double gagliardo_seminorm(const Discretization& d, const StateVector& u, double s, double p) {
  require_size(d, u, "u");
  const double h = d.grid.h;
  double sum = 0.0;
  for (const PairTerm& t : d.pairs) {
    const double w = t.is_tail() ? h * 2.0 * tail_integral(t.dist, s * p)
                                 : h * h / std::pow(t.dist, 1.0 + s * p);
    sum += std::pow(std::abs(difference(t, u)), p) * w;
  }
  return std::pow(2.0 * sum, 1.0 / p);
}

Eigen::VectorXd form_operator(const Discretization& d, const StateVector& u,
                              const Eigen::VectorXd& kappa, const std::optional<RegParams>& rp) {
  if (rp) return operator_impl(d, u, kappa, make_regularized(d, *rp));
  return operator_impl(d, u, kappa, PowerLaw{d.fp.p});
}

Eigen::MatrixXd form_hessian(const Discretization& d, const StateVector& u,
                             const Eigen::VectorXd& kappa, const std::optional<RegParams>& rp) {
  if (rp) return hessian_impl(d, u, kappa, make_regularized(d, *rp));
  return hessian_impl(d, u, kappa, PowerLaw{d.fp.p});
}

LevelSet level_set(const Discretization& d, const StateVector& u, int n, double s,
                   LevelThreshold threshold) {
  require_size(d, u, "u");
  const double nn = static_cast<double>(n);
  const double level = threshold == LevelThreshold::Saturation ? std::sqrt(nn * nn + 1.0) : nn;
  const double h2 = d.grid.h * d.grid.h;
  LevelSet set;
  for (int idx = 0; idx < static_cast<int>(d.pairs.size()); ++idx) {
    const PairTerm& t = d.pairs[idx];
    if (t.is_tail()) continue;
    if (std::abs(difference(t, u)) / std::pow(t.dist, s) > level) {
      set.pairs.push_back(idx);
      set.ordered_count += 2;
      set.mu += 2.0 * h2 / std::pow(t.dist, 2.0 * s - 1.0);
    }
  }
  set.lebesgue = h2 * static_cast<double>(set.ordered_count);
  return set;
}

double level_set_energy(const Discretization& d, const StateVector& u,
                        const Eigen::VectorXd& kappa, const RegParams& rp,
                        const LevelSet& set) {
  require_size(d, u, "u");
  require_kappa(d, kappa);
  const RegularizedLaw law = make_regularized(d, rp);
  double sum = 0.0;
  for (int idx : set.pairs) {
    const PairTerm& t = d.pairs[idx];
    const double du = difference(t, u);
    sum += d.kappa_at(t, kappa) * law.coeff(t, du) * du * du * t.w2;
  }
  return 2.0 * sum;
}

}  // namespace fpl
