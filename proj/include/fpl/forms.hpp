#ifndef FPL_FORMS_HPP_
#define FPL_FORMS_HPP_

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "fpl/grid.hpp"
#include "fpl/regularizer.hpp"

namespace fpl {

/// Interior nodal values u(x_1..x_m); boundary and exterior values are zero
/// and never stored.
using StateVector = Eigen::VectorXd;

/// Kernel coefficient sampled on the positive offsets, with its box bounds.
/// Lookups use |x_i - x_j|, so evenness holds by construction.
struct ControlField {
  Eigen::VectorXd values;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  double alpha = 0.0;

  static ControlField constant(int size, double value, double lo, double hi, double alpha);

  int size() const { return static_cast<int>(values.size()); }
  /// Throws ConfigError unless 0 < alpha <= lo <= values <= hi.
  void validate() const;
};

/// One unordered node pair of the discrete double sum. Each entry stands for
/// the two ordered pairs (i,j), (j,i). A pair whose partner lies on the
/// boundary or in the exterior has `j == kZeroPartner`; the far-field tail of
/// the full variant is a virtual zero-partner pair with `k == 0`.
struct PairTerm {
  static constexpr int kZeroPartner = -1;

  int i = 0;         // interior index into the state vector (0-based)
  int j = kZeroPartner;
  int k = 0;         // offset index 1..K, 0 for the far-field tail
  double dist = 0.0;
  double w = 0.0;    // h^2 / d^{1+sp}
  double w2 = 0.0;   // h^2 / d^{1+2s}
  double d2s = 0.0;  // d^{2s}

  bool is_tail() const { return k == 0; }
};

/// Everything the forms need about one (grid, variant, s, p) combination;
/// pair weights are assembled once.
struct Discretization {
  Grid grid;
  DifferenceGrid diff;
  FracParams fp;
  std::vector<PairTerm> pairs;
  std::optional<double> kappa_far;  // full variant; defaults to kappa at the largest offset
  double r_eff = 0.0;               // full variant: distance to the truncation edge

  int m() const { return grid.m; }
  int num_offsets() const { return diff.size(); }
  double kappa_at(const PairTerm& t, const Eigen::VectorXd& kappa) const {
    if (t.is_tail()) return kappa_far.value_or(kappa[kappa.size() - 1]);
    return kappa[t.k - 1];
  }
};

/// Builds grid, offsets, pair weights and (full variant) the far-field tail.
Discretization make_discretization(const Grid& grid, const FracParams& fp,
                                   std::optional<double> r_trunc = std::nullopt,
                                   std::optional<double> kappa_far = std::nullopt);

/// int_R^inf r^{-(1+e)} dr = R^{-e} / e.
double tail_integral(double radius, double exponent);

/// Per-node far-field coefficient 2 R_eff^{-sp} / (sp) of the full variant
/// (both half-lines beyond the truncation edge).
Eigen::VectorXd assemble_full_variant_tail(const Grid& grid, const FracParams& fp,
                                           double r_trunc);

/// E^kappa_{p,s}(u, v).
double energy_form(const Discretization& d, const StateVector& u, const StateVector& v,
                   const Eigen::VectorXd& kappa);

/// F^kappa_{eps,n,p}(u, v).
double regularized_form(const Discretization& d, const StateVector& u, const StateVector& v,
                        const Eigen::VectorXd& kappa, const RegParams& rp);

/// Convex potential whose gradient is energy_form(u, .) - sum f . h.
double energy_functional(const Discretization& d, const StateVector& u,
                         const Eigen::VectorXd& f, const Eigen::VectorXd& kappa);

/// Convex potential whose gradient is regularized_form(u, .) - sum f . h.
double regularized_potential(const Discretization& d, const StateVector& u,
                             const Eigen::VectorXd& f, const Eigen::VectorXd& kappa,
                             const RegParams& rp);

/// (sum_{i!=j} kappa [eps + G_n]^{(p-2)/2} |du|^2 w2)^{1/p}
double quasi_norm(const Discretization& d, const StateVector& u, const Eigen::VectorXd& kappa,
                  const RegParams& rp);

/// sum_{i!=j} kappa |du|^p w, the unregularized counterpart of quasi_norm^p.
double kappa_p_energy(const Discretization& d, const StateVector& u,
                      const Eigen::VectorXd& kappa);

/// Discrete W^{s,p} seminorm with the zero extension; weights use the given
/// (s, p), not the ones the discretization was built with.
double gagliardo_seminorm(const Discretization& d, const StateVector& u, double s, double p);

/// The form as a vector: component k is form(u, e_k). `rp` selects the
/// regularized form.
Eigen::VectorXd form_operator(const Discretization& d, const StateVector& u,
                              const Eigen::VectorXd& kappa,
                              const std::optional<RegParams>& rp = std::nullopt);

/// Hessian of the potential selected by `rp` (mass term included).
Eigen::MatrixXd form_hessian(const Discretization& d, const StateVector& u,
                             const Eigen::VectorXd& kappa,
                             const std::optional<RegParams>& rp = std::nullopt);

enum class LevelThreshold {
  Saturation,  // |du|/d^s > sqrt(n^2 + 1): where F_n is constant
  Cutoff,      // |du|/d^s > n
};

struct LevelSet {
  std::vector<int> pairs;  // indices into Discretization::pairs (unordered)
  long ordered_count = 0;
  double lebesgue = 0.0;   // h^2 * ordered_count
  double mu = 0.0;         // sum over ordered pairs of h^2 / d^{2s-1}

  bool empty() const { return pairs.empty(); }
};

LevelSet level_set(const Discretization& d, const StateVector& u, int n, double s,
                   LevelThreshold threshold = LevelThreshold::Saturation);

/// Portion of quasi_norm^p carried by the pairs of `set`.
double level_set_energy(const Discretization& d, const StateVector& u,
                        const Eigen::VectorXd& kappa, const RegParams& rp,
                        const LevelSet& set);

}  // namespace fpl

#endif  // FPL_FORMS_HPP_
