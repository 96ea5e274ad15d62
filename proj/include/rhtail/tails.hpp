#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rhtail/space.hpp"

namespace rhtail {

/// Weight sequence (alpha_k) for tail functionals, with dilation base N.
/// Either an explicit finite list or a geometric family alpha0 * g^k whose
/// tail masses have closed form.
struct TailWeights {
  enum class Kind { Explicit, Geometric };

  Kind kind = Kind::Geometric;
  std::vector<double> list;
  double alpha0 = 1.0;
  double g = 0.5;
  double dilation = 2.0;  // N > 1
  bool non_increasing = true;

  static TailWeights geometric(double alpha0, double g, double dilation_n);
  static TailWeights explicit_list(std::vector<double> alphas, double dilation_n);

  double alpha(std::size_t k) const;
  double total() const;
  /// Sum of alpha_j for j >= k.
  double tail_from(std::size_t k) const;
  /// Length of the explicit list; SIZE_MAX for geometric families.
  std::size_t count() const;
  /// Explicit prefix of the sequence, long enough that the dropped geometric
  /// mass is below rel_tol of the total.
  std::vector<double> materialize(std::size_t min_len, double rel_tol = 1e-15) const;
};

/// a_u(B) = sum_k alpha_k avg(u, N^k B). Once a dilate saturates to the whole
/// space the remaining terms collapse to (remaining alpha mass) * global mean.
/// Requires u >= 0.
double tail_functional(const Space& s, const Field& u, const Ball& b, const TailWeights& tw);

enum class DomainMode { Loc, Full };

/// sup of avg(u, B(x,r)) for r in [b.radius, c*dist(x, Omega^c)) with c = 1/2
/// (Loc) or 3/4 (Full); over the whole space the range is [radius, diameter].
/// Radii are discretized over cell-spacing multiples and N-adic dilates of the
/// base radius; r = b.radius is always included.
double sup_functional(const Space& s, const Field& u, const Ball& b,
                      const std::optional<Region>& omega, DomainMode mode,
                      double dilation_n = 2.0);

/// Tail functional restricted to an open set: term k participates iff
/// 16 N^k B (Loc) resp. 2 N^k B (Full) is contained in omega.
double domain_tail(const Space& s, const Field& u, const Ball& b, const Region& omega,
                   DomainMode mode, const TailWeights& tw);

enum class MaximalKind { Uncentered, Fractional, VolumePower };

struct MaximalVariant {
  MaximalKind kind = MaximalKind::Uncentered;
  double exponent = 0.0;  // beta*s on the radius, or gamma*s on the measure

  static MaximalVariant uncentered() { return {MaximalKind::Uncentered, 0.0}; }
  static MaximalVariant fractional(double beta_s) { return {MaximalKind::Fractional, beta_s}; }
  static MaximalVariant volume_power(double gamma_s) { return {MaximalKind::VolumePower, gamma_s}; }
};

/// Discrete uncentered maximal operator over the family
/// {B(y, spacing*2^j): y a point, j >= 0} plus the saturated ball, with the
/// variant's radius/measure power. The family realizes the true uncentered
/// maximal up to a factor bounded by C_d^3; see maximal_comparability().
Field maximal(const Space& s, const Field& u, const MaximalVariant& variant);

/// Documented comparability bound between the discrete ball family and the
/// full uncentered maximal operator.
double maximal_comparability(const Space& s);

// --- sequence transforms -------------------------------------------------

/// (m,n)-stretch: entry j equals alpha_k for the unique k with
/// m^(k-1) < n^j <= m^k. Requires 1 < n <= m.
std::vector<double> stretch(const std::vector<double>& alpha, double m, double n);

/// (m,n)-regrouping: block sums over the same index sets plus the correction
/// term beta_k (zero when the block holds l+1 integers, else alpha at the
/// minimal admissible j). Ties n^j == m^k belong to the lower block.
std::vector<double> regroup(const std::vector<double>& alpha, double m, double n);

struct DilationChangeReport {
  double value_base_n = 0.0;
  double value_base_m = 0.0;
  double ratio = 0.0;
  double bound = 0.0;  // doubling-derived constant
  bool within_bound = false;
  std::string transform;  // "regroup" or "regroup+stretch" or "identity"
};

/// Compares a_u at base N against a_u at base M with the transformed
/// sequence (regroup for M > N, regroup-then-stretch for M < N) and checks
/// the ratio against the doubling-derived constant.
DilationChangeReport dilation_change_check(const Space& s, const Field& u, const Ball& b,
                                           const TailWeights& tw, double new_base,
                                           const DoublingProfile& prof);

struct SeqTriple {
  std::vector<double> alpha;        // strictly positive
  std::vector<double> alpha_tilde;  // nonnegative, first entry positive
  std::vector<double> alpha_sharp;  // nonnegative, first entry positive
  double tau = 1.0;                 // in (0, 1]
};

struct ConvolutionReport {
  std::vector<double> ratio_tilde;   // sum_k tilde_k alpha_{m-k}^tau vs tilde_m
  std::vector<double> ratio_sharp;   // sum_k sharp_k alpha_{m-k} vs sharp_m
  std::vector<double> ratio_radius;  // with the N^{(m-k) beta s2} factor
  double c_tilde = 0.0, c_sharp = 0.0, c_radius = 0.0;
  bool bounded_tilde = true, bounded_sharp = true, bounded_radius = true;
};

/// Empirical constants of the three convolution conditions up to horizon
/// m_max. `beta_s2` is the product beta*s2 in the radius factor. A sequence is
/// flagged unbounded when the ratio keeps growing over the last quarter of
/// the horizon.
ConvolutionReport convolution_conditions(const SeqTriple& trip, double s2_over_q, double n_base,
                                         double beta_s2, std::size_t m_max);

/// Discrete convolution (phi_r * u)(center) with phi_r(z) = r^-n phi(z/r) for
/// a bounded, radial, non-increasing profile; errors on non-monotone
/// profiles. Grids only.
double kernel_tail(const Space& s, const Field& u, const Ball& b,
                   const std::function<double(double)>& profile);

}  // namespace rhtail
