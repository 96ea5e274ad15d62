#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rhtail/space.hpp"
#include "rhtail/tails.hpp"

namespace rhtail {

struct WeightRow {
  Ball ball;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::size_t subset_size = 0;  // for subset-based conditions
};

struct WeightReport {
  std::string klass;
  std::vector<WeightRow> rows;
  double constant = 0.0;
  bool infinite_flag = false;
  double comparability = 1.0;  // discrete-maximal comparability factor
  // improvement curve (vw_improvement)
  std::vector<double> p_grid;
  std::vector<double> c_curve;
  double p_hat = 0.0;
  bool p_found = false;
};

/// Subsets E of a ball used by the A_infty / C_p set conditions: sublevel and
/// superlevel sets of w at fixed quantiles plus seeded random subsets.
struct SubsetSampler {
  std::vector<double> quantiles = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int random_subsets = 20;
  std::uint64_t seed = 7;

  std::vector<std::vector<std::size_t>> sample(const Space& s, const Field& w,
                                               const Ball& b) const;
};

/// Very weak A_infty constant: per ball, avg_B M(1_B w) against
/// sup_{sigma>=1} avg_{sigma B} w.
WeightReport vw_ainfty_constant(const Space& s, const Field& w, const std::vector<Ball>& family);

/// Self-improvement curve: C'(p) with (avg_B M(1_B w)^p)^{1/p} on the left;
/// p_hat is the largest grid p with C'(p) <= c_max.
WeightReport vw_improvement(const Space& s, const Field& w, const std::vector<Ball>& family,
                            const std::vector<double>& p_grid, double c_max);

/// Set-condition constant: per (B, E),
/// inf_sigma (w(E)/w(sigma B)) (mu(sigma B)/mu(B)) over (mu(E)/mu(B))^{1/p}.
WeightReport vw_ainfty_condition(const Space& s, const Field& w, const std::vector<Ball>& family,
                                 const SubsetSampler& sampler, double p);

/// Very weak reverse Holder constant at exponent q > 1.
WeightReport vw_rh_constant(const Space& s, const Field& w, const std::vector<Ball>& family,
                            double q);

enum class CpMethod { Integral, Dyadic };

/// C_p tail of a ball: integral form (1/mu(B)) int M(1_B)^p w dmu, or the
/// dyadic form sum_k 2^{-k n (p-1)} avg(w, 2^k B) with saturation.
double cp_tail(const Space& s, const Field& w, const Ball& b, double p, CpMethod method);

struct CpReport {
  std::vector<double> delta_grid;
  std::vector<double> c_of_delta;
  std::vector<WeightRow> rows;  // worst row per delta omitted; rows carry per-(B,E) data at best delta
};

/// C_p condition: w(E) <= C (mu(E)/mu(B))^delta int M(1_B)^p w dmu, best C per
/// delta on the grid.
CpReport cp_check(const Space& s, const Field& w, const std::vector<Ball>& family,
                  const SubsetSampler& sampler, double p, const std::vector<double>& delta_grid);

}  // namespace rhtail
