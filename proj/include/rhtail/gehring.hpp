#pragma once

#include <string>
#include <vector>

#include "rhtail/space.hpp"
#include "rhtail/tails.hpp"

namespace rhtail {

enum class RHVariant { RadiusPower, VolumeLowerBound, VolumePower };

/// Reverse Holder instance: nonnegative fields u, f, h, the exponents
/// q > 1 > s... (s in (0,q)), the radius/volume power, and the tail weights.
struct RHInstance {
  const Space* space = nullptr;
  Field u, f, h;
  double q = 2.0;
  double s = 1.0;
  double beta = 0.0;   // radius power (RadiusPower, VolumeLowerBound)
  double gamma = 0.0;  // volume power (VolumePower)
  double q_lower = 0.0;  // Q, volume lower bound exponent (VolumeLowerBound)
  TailWeights tw = TailWeights::geometric(1.0, 0.5, 2.0);
  RHVariant variant = RHVariant::RadiusPower;
};

struct RHRow {
  Ball ball;
  double lhs = 0.0;
  double tail_u = 0.0;
  double tail_f = 0.0;
  double tail_h = 0.0;
  double ratio = 0.0;
};

struct RHReport {
  std::vector<RHRow> rows;
  double a_best = 0.0;
  bool infinite_flag = false;
  std::vector<std::string> warnings;

  // conclusion / gain estimation results
  std::vector<double> p_grid;
  std::vector<double> c_best_curve;
  double c_best = 0.0;
  double p_hat = 0.0;
  double eps_hat = 0.0;
  bool p_found = false;
  bool c_monotone = true;
  std::string family_description;
};

/// Default ball family: centers on a coarse sublattice, radii N-adic between
/// 4*spacing and diameter/2. refine_level 1 adds the half-stride interleaved
/// centers, giving a superset of twice the size (nested enlargement).
std::vector<Ball> make_ball_family(const Space& s, std::size_t target_centers, double dilation_n,
                                   int refine_level = 0);
std::string describe_ball_family(const Space& s, std::size_t target_centers, double dilation_n);

/// Best hypothesis constant: per ball,
///   ratio = max(0, (avg u^q)^{1/q} - f-term - h-term) / a_u(B),
/// with the variant's h-term. A_best is the max over the family.
RHReport hypothesis_constant(const RHInstance& inst, const std::vector<Ball>& family);

/// Conclusion constant at exponent p > q: per ball the ratio of
/// (avg_B u^p)^{1/p} to the conclusion right-hand side with tails over NB.
RHReport conclusion_check(const RHInstance& inst, const std::vector<Ball>& family, double p);

/// Grid search for the largest p whose conclusion constant stays below c_max;
/// emits the whole C_best(p) curve.
RHReport estimate_gain(const RHInstance& inst, const std::vector<Ball>& family,
                       const std::vector<double>& p_grid, double c_max);

struct GlobalCheckReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::string form;      // "norm-sum" or "volume-lower-bound"
  std::string phi_kind;  // descriptive; the torus is Ahlfors regular
};

/// Global-norm inequality check: form 1 compares |u|_p against
/// |u|_q + |f|_p + |h|_{ps/q}; form 2 (volume lower bound) against
/// |f|_p + |h|_{p*} with p* = pQ/(Q + beta p).
GlobalCheckReport global_check(const RHInstance& inst, double p, const std::string& phi_kind);

struct RHSExponentReport {
  ConvolutionReport convolution;
  double c_original = 0.0;
  double c_improved = 0.0;
  std::vector<RHRow> rows;  // ratio column holds the improved-form ratio
};

/// Self-improvement of the right-hand side: given that
/// (avg_B u^p)^{1/p} <= C (a_{u^q}(B)^{1/q} + b(B)) holds with measured C,
/// verifies the improved form with exponents (s0, s1, s2) and the tilde
/// sequence. Refuses when the convolution conditions are unbounded.
RHSExponentReport rhs_exponent_check(const RHInstance& inst, double p, double s0, double s1,
                                     double s2, const SeqTriple& trip,
                                     const std::vector<Ball>& family, std::size_t m_max = 48);

}  // namespace rhtail
