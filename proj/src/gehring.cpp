#include "rhtail/gehring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rhtail/field.hpp"

namespace rhtail {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

void validate_instance(const RHInstance& inst) {
  if (!inst.space) throw std::invalid_argument("instance has no space");
  if (!(inst.q > 1.0)) throw std::invalid_argument("q must exceed 1");
  if (!(inst.s > 0.0 && inst.s < inst.q)) throw std::invalid_argument("s must lie in (0,q)");
  if (inst.variant == RHVariant::VolumeLowerBound && !(inst.q_lower > 0.0))
    throw std::invalid_argument("volume lower bound variant needs Q > 0");
  for (double v : inst.u)
    if (v < 0.0) throw NonNegativityError("u");
  for (double v : inst.f)
    if (v < 0.0) throw NonNegativityError("f");
  for (double v : inst.h)
    if (v < 0.0) throw NonNegativityError("h");
}

// Advisory exponent-range warnings; probing outside the admissible ranges
// is allowed, so these never throw.
void range_warnings(const RHInstance& inst, RHReport& rep) {
  DoublingProfile prof = doubling_profile(*inst.space, default_doubling_samples(*inst.space));
  double gap = 1.0 / inst.s - 1.0 / inst.q;
  std::ostringstream os;
  switch (inst.variant) {
    case RHVariant::RadiusPower:
      if (inst.beta < prof.dimension * gap) {
        os << "beta=" << inst.beta << " below D(1/s-1/q)=" << prof.dimension * gap;
        rep.warnings.push_back(os.str());
      }
      break;
    case RHVariant::VolumeLowerBound:
      if (inst.beta > inst.q_lower * gap) {
        os << "beta=" << inst.beta << " above Q(1/s-1/q)=" << inst.q_lower * gap;
        rep.warnings.push_back(os.str());
      }
      break;
    case RHVariant::VolumePower:
      if (inst.gamma > gap) {
        os << "gamma=" << inst.gamma << " above 1/s-1/q=" << gap;
        rep.warnings.push_back(os.str());
      }
      break;
  }
}

double h_term_hypothesis(const RHInstance& inst, const Ball& b, double tail_hs) {
  double piece = std::pow(tail_hs, 1.0 / inst.s);
  if (inst.variant == RHVariant::VolumePower)
    return std::pow(ball_measure(*inst.space, b), inst.gamma) * piece;
  return std::pow(b.radius, inst.beta) * piece;
}

}  // namespace

namespace {

// Centers on a coarse sublattice: every stride-th index in each grid axis,
// every stride-th point on clouds. Refinement adds the half-stride
// interleave, so level l+1 strictly contains level l.
std::vector<std::size_t> sublattice_centers(const Space& s, std::size_t target, int refine_level) {
  std::vector<std::size_t> centers;
  target = std::max<std::size_t>(1, target);
  if (s.is_grid() && s.dim() == 2) {
    int m = s.cells_per_side();
    int per_axis = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(target))));
    int stride = std::max(1, m / per_axis);
    for (int iy = 0; iy < m; iy += stride)
      for (int ix = 0; ix < m; ix += stride) {
        centers.push_back(s.grid_index(ix, iy));
        if (refine_level > 0) centers.push_back(s.grid_index(ix + stride / 2, iy + stride / 2));
      }
    return centers;
  }
  std::size_t stride = std::max<std::size_t>(1, s.size() / target);
  for (std::size_t c = 0; c < s.size(); c += stride) {
    centers.push_back(c);
    if (refine_level > 0 && stride > 1) centers.push_back((c + stride / 2) % s.size());
  }
  return centers;
}

}  // namespace

std::vector<Ball> make_ball_family(const Space& s, std::size_t target_centers, double dilation_n,
                                   int refine_level) {
  std::vector<Ball> family;
  double rmin = s.is_grid() ? 4.0 * s.spacing() : s.diameter() / 64.0;
  for (std::size_t c : sublattice_centers(s, target_centers, refine_level))
    for (double r = rmin; r <= s.diameter() / 2.0; r *= dilation_n) family.push_back(Ball{c, r});
  return family;
}

std::string describe_ball_family(const Space& s, std::size_t target_centers, double dilation_n) {
  std::ostringstream os;
  os << "centers: sublattice of ~" << sublattice_centers(s, target_centers, 0).size()
     << " points; radii: " << dilation_n << "-adic in [4*spacing, diameter/2]";
  return os.str();
}

RHReport hypothesis_constant(const RHInstance& inst, const std::vector<Ball>& family) {
  validate_instance(inst);
  if (family.empty()) throw std::invalid_argument("ball family must be nonempty");
  const Space& s = *inst.space;

  RHReport rep;
  range_warnings(inst, rep);
  Field uq = field_pow(inst.u, inst.q);
  Field fq = field_pow(inst.f, inst.q);
  Field hs = field_pow(inst.h, inst.s);

  for (const Ball& b : family) {
    RHRow row;
    row.ball = b;
    row.lhs = std::pow(ball_average(s, uq, b), 1.0 / inst.q);
    row.tail_u = tail_functional(s, inst.u, b, inst.tw);
    row.tail_f = tail_functional(s, fq, b, inst.tw);
    row.tail_h = tail_functional(s, hs, b, inst.tw);
    double f_term = std::pow(row.tail_f, 1.0 / inst.q);
    double h_term = h_term_hypothesis(inst, b, row.tail_h);
    double num = std::max(0.0, row.lhs - f_term - h_term);
    if (row.tail_u > 0.0) {
      row.ratio = num / row.tail_u;
    } else if (num > 0.0) {
      row.ratio = kInf;
      rep.infinite_flag = true;
    } else {
      row.ratio = 0.0;
    }
    rep.rows.push_back(row);
    rep.a_best = std::max(rep.a_best, row.ratio);
  }
  return rep;
}

RHReport conclusion_check(const RHInstance& inst, const std::vector<Ball>& family, double p) {
  validate_instance(inst);
  if (!(p > inst.q)) throw std::invalid_argument("conclusion exponent p must exceed q");
  const Space& s = *inst.space;
  double n_dil = inst.tw.dilation;

  RHReport rep;
  Field up = field_pow(inst.u, p);
  Field fq = field_pow(inst.f, inst.q);
  Field fp = field_pow(inst.f, p);
  Field hs = field_pow(inst.h, inst.s);

  // Lebesgue exponent of h in the conclusion, per variant.
  double h_exp = p * inst.s / inst.q;
  switch (inst.variant) {
    case RHVariant::RadiusPower:
      h_exp = p * inst.s / inst.q;
      break;
    case RHVariant::VolumeLowerBound:
      h_exp = p * inst.q_lower / (inst.q_lower + inst.beta * p);  // p_*
      break;
    case RHVariant::VolumePower:
      h_exp = p / (1.0 + inst.gamma * p);  // s*sigma
      break;
  }
  Field h_conc = field_pow(inst.h, h_exp);

  for (const Ball& b : family) {
    Ball nb = dilate(b, n_dil);
    RHRow row;
    row.ball = b;
    row.lhs = std::pow(ball_average(s, up, b), 1.0 / p);
    row.tail_u = tail_functional(s, inst.u, nb, inst.tw);
    row.tail_f = tail_functional(s, fq, nb, inst.tw);
    row.tail_h = tail_functional(s, hs, nb, inst.tw);

    // Tails run over NB while the radius/measure coefficients keep the base
    // ball, matching the conclusion display.
    double rhs =
        row.tail_u + std::pow(row.tail_f, 1.0 / inst.q) + h_term_hypothesis(inst, b, row.tail_h);
    rhs += std::pow(ball_average(s, fp, nb), 1.0 / p);
    double h_avg = ball_average(s, h_conc, nb);
    switch (inst.variant) {
      case RHVariant::RadiusPower:
        rhs += std::pow(b.radius, inst.beta) * std::pow(h_avg, inst.q / (inst.s * p));
        break;
      case RHVariant::VolumeLowerBound:
        rhs += std::pow(ball_measure(s, b), inst.beta / inst.q_lower) * std::pow(h_avg, 1.0 / h_exp);
        break;
      case RHVariant::VolumePower:
        rhs += std::pow(ball_measure(s, b), inst.gamma) * std::pow(h_avg, 1.0 / h_exp);
        break;
    }

    if (rhs > 0.0) {
      row.ratio = row.lhs / rhs;
    } else if (row.lhs > 0.0) {
      row.ratio = kInf;
      rep.infinite_flag = true;
    } else {
      row.ratio = 0.0;
    }
    rep.rows.push_back(row);
    rep.c_best = std::max(rep.c_best, row.ratio);
  }
  return rep;
}

RHReport estimate_gain(const RHInstance& inst, const std::vector<Ball>& family,
                       const std::vector<double>& p_grid, double c_max) {
  if (p_grid.empty()) throw std::invalid_argument("p grid must be nonempty");
  for (std::size_t i = 0; i + 1 < p_grid.size(); ++i)
    if (!(p_grid[i] < p_grid[i + 1])) throw std::invalid_argument("p grid must be increasing");
  if (!(p_grid.front() > inst.q)) throw std::invalid_argument("p grid must start above q");

  RHReport rep;
  rep.p_grid = p_grid;
  double prev = -kInf;
  for (double p : p_grid) {
    RHReport one = conclusion_check(inst, family, p);
    rep.c_best_curve.push_back(one.c_best);
    if (one.c_best < prev - 1e-12) rep.c_monotone = false;
    prev = one.c_best;
    if (one.c_best <= c_max) {
      rep.p_hat = p;
      rep.p_found = true;
    }
  }
  if (rep.p_found) rep.eps_hat = rep.p_hat - inst.q;
  return rep;
}

GlobalCheckReport global_check(const RHInstance& inst, double p, const std::string& phi_kind) {
  validate_instance(inst);
  const Space& s = *inst.space;
  GlobalCheckReport rep;
  rep.phi_kind = phi_kind;
  rep.lhs = field_lp_norm(s, inst.u, p);
  if (inst.variant == RHVariant::VolumeLowerBound) {
    double p_star = p * inst.q_lower / (inst.q_lower + inst.beta * p);
    rep.rhs = field_lp_norm(s, inst.f, p) + field_lp_norm(s, inst.h, p_star);
    rep.form = "volume-lower-bound";
  } else {
    rep.rhs = field_lp_norm(s, inst.u, inst.q) + field_lp_norm(s, inst.f, p) +
              field_lp_norm(s, inst.h, p * inst.s / inst.q);
    rep.form = "norm-sum";
  }
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : (rep.lhs > 0.0 ? kInf : 0.0);
  return rep;
}

RHSExponentReport rhs_exponent_check(const RHInstance& inst, double p, double s0, double s1,
                                     double s2, const SeqTriple& trip,
                                     const std::vector<Ball>& family, std::size_t m_max) {
  validate_instance(inst);
  if (!(s0 > 0.0 && s0 <= inst.q) || !(s1 > 0.0 && s1 <= inst.q) || !(s2 > 0.0 && s2 <= inst.q))
    throw std::invalid_argument("s0, s1, s2 must lie in (0, q]");

  RHSExponentReport rep;
  rep.convolution =
      convolution_conditions(trip, s2 / inst.q, inst.tw.dilation, inst.beta * s2, m_max);
  if (!rep.convolution.bounded_tilde || !rep.convolution.bounded_sharp ||
      !rep.convolution.bounded_radius)
    throw std::runtime_error(
        "rhs_exponent_check: convolution conditions unbounded for the supplied sequences");

  const Space& s = *inst.space;
  TailWeights tw_orig = TailWeights::explicit_list(trip.alpha, inst.tw.dilation);
  TailWeights tw_tilde = TailWeights::explicit_list(trip.alpha_tilde, inst.tw.dilation);

  Field up = field_pow(inst.u, p);
  Field uq = field_pow(inst.u, inst.q);
  Field us0 = field_pow(inst.u, s0);
  Field fs1 = field_pow(inst.f, s1);
  Field hs2 = field_pow(inst.h, s2);

  for (const Ball& b : family) {
    double lhs = std::pow(ball_average(s, up, b), 1.0 / p);
    double rb = std::pow(b.radius, inst.beta);
    double orig = std::pow(tail_functional(s, uq, b, tw_orig), 1.0 / inst.q) +
                  std::pow(tail_functional(s, fs1, b, tw_orig), 1.0 / s1) +
                  rb * std::pow(tail_functional(s, hs2, b, tw_orig), 1.0 / s2);
    double impr = std::pow(tail_functional(s, us0, b, tw_tilde), 1.0 / s0) +
                  std::pow(tail_functional(s, fs1, b, tw_tilde), 1.0 / s1) +
                  rb * std::pow(tail_functional(s, hs2, b, tw_tilde), 1.0 / s2);
    RHRow row;
    row.ball = b;
    row.lhs = lhs;
    row.tail_u = orig;
    row.tail_f = impr;
    row.ratio = impr > 0.0 ? lhs / impr : (lhs > 0.0 ? kInf : 0.0);
    rep.rows.push_back(row);
    rep.c_original = std::max(rep.c_original, orig > 0.0 ? lhs / orig : (lhs > 0.0 ? kInf : 0.0));
    rep.c_improved = std::max(rep.c_improved, row.ratio);
  }
  return rep;
}

}  // namespace rhtail
