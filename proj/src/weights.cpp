#include "rhtail/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "rhtail/field.hpp"

namespace rhtail {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

Field masked_field(const Space& s, const Field& w, const Ball& b) {
  Field out(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (ball_contains(s, b, i)) out[i] = w[i];
  return out;
}

double weight_of_set(const Space& s, const Field& w, const std::vector<std::size_t>& set) {
  double acc = 0.0;
  for (std::size_t i : set) acc += w[i] * s.measure(i);
  return acc;
}

double measure_of_set(const Space& s, const std::vector<std::size_t>& set) {
  double acc = 0.0;
  for (std::size_t i : set) acc += s.measure(i);
  return acc;
}

// Dilation factors sigma >= 1 realizing the sup/inf over dilated balls:
// N-adic powers and cell multiples capped at the saturating factor.
std::vector<double> sigma_grid(const Space& s, const Ball& b) {
  std::vector<double> out;
  double sat = s.diameter() / b.radius;
  out.push_back(1.0);
  if (s.is_grid()) {
    double h = s.spacing();
    for (int j = 1; j * h <= s.diameter(); ++j) {
      double sigma = j * h / b.radius;
      if (sigma > 1.0 && sigma < sat) out.push_back(sigma);
    }
  }
  for (double sigma = 2.0; sigma < sat; sigma *= 2.0) out.push_back(sigma);
  out.push_back(sat);  // saturated: the global average participates
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<std::vector<std::size_t>> SubsetSampler::sample(const Space& s, const Field& w,
                                                            const Ball& b) const {
  std::vector<std::size_t> members = ball_members(s, b);
  std::vector<std::vector<std::size_t>> out;
  if (members.empty()) return out;

  std::vector<double> vals;
  vals.reserve(members.size());
  for (std::size_t i : members) vals.push_back(w[i]);
  std::vector<double> sorted = vals;
  std::sort(sorted.begin(), sorted.end());

  for (double q : quantiles) {
    double thr = sorted[std::min(sorted.size() - 1,
                                 static_cast<std::size_t>(q * static_cast<double>(sorted.size())))];
    std::vector<std::size_t> sub, super;
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (vals[j] <= thr) sub.push_back(members[j]);
      if (vals[j] >= thr) super.push_back(members[j]);
    }
    if (!sub.empty()) out.push_back(std::move(sub));
    if (!super.empty()) out.push_back(std::move(super));
  }

  Rng rng(seed ^ (0x9e37u + b.center * 0x85ebca6bull + static_cast<std::uint64_t>(b.radius * 4096.0)));
  for (int t = 0; t < random_subsets; ++t) {
    std::vector<std::size_t> e;
    for (std::size_t i : members)
      if (rng.uniform() < 0.5) e.push_back(i);
    if (e.empty()) e.push_back(members[rng.next_below(members.size())]);
    out.push_back(std::move(e));
  }
  return out;
}

WeightReport vw_ainfty_constant(const Space& s, const Field& w, const std::vector<Ball>& family) {
  WeightReport rep;
  rep.klass = "vwAinfty";
  rep.comparability = maximal_comparability(s);
  for (const Ball& b : family) {
    Field loc = masked_field(s, w, b);
    Field mw = maximal(s, loc, MaximalVariant::uncentered());
    WeightRow row;
    row.ball = b;
    row.lhs = ball_average(s, mw, b);
    row.rhs = sup_functional(s, w, b, std::nullopt, DomainMode::Full);
    if (row.rhs > 0.0) {
      row.ratio = row.lhs / row.rhs;
    } else if (row.lhs > 0.0) {
      row.ratio = kInf;
      rep.infinite_flag = true;
    }
    rep.rows.push_back(row);
    rep.constant = std::max(rep.constant, row.ratio);
  }
  return rep;
}

WeightReport vw_improvement(const Space& s, const Field& w, const std::vector<Ball>& family,
                            const std::vector<double>& p_grid, double c_max) {
  WeightReport rep;
  rep.klass = "vwAinftyImprovement";
  rep.comparability = maximal_comparability(s);
  rep.p_grid = p_grid;
  rep.c_curve.assign(p_grid.size(), 0.0);
  // The maximal field and the sup on the right depend on the ball only.
  for (const Ball& b : family) {
    Field loc = masked_field(s, w, b);
    Field mw = maximal(s, loc, MaximalVariant::uncentered());
    double rhs = sup_functional(s, w, b, std::nullopt, DomainMode::Full);
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
      double lhs = std::pow(ball_average(s, field_pow(mw, p_grid[i]), b), 1.0 / p_grid[i]);
      double c = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? kInf : 0.0);
      rep.c_curve[i] = std::max(rep.c_curve[i], c);
    }
  }
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (std::isfinite(rep.c_curve[i]) && rep.c_curve[i] <= c_max) {
      rep.p_hat = p_grid[i];
      rep.p_found = true;
      rep.constant = rep.c_curve[i];
    }
  }
  return rep;
}

WeightReport vw_ainfty_condition(const Space& s, const Field& w, const std::vector<Ball>& family,
                                 const SubsetSampler& sampler, double p) {
  WeightReport rep;
  rep.klass = "vwAinftyCondition";
  std::optional<Prefix1D> pref;
  if (s.is_grid() && s.dim() == 1) pref.emplace(s, w);
  for (const Ball& b : family) {
    double mu_b = ball_measure(s, b);
    auto subsets = sampler.sample(s, w, b);
    for (const auto& e : subsets) {
      double w_e = weight_of_set(s, w, e);
      double mu_e = measure_of_set(s, e);
      if (mu_e <= 0.0) continue;
      double inf_val = kInf;
      bool flagged = false;
      for (double sigma : sigma_grid(s, b)) {
        Ball sb = dilate(b, sigma);
        double w_sb = pref ? pref->integral(sb) : ball_integral(s, w, sb);
        double mu_sb = pref ? pref->measure(sb) : ball_measure(s, sb);
        if (w_sb <= 0.0) {
          flagged = true;
          continue;
        }
        inf_val = std::min(inf_val, (w_e / w_sb) * (mu_sb / mu_b));
      }
      WeightRow row;
      row.ball = b;
      row.subset_size = e.size();
      row.lhs = inf_val;
      row.rhs = std::pow(mu_e / mu_b, 1.0 / p);
      row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : kInf;
      if (flagged) rep.infinite_flag = true;
      rep.rows.push_back(row);
      rep.constant = std::max(rep.constant, row.ratio);
    }
  }
  return rep;
}

WeightReport vw_rh_constant(const Space& s, const Field& w, const std::vector<Ball>& family,
                            double q) {
  if (!(q > 1.0)) throw std::invalid_argument("vw_rh_constant needs q > 1");
  WeightReport rep;
  rep.klass = "vwRH";
  Field wq = field_pow(w, q);
  for (const Ball& b : family) {
    WeightRow row;
    row.ball = b;
    row.lhs = std::pow(ball_average(s, wq, b), 1.0 / q);
    row.rhs = sup_functional(s, w, b, std::nullopt, DomainMode::Full);
    row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : (row.lhs > 0.0 ? kInf : 0.0);
    if (!std::isfinite(row.ratio)) rep.infinite_flag = true;
    rep.rows.push_back(row);
    rep.constant = std::max(rep.constant, row.ratio);
  }
  return rep;
}

double cp_tail(const Space& s, const Field& w, const Ball& b, double p, CpMethod method) {
  if (!s.is_grid()) throw std::invalid_argument("cp_tail needs a grid torus");
  if (!(p > 1.0)) throw std::invalid_argument("cp_tail needs p > 1");
  if (method == CpMethod::Dyadic) {
    double g = std::pow(2.0, -static_cast<double>(s.dim()) * (p - 1.0));
    TailWeights tw = TailWeights::geometric(1.0, g, 2.0);
    return tail_functional(s, w, b, tw);
  }
  Field ind(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (ball_contains(s, b, i)) ind[i] = 1.0;
  Field m_ind = maximal(s, ind, MaximalVariant::uncentered());
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    acc += std::pow(m_ind[i], p) * w[i] * s.measure(i);
  return acc / ball_measure(s, b);
}

CpReport cp_check(const Space& s, const Field& w, const std::vector<Ball>& family,
                  const SubsetSampler& sampler, double p, const std::vector<double>& delta_grid) {
  CpReport rep;
  rep.delta_grid = delta_grid;
  rep.c_of_delta.assign(delta_grid.size(), 0.0);
  for (const Ball& b : family) {
    double mu_b = ball_measure(s, b);
    // Unnormalized integral int M(1_B)^p w dmu.
    double rhs_int = cp_tail(s, w, b, p, CpMethod::Integral) * mu_b;
    auto subsets = sampler.sample(s, w, b);
    for (const auto& e : subsets) {
      double w_e = weight_of_set(s, w, e);
      double mu_e = measure_of_set(s, e);
      if (mu_e <= 0.0 || rhs_int <= 0.0) continue;
      for (std::size_t d = 0; d < delta_grid.size(); ++d) {
        double ratio = w_e / (std::pow(mu_e / mu_b, delta_grid[d]) * rhs_int);
        rep.c_of_delta[d] = std::max(rep.c_of_delta[d], ratio);
      }
      WeightRow row;
      row.ball = b;
      row.subset_size = e.size();
      row.lhs = w_e;
      row.rhs = rhs_int;
      row.ratio = w_e / rhs_int;
      rep.rows.push_back(row);
    }
  }
  return rep;
}

}  // namespace rhtail
