#include "rhtail/tails.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace rhtail {

namespace {

void require_nonneg(const Field& u, const char* who) {
  for (double v : u)
    if (v < 0.0) throw NonNegativityError(who);
}

// First k with N^k * r >= diameter (saturation index).
std::size_t saturation_index(const Space& s, double r, double n_base) {
  if (r <= 0.0) throw EmptyBallError("tail over a ball of nonpositive radius");
  std::size_t k = 0;
  double rad = r;
  while (rad < s.diameter()) {
    rad *= n_base;
    ++k;
    if (k > 4096) break;  // unreachable for N > 1; guards bad input
  }
  return k;
}

}  // namespace

TailWeights TailWeights::geometric(double alpha0, double g, double dilation_n) {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
  if (!(g > 0.0 && g < 1.0)) throw std::invalid_argument("geometric base must lie in (0,1)");
  if (!(dilation_n > 1.0)) throw std::invalid_argument("dilation base must exceed 1");
  TailWeights tw;
  tw.kind = Kind::Geometric;
  tw.alpha0 = alpha0;
  tw.g = g;
  tw.dilation = dilation_n;
  tw.non_increasing = true;
  return tw;
}

TailWeights TailWeights::explicit_list(std::vector<double> alphas, double dilation_n) {
  if (alphas.empty()) throw std::invalid_argument("explicit sequence must be nonempty");
  for (double a : alphas)
    if (!(a > 0.0)) throw std::invalid_argument("all alpha_k must be positive");
  if (!(dilation_n > 1.0)) throw std::invalid_argument("dilation base must exceed 1");
  TailWeights tw;
  tw.kind = Kind::Explicit;
  tw.list = std::move(alphas);
  tw.dilation = dilation_n;
  tw.non_increasing = true;
  for (std::size_t k = 0; k + 1 < tw.list.size(); ++k)
    if (tw.list[k] < tw.list[k + 1]) tw.non_increasing = false;
  return tw;
}

double TailWeights::alpha(std::size_t k) const {
  if (kind == Kind::Explicit) return k < list.size() ? list[k] : 0.0;
  return alpha0 * std::pow(g, static_cast<double>(k));
}

double TailWeights::total() const {
  if (kind == Kind::Explicit) {
    double acc = 0.0;
    for (double a : list) acc += a;
    return acc;
  }
  return alpha0 / (1.0 - g);
}

double TailWeights::tail_from(std::size_t k) const {
  if (kind == Kind::Explicit) {
    double acc = 0.0;
    for (std::size_t j = k; j < list.size(); ++j) acc += list[j];
    return acc;
  }
  return alpha0 * std::pow(g, static_cast<double>(k)) / (1.0 - g);
}

std::size_t TailWeights::count() const {
  return kind == Kind::Explicit ? list.size() : std::numeric_limits<std::size_t>::max();
}

std::vector<double> TailWeights::materialize(std::size_t min_len, double rel_tol) const {
  if (kind == Kind::Explicit) return list;
  std::size_t len = min_len;
  double cutoff = static_cast<double>(len);
  while (std::pow(g, cutoff) / (1.0 - g) > rel_tol) {
    ++len;
    cutoff = static_cast<double>(len);
  }
  std::vector<double> out(len);
  for (std::size_t k = 0; k < len; ++k) out[k] = alpha(k);
  return out;
}

double tail_functional(const Space& s, const Field& u, const Ball& b, const TailWeights& tw) {
  require_nonneg(u, "tail_functional");
  std::size_t ksat = saturation_index(s, b.radius, tw.dilation);
  double acc = 0.0;
  double rad = b.radius;
  for (std::size_t k = 0; k < ksat; ++k) {
    acc += tw.alpha(k) * ball_average(s, u, Ball{b.center, rad});
    rad *= tw.dilation;
  }
  double rest = tw.tail_from(ksat);
  if (rest > 0.0) acc += rest * field_mean(s, u);
  return acc;
}

double sup_functional(const Space& s, const Field& u, const Ball& b,
                      const std::optional<Region>& omega, DomainMode mode, double dilation_n) {
  if (b.radius <= 0.0) throw EmptyBallError("sup_functional base ball");
  bool whole = !omega || omega->whole;
  double bound;
  bool inclusive;
  if (whole) {
    bound = s.diameter();
    inclusive = true;
  } else {
    if (mode == DomainMode::Loc && !region_contains_ball(s, *omega, dilate(b, 2.0)))
      throw InadmissibleBallError("2B must be contained in the region");
    double c = mode == DomainMode::Loc ? 0.5 : 0.75;
    bound = c * region_complement_distance(s, *omega, b.center);
    inclusive = false;
  }

  std::set<double> radii;
  radii.insert(b.radius);
  auto admit = [&](double r) {
    if (r < b.radius) return;
    if (inclusive ? r <= bound : r < bound) radii.insert(r);
  };
  if (s.is_grid()) {
    double h = s.spacing();
    for (int j = 1; j * h <= bound + h; ++j) admit(j * h);
  } else {
    for (std::size_t j = 0; j < s.size(); ++j) admit(s.distance(b.center, j));
  }
  for (double r = b.radius * dilation_n; r <= bound * dilation_n; r *= dilation_n) admit(r);
  if (whole) radii.insert(s.diameter());

  double best = 0.0;
  if (s.is_grid() && s.dim() == 1) {
    Prefix1D pref(s, u);
    for (double r : radii) best = std::max(best, pref.average(Ball{b.center, r}));
    return best;
  }
  for (double r : radii) best = std::max(best, ball_average(s, u, Ball{b.center, r}));
  return best;
}

double domain_tail(const Space& s, const Field& u, const Ball& b, const Region& omega,
                   DomainMode mode, const TailWeights& tw) {
  bool everything = omega.whole;
  if (!everything) {
    everything = true;
    for (std::uint8_t m : omega.mask) everything = everything && m;
  }
  if (everything) return tail_functional(s, u, b, tw);
  require_nonneg(u, "domain_tail");
  double factor = mode == DomainMode::Loc ? 16.0 : 2.0;
  double acc = 0.0;
  double rad = b.radius;
  std::size_t horizon = std::max<std::size_t>(tw.count() == std::numeric_limits<std::size_t>::max()
                                                  ? saturation_index(s, b.radius, tw.dilation) + 1
                                                  : tw.count(),
                                              1);
  for (std::size_t k = 0; k < horizon; ++k) {
    Ball dil{b.center, rad};
    if (!region_contains_ball(s, omega, Ball{b.center, factor * rad})) break;
    acc += tw.alpha(k) * ball_average(s, u, dil);
    rad *= tw.dilation;
  }
  return acc;
}

Field maximal(const Space& s, const Field& u, const MaximalVariant& variant) {
  require_nonneg(u, "maximal");
  if (variant.exponent < 0.0) throw std::invalid_argument("maximal exponent must be >= 0");
  Field out(s.size(), 0.0);

  std::vector<double> radii;
  if (s.is_grid()) {
    for (double r = s.spacing(); r < s.diameter(); r *= 2.0) radii.push_back(r);
  } else {
    double rmin = s.diameter();
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j)
        rmin = std::min(rmin, s.distance(i, j));
    for (double r = rmin; r < s.diameter(); r *= 2.0) radii.push_back(r);
  }
  radii.push_back(s.diameter());

  auto factor_for = [&](const Ball& ball) {
    switch (variant.kind) {
      case MaximalKind::Uncentered:
        return 1.0;
      case MaximalKind::Fractional:
        return std::pow(ball.radius, variant.exponent);
      case MaximalKind::VolumePower:
        return std::pow(ball_measure(s, ball), variant.exponent);
    }
    return 1.0;
  };

  if (s.is_grid() && s.dim() == 1) {
    // Cyclic prefix sums make every interval average O(1).
    int m = s.cells_per_side();
    std::vector<double> pref(m + 1, 0.0);
    for (int i = 0; i < m; ++i) pref[i + 1] = pref[i] + u[i];
    double total = pref[m];
    auto range_sum = [&](int lo, int len) {
      lo = ((lo % m) + m) % m;
      if (len >= m) return total;
      int hi = lo + len;
      if (hi <= m) return pref[hi] - pref[lo];
      return (pref[m] - pref[lo]) + pref[hi - m];
    };
    double h = s.spacing();
    for (double r : radii) {
      Ball probe{0, r};
      double fac = factor_for(probe);
      bool sat = ball_saturated(s, probe);
      int k = sat ? m : 0;
      if (!sat) {
        k = static_cast<int>(std::ceil(r / h)) - 1;
        if (k < 0) k = 0;
        while (k * h >= r) --k;
        while ((k + 1) * h < r) ++k;
      }
      long cnt = sat ? m : std::min(2 * k + 1, m);
      for (int y = 0; y < m; ++y) {
        double avg = (sat || cnt >= m) ? total / m : range_sum(y - k, 2 * k + 1) / cnt;
        double val = fac * avg;
        if (sat || cnt >= m) {
          for (int x = 0; x < m; ++x) out[x] = std::max(out[x], val);
          break;
        }
        for (int d = -k; d <= k; ++d) {
          std::size_t x = s.grid_index(y + d);
          out[x] = std::max(out[x], val);
        }
      }
    }
    return out;
  }

  for (double r : radii) {
    for (std::size_t y = 0; y < s.size(); ++y) {
      Ball ball{y, r};
      auto mem = ball_members(s, ball);
      if (mem.empty()) continue;
      double num = 0.0, den = 0.0;
      for (std::size_t i : mem) {
        num += u[i] * s.measure(i);
        den += s.measure(i);
      }
      double val = factor_for(ball) * (num / den);
      for (std::size_t i : mem) out[i] = std::max(out[i], val);
      if (ball_saturated(s, ball)) break;
    }
  }
  return out;
}

double maximal_comparability(const Space& s) {
  DoublingProfile prof = doubling_profile(s, default_doubling_samples(s));
  return prof.c_d * prof.c_d * prof.c_d;
}

namespace {

// Index of the block (m^(k-1), m^k] containing n^j, ties to the lower block.
std::size_t block_of(std::size_t j, double log_n, double log_m) {
  double t = static_cast<double>(j) * log_n / log_m;
  double k = std::ceil(t - 1e-9);
  if (k < 0.0) k = 0.0;
  return static_cast<std::size_t>(k);
}

void check_stretch_args(double m, double n) {
  if (!(n > 1.0) || !(n <= m)) throw std::invalid_argument("need 1 < n <= m");
}

}  // namespace

std::vector<double> stretch(const std::vector<double>& alpha, double m, double n) {
  check_stretch_args(m, n);
  if (alpha.empty()) return {};
  double log_n = std::log(n), log_m = std::log(m);
  std::size_t out_len =
      static_cast<std::size_t>(std::floor(static_cast<double>(alpha.size() - 1) * log_m / log_n + 1e-9)) + 1;
  std::vector<double> out(out_len, 0.0);
  for (std::size_t j = 0; j < out_len; ++j) {
    std::size_t k = block_of(j, log_n, log_m);
    out[j] = k < alpha.size() ? alpha[k] : 0.0;
  }
  return out;
}

std::vector<double> regroup(const std::vector<double>& alpha, double m, double n) {
  check_stretch_args(m, n);
  if (alpha.empty()) return {};
  double log_n = std::log(n), log_m = std::log(m);
  double ratio = log_m / log_n;
  // l is the integer with l < ln m / ln n <= l + 1.
  long l = static_cast<long>(std::ceil(ratio - 1e-9)) - 1;

  std::size_t out_len = block_of(alpha.size() - 1, log_n, log_m) + 1;
  std::vector<double> out(out_len, 0.0);
  for (std::size_t k = 0; k < out_len; ++k) {
    // j-range of block k: n^j > m^(k-1) and n^j <= m^k.
    long jlo = static_cast<long>(std::floor((static_cast<double>(k) - 1.0) * ratio + 1e-9)) + 1;
    if (jlo < 0) jlo = 0;
    long jhi = static_cast<long>(std::floor(static_cast<double>(k) * ratio + 1e-9));
    double sum = 0.0;
    for (long j = jlo; j <= jhi; ++j)
      if (j >= 0 && static_cast<std::size_t>(j) < alpha.size()) sum += alpha[static_cast<std::size_t>(j)];
    long count = jhi - jlo + 1;
    double beta = 0.0;
    if (count != l + 1) {
      std::size_t jmin = static_cast<std::size_t>(jlo);
      beta = jmin < alpha.size() ? alpha[jmin] : 0.0;
    }
    out[k] = sum + beta;
  }
  return out;
}

DilationChangeReport dilation_change_check(const Space& s, const Field& u, const Ball& b,
                                           const TailWeights& tw, double new_base,
                                           const DoublingProfile& prof) {
  if (!(new_base > 1.0)) throw std::invalid_argument("new dilation base must exceed 1");
  DilationChangeReport rep;
  rep.value_base_n = tail_functional(s, u, b, tw);

  double n_base = tw.dilation;
  std::size_t ksat_m = saturation_index(s, b.radius, new_base);
  const std::size_t slack = 48;
  std::vector<double> beta;
  if (new_base == n_base) {
    beta = tw.materialize(ksat_m + slack);
    rep.transform = "identity";
    rep.bound = 1.0 + 1e-12;
  } else if (new_base > n_base) {
    double horizon =
        (static_cast<double>(ksat_m) + slack) * std::log(new_base) / std::log(n_base);
    std::vector<double> alpha = tw.materialize(static_cast<std::size_t>(horizon) + slack);
    beta = regroup(alpha, new_base, n_base);
    rep.transform = "regroup";
    rep.bound = prof.c_d * std::pow(new_base, prof.dimension);
  } else {
    long l = static_cast<long>(std::ceil(std::log(n_base) / std::log(new_base) - 1e-9));
    double big = std::pow(new_base, static_cast<double>(l));
    double horizon = (static_cast<double>(ksat_m) / static_cast<double>(l) + slack) *
                     std::max(1.0, std::log(big) / std::log(n_base));
    std::vector<double> alpha = tw.materialize(static_cast<std::size_t>(horizon) + slack);
    std::vector<double> grouped = big == n_base ? alpha : regroup(alpha, big, n_base);
    beta = stretch(grouped, big, new_base);
    rep.transform = big == n_base ? "stretch" : "regroup+stretch";
    rep.bound = prof.c_d * std::pow(big, prof.dimension);
  }

  TailWeights tw_m = TailWeights::explicit_list(
      std::vector<double>(beta.begin(),
                          beta.begin() + std::min<std::size_t>(beta.size(), ksat_m + slack)),
      new_base);
  rep.value_base_m = tail_functional(s, u, b, tw_m);
  rep.ratio = rep.value_base_m == 0.0 ? 0.0 : rep.value_base_n / rep.value_base_m;
  rep.within_bound = rep.ratio <= rep.bound * (1.0 + 1e-9);
  return rep;
}

ConvolutionReport convolution_conditions(const SeqTriple& trip, double s2_over_q, double n_base,
                                         double beta_s2, std::size_t m_max) {
  if (trip.alpha.empty() || trip.alpha_tilde.empty() || trip.alpha_sharp.empty())
    throw std::invalid_argument("sequences must be nonempty");
  if (!(trip.tau > 0.0 && trip.tau <= 1.0)) throw std::invalid_argument("tau must be in (0,1]");
  if (!(trip.alpha_tilde[0] > 0.0 && trip.alpha_sharp[0] > 0.0))
    throw std::invalid_argument("tilde and sharp sequences need positive first entries");
  for (double a : trip.alpha)
    if (!(a > 0.0)) throw std::invalid_argument("alpha must be strictly positive");

  auto at = [](const std::vector<double>& v, std::size_t k) {
    return k < v.size() ? v[k] : 0.0;
  };
  std::size_t horizon = std::min(m_max, trip.alpha.size() - 1);
  ConvolutionReport rep;
  for (std::size_t m = 0; m <= horizon; ++m) {
    double st = 0.0, ss = 0.0, sr = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
      double am_k = at(trip.alpha, m - k);
      st += at(trip.alpha_tilde, k) * std::pow(am_k, trip.tau);
      ss += at(trip.alpha_sharp, k) * am_k;
      sr += at(trip.alpha_tilde, k) * std::pow(am_k, s2_over_q) *
            std::pow(n_base, static_cast<double>(m - k) * beta_s2);
    }
    double dt = at(trip.alpha_tilde, m), ds = at(trip.alpha_sharp, m);
    rep.ratio_tilde.push_back(dt > 0.0 ? st / dt : std::numeric_limits<double>::infinity());
    rep.ratio_sharp.push_back(ds > 0.0 ? ss / ds : std::numeric_limits<double>::infinity());
    rep.ratio_radius.push_back(dt > 0.0 ? sr / dt : std::numeric_limits<double>::infinity());
  }

  auto summarize = [&](const std::vector<double>& r, double& c, bool& bounded) {
    c = 0.0;
    for (double v : r) c = std::max(c, v);
    std::size_t cut = r.size() - r.size() / 4;
    double head = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
      (i < cut ? head : tail) = std::max(i < cut ? head : tail, r[i]);
    bounded = std::isfinite(c) && (r.size() < 8 || tail <= 1.15 * head);
  };
  summarize(rep.ratio_tilde, rep.c_tilde, rep.bounded_tilde);
  summarize(rep.ratio_sharp, rep.c_sharp, rep.bounded_sharp);
  summarize(rep.ratio_radius, rep.c_radius, rep.bounded_radius);
  return rep;
}

double kernel_tail(const Space& s, const Field& u, const Ball& b,
                   const std::function<double(double)>& profile) {
  if (!s.is_grid()) throw std::invalid_argument("kernel_tail needs a grid space");
  if (b.radius <= 0.0) throw EmptyBallError("kernel_tail base ball");

  // Validate the discrete profile along the sorted distance grid.
  std::vector<double> dists;
  dists.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) dists.push_back(s.distance(b.center, i) / b.radius);
  std::sort(dists.begin(), dists.end());
  double prev = std::numeric_limits<double>::infinity();
  for (double t : dists) {
    double v = profile(t);
    if (!std::isfinite(v)) throw std::invalid_argument("kernel profile must be bounded");
    if (prev != std::numeric_limits<double>::infinity() && v > prev + 1e-12)
      throw std::invalid_argument("kernel profile must be non-increasing");
    prev = v;
  }

  double rn = std::pow(b.radius, s.dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    acc += profile(s.distance(b.center, i) / b.radius) * u[i] * s.measure(i);
  return acc / rn;
}

}  // namespace rhtail
