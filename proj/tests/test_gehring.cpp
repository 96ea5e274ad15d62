#include <cmath>

#include "doctest.h"
#include "rhtail/field.hpp"
#include "rhtail/gehring.hpp"

using namespace rhtail;

namespace {

RHInstance flat_instance(const Space& g, double q) {
  RHInstance inst;
  inst.space = &g;
  inst.u = make_constant_field(g, 1.0);
  inst.f = make_constant_field(g, 0.0);
  inst.h = make_constant_field(g, 0.0);
  inst.q = q;
  inst.s = q / 2.0;
  inst.tw = TailWeights::geometric(1.0, 0.5, 2.0);
  return inst;
}

}  // namespace

TEST_CASE("hypothesis constant trivial values") {
  Space g = Space::periodic_grid(1, 256, 1.0);
  auto family = make_ball_family(g, 32, 2.0);

  // u == 1, f = h = 0: LHS = 1 and a_u = alpha_total = 2, so A_best = 1/2.
  RHInstance inst = flat_instance(g, 1.5);
  RHReport rep = hypothesis_constant(inst, family);
  CHECK(rep.a_best == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(!rep.infinite_flag);

  // u == 0 with f dominating: A_best = 0.
  RHInstance zero = inst;
  zero.u = make_constant_field(g, 0.0);
  zero.f = make_constant_field(g, 3.0);
  CHECK(hypothesis_constant(zero, family).a_best == doctest::Approx(0.0));

  CHECK_THROWS(hypothesis_constant(inst, {}));
}

TEST_CASE("hypothesis constant finite for the power weight below critical") {
  Space g = Space::periodic_grid(1, 512, 1.0);
  RHInstance inst = flat_instance(g, 1.5);
  inst.u = make_power_field(g, 0.5, 0);
  auto family = make_ball_family(g, 64, 2.0);
  RHReport rep = hypothesis_constant(inst, family);
  CHECK(std::isfinite(rep.a_best));
  CHECK(rep.a_best > 0.0);
  CHECK(rep.rows.size() == family.size());
}

TEST_CASE("conclusion check trivial and consistency values") {
  Space g = Space::periodic_grid(1, 256, 1.0);
  auto family = make_ball_family(g, 32, 2.0);
  RHInstance inst = flat_instance(g, 1.5);

  // u == 1, f = h = 0: ratio is 1/alpha_total for every ball.
  RHReport rep = conclusion_check(inst, family, 2.0);
  for (const RHRow& row : rep.rows) CHECK(row.ratio == doctest::Approx(0.5).epsilon(1e-13));

  CHECK_THROWS(conclusion_check(inst, family, 1.2));  // p <= q

  // Finite conclusion constant for the power weight at p = 1.8 < 2.
  RHInstance pw = inst;
  pw.u = make_power_field(g, 0.5, 0);
  RHReport pc = conclusion_check(pw, family, 1.8);
  CHECK(std::isfinite(pc.c_best));
  CHECK(pc.c_best > 0.0);
}

TEST_CASE("variant reduction and hypothesis agreement") {
  Space g = Space::periodic_grid(1, 128, 1.0);
  auto family = make_ball_family(g, 16, 2.0);
  Rng rng(55);
  Field u(g.size()), f(g.size()), h(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    u[i] = 0.2 + rng.uniform();
    f[i] = rng.uniform();
    h[i] = rng.uniform();
  }

  RHInstance radius;
  radius.space = &g;
  radius.u = u;
  radius.f = f;
  radius.h = h;
  radius.q = 2.0;
  radius.s = 1.0;
  radius.beta = 0.0;
  radius.tw = TailWeights::geometric(1.0, 0.5, 2.0);
  radius.variant = RHVariant::RadiusPower;

  RHInstance volume = radius;
  volume.variant = RHVariant::VolumePower;
  volume.gamma = 0.0;

  // The hypothesis sides agree exactly for any data when beta = gamma = 0.
  RHReport ra = hypothesis_constant(radius, family);
  RHReport va = hypothesis_constant(volume, family);
  CHECK(ra.a_best == doctest::Approx(va.a_best).epsilon(1e-13));

  // Conclusions agree exactly when h = 0 (the h-Lebesgue exponents differ by
  // design: ps/q for the radius form, p for the volume form).
  RHInstance radius0 = radius;
  radius0.h = make_constant_field(g, 0.0);
  RHInstance volume0 = volume;
  volume0.h = make_constant_field(g, 0.0);
  RHReport rc = conclusion_check(radius0, family, 3.0);
  RHReport vc = conclusion_check(volume0, family, 3.0);
  CHECK(rc.c_best == doctest::Approx(vc.c_best).epsilon(1e-13));

  // Volume lower bound with Q = n and beta = 0: p_* = p, the h-term becomes a
  // plain L^p average and matches the volume-power form at gamma = 0.
  RHInstance vlb = radius;
  vlb.variant = RHVariant::VolumeLowerBound;
  vlb.q_lower = 1.0;
  vlb.beta = 0.0;
  RHReport vlbc = conclusion_check(vlb, family, 3.0);
  RHReport vpc = conclusion_check(volume, family, 3.0);
  CHECK(vlbc.c_best == doctest::Approx(vpc.c_best).epsilon(1e-13));
}

TEST_CASE("scale invariance and family monotonicity") {
  Space g = Space::periodic_grid(1, 256, 1.0);
  RHInstance inst = flat_instance(g, 1.5);
  inst.u = make_power_field(g, 0.4, 0);
  auto family = make_ball_family(g, 32, 2.0);

  RHReport base = hypothesis_constant(inst, family);
  RHInstance scaled = inst;
  scaled.u = field_scale(inst.u, 37.5);
  RHReport sc = hypothesis_constant(scaled, family);
  CHECK(sc.a_best == doctest::Approx(base.a_best).epsilon(1e-12));

  auto bigger = make_ball_family(g, 64, 2.0);
  RHReport more = hypothesis_constant(inst, bigger);
  CHECK(more.a_best >= base.a_best - 1e-14);

  // C_best(p) is non-decreasing in p when f = h = 0.
  double prev = 0.0;
  for (double p : {1.6, 1.8, 2.0, 2.4, 2.8}) {
    double c = conclusion_check(inst, family, p).c_best;
    CHECK(c >= prev - 1e-13);
    prev = c;
  }
}

TEST_CASE("hypothesis constant across the critical exponent under refinement") {
  // u = |x|^{-1/2}: A_best settles below the critical exponent q = 2 and
  // keeps growing above it (rate M^{(q-2)/(2q)} for the rooted constant).
  double sub[2], super[2];
  int idx = 0;
  for (int m : {256, 512}) {
    Space g = Space::periodic_grid(1, m, 1.0);
    auto family = make_ball_family(g, 64, 2.0);
    RHInstance inst = flat_instance(g, 1.5);
    inst.u = make_power_field(g, 0.5, 0);
    sub[idx] = hypothesis_constant(inst, family).a_best;
    inst.q = 2.5;
    inst.s = 1.25;
    super[idx] = hypothesis_constant(inst, family).a_best;
    ++idx;
  }
  CHECK(sub[1] <= 1.05 * sub[0]);
  CHECK(super[1] >= 1.05 * super[0]);
}

TEST_CASE("estimate gain") {
  Space g = Space::periodic_grid(1, 256, 1.0);
  RHInstance inst = flat_instance(g, 1.5);
  auto family = make_ball_family(g, 32, 2.0);
  std::vector<double> grid = {1.6, 1.8, 2.0, 2.2, 2.4};

  // u == 1 passes everywhere: p_hat is the top of the grid.
  RHReport rep = estimate_gain(inst, family, grid, 100.0);
  CHECK(rep.p_found);
  CHECK(rep.p_hat == doctest::Approx(2.4));
  CHECK(rep.eps_hat == doctest::Approx(0.9));
  CHECK(rep.c_monotone);

  // An impossible cap finds nothing and still reports the curve.
  RHReport none = estimate_gain(inst, family, grid, 1e-9);
  CHECK(!none.p_found);
  CHECK(none.c_best_curve.size() == grid.size());

  CHECK_THROWS(estimate_gain(inst, family, {1.4, 1.6}, 10.0));  // grid below q
  CHECK_THROWS(estimate_gain(inst, family, {2.0, 1.9}, 10.0));  // not increasing
}

TEST_CASE("global check") {
  Space g = Space::periodic_grid(1, 128, 2.0);  // period 2: measure of X is 2
  RHInstance inst = flat_instance(g, 1.5);
  GlobalCheckReport rep = global_check(inst, 2.5, "ahlfors");
  // |1|_p = mu(X)^{1/p}; f = h = 0.
  double expect = std::pow(2.0, 1.0 / 2.5) / std::pow(2.0, 1.0 / 1.5);
  CHECK(rep.ratio == doctest::Approx(expect).epsilon(1e-13));

  // u = f, h = 0 in the volume-lower-bound form: ratio exactly 1.
  RHInstance same = inst;
  same.u = make_power_field(g, 0.3, 0);
  same.f = same.u;
  same.variant = RHVariant::VolumeLowerBound;
  same.q_lower = 1.0;
  same.beta = 0.0;
  GlobalCheckReport vb = global_check(same, 2.5, "ahlfors");
  CHECK(vb.ratio == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(vb.form == "volume-lower-bound");
}

TEST_CASE("rhs exponent self-improvement") {
  Space g = Space::periodic_grid(1, 256, 1.0);
  double n_base = 2.0;
  double q = 2.0;

  RHInstance inst;
  inst.space = &g;
  inst.u = make_power_field(g, 0.3, 0);
  inst.f = make_constant_field(g, 0.0);
  inst.h = make_constant_field(g, 0.0);
  inst.q = q;
  inst.s = 1.0;
  inst.beta = 0.0;
  inst.tw = TailWeights::geometric(1.0, std::pow(n_base, -1.2), n_base);
  auto family = make_ball_family(g, 24, n_base);

  // Geometric alpha with slightly degraded decay for tilde/sharp.
  double gamma = 1.2, gamma_p = 0.9, tau = 0.5;
  SeqTriple trip;
  for (int k = 0; k < 48; ++k) {
    trip.alpha.push_back(std::pow(n_base, -gamma * k));
    trip.alpha_tilde.push_back(std::pow(n_base, -gamma_p * tau * k));
    trip.alpha_sharp.push_back(std::pow(n_base, -gamma_p * k));
  }
  trip.tau = tau;

  RHSExponentReport rep = rhs_exponent_check(inst, 2.5, q / 2.0, q, q, trip, family);
  CHECK(std::isfinite(rep.c_improved));
  CHECK(rep.c_improved > 0.0);
  // The improved right-hand side uses a slower-decaying sequence and a lower
  // u-exponent, so its constant cannot beat the original by more than the
  // convolution slack.
  CHECK(rep.c_improved <= rep.c_original * (rep.convolution.c_tilde + 1.0));

  // u == 1: both forms are constants, the ratio of constants is governed by
  // the sequence totals.
  RHInstance one = inst;
  one.u = make_constant_field(g, 1.0);
  RHSExponentReport flat = rhs_exponent_check(one, 2.5, q, q, q, trip, family);
  double tot_a = 0.0, tot_t = 0.0;
  for (double v : trip.alpha) tot_a += v;
  for (double v : trip.alpha_tilde) tot_t += v;
  CHECK(flat.c_original == doctest::Approx(1.0 / std::pow(tot_a, 1.0 / q)).epsilon(1e-12));
  CHECK(flat.c_improved == doctest::Approx(1.0 / std::pow(tot_t, 1.0 / q)).epsilon(1e-12));

  // Unbounded convolution conditions refuse with a diagnostic.
  SeqTriple self;
  self.alpha = trip.alpha;
  self.alpha_tilde = trip.alpha;
  self.alpha_sharp = trip.alpha;
  self.tau = 1.0;
  CHECK_THROWS(rhs_exponent_check(inst, 2.5, q, q, q, self, family));
}
