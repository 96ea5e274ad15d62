#include <cmath>

#include "doctest.h"
#include "rhtail/field.hpp"
#include "rhtail/fracops.hpp"

using namespace rhtail;

namespace {

const double kTwoPi = 6.283185307179586476925286766559;

double rel_l2(const Space& s, const CxField& got, const CxField& want) {
  CxField d = got;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= want[i];
  double nw = cx_norm2(s, want);
  return nw == 0.0 ? cx_norm2(s, d) : cx_norm2(s, d) / nw;
}

}  // namespace

TEST_CASE("single-mode action of the fractional laplacian") {
  Space g = Space::periodic_grid(1, 64, 1.0);
  int k = 3;
  Field u(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    u[i] = std::cos(kTwoPi * k * g.coords(i)[0]);
  double a = 0.6;
  CxField got = apply_scalar_symbol(g, to_complex(u), Symbol{SymbolId::FracLaplacian, a});
  double factor = std::pow(kTwoPi * k, a);
  CxField want(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) want[i] = cd(factor * u[i], 0.0);
  CHECK(rel_l2(g, got, want) < 1e-13);
}

TEST_CASE("constants are annihilated by every symbol") {
  Space g = Space::periodic_grid(2, 16, 1.0);
  CxField c(g.size(), cd(3.25, 0.0));
  for (Symbol sym : {Symbol{SymbolId::FracLaplacian, 0.5}, Symbol{SymbolId::RieszPotential, 0.5}}) {
    CxField out = apply_scalar_symbol(g, c, sym);
    for (const cd& v : out) CHECK(std::abs(v) < 1e-13);
  }
  CxVectorField grad = apply_vector_symbol(g, c, Symbol{SymbolId::RieszGradient, 0.5});
  for (const CxField& comp : grad)
    for (const cd& v : comp) CHECK(std::abs(v) < 1e-13);
}

TEST_CASE("potential inverts the laplacian modulo constants") {
  Space g = Space::periodic_grid(2, 32, 1.0);
  Field ur = make_bandlimited_field(g, 99);
  CxField u = to_complex(ur);
  double a = 0.45;
  CxField lap = apply_scalar_symbol(g, u, Symbol{SymbolId::FracLaplacian, a});
  CxField back = apply_scalar_symbol(g, lap, Symbol{SymbolId::RieszPotential, a});
  double mean = field_mean(g, ur);
  CxField want(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) want[i] = cd(ur[i] - mean, 0.0);
  CHECK(rel_l2(g, back, want) < 1e-12);
}

TEST_CASE("plancherel and semigroup") {
  Space g = Space::periodic_grid(1, 128, 1.0);
  Field ur = make_bandlimited_field(g, 5);
  CxField u = to_complex(ur);
  double a = 0.5;

  // Plancherel: compare the physical-side norm against the multiplier form.
  CxField lap = apply_scalar_symbol(g, u, Symbol{SymbolId::FracLaplacian, a});
  CxField hat = u;
  fft_nd(hat, 1, 128, false);
  double spec = 0.0;
  for (int j = 0; j < 128; ++j) {
    int k = j <= 64 ? j : j - 128;
    double xi = kTwoPi * std::abs(k);
    spec += std::norm(hat[j]) * std::pow(xi == 0.0 ? 0.0 : xi, 2.0 * a);
  }
  spec = std::sqrt(spec * g.measure(0));
  CHECK(cx_norm2(g, lap) == doctest::Approx(spec).epsilon(1e-12));

  // Semigroup on mean-zero fields while a + b < 2.
  double b = 0.7;
  CxField two_step = apply_scalar_symbol(g, apply_scalar_symbol(g, u, {SymbolId::FracLaplacian, a}),
                                         {SymbolId::FracLaplacian, b});
  CxField one_step = apply_scalar_symbol(g, u, Symbol{SymbolId::FracLaplacian, a + b});
  CHECK(rel_l2(g, two_step, one_step) < 1e-12);
}

TEST_CASE("realness of the implemented symbols") {
  Space g = Space::periodic_grid(2, 32, 1.0);
  Field ur = make_bandlimited_field(g, 123);
  CxField u = to_complex(ur);
  double worst = 0.0, mi = 0.0;
  real_part(apply_scalar_symbol(g, u, Symbol{SymbolId::FracLaplacian, 0.5}), &mi);
  worst = std::max(worst, mi);
  real_part(apply_scalar_symbol(g, u, Symbol{SymbolId::RieszPotential, 0.5}), &mi);
  worst = std::max(worst, mi);
  for (const CxField& comp : apply_vector_symbol(g, u, Symbol{SymbolId::RieszGradient, 0.5})) {
    real_part(comp, &mi);
    worst = std::max(worst, mi);
  }
  for (const CxField& comp : apply_vector_symbol(g, u, Symbol{SymbolId::RieszTransform, 0.0})) {
    real_part(comp, &mi);
    worst = std::max(worst, mi);
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("self-adjointness and the transform adjoint pairing") {
  Space g = Space::periodic_grid(1, 64, 1.0);
  Field ur = make_bandlimited_field(g, 7);
  Field vr = make_bandlimited_field(g, 8);
  CxField u = to_complex(ur), v = to_complex(vr);
  double a = 0.5;

  auto inner = [&](const CxField& x, const CxField& y) {
    cd acc(0.0, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * std::conj(y[i]) * g.measure(i);
    return acc;
  };

  CxField lu = apply_scalar_symbol(g, u, Symbol{SymbolId::FracLaplacian, a});
  CxField lv = apply_scalar_symbol(g, v, Symbol{SymbolId::FracLaplacian, a});
  CHECK(std::abs(inner(lu, v) - inner(u, lv)) < 1e-12);

  // <R u, G> = <u, R* G> for vector fields G.
  CxVectorField ru = apply_vector_symbol(g, u, Symbol{SymbolId::RieszTransform, 0.0});
  CxVectorField gvec = {to_complex(make_bandlimited_field(g, 9))};
  CxField rstar_g = apply_adjoint_symbol(g, gvec, Symbol{SymbolId::RieszAdjoint, 0.0});
  cd lhs(0.0, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) lhs += ru[0][i] * std::conj(gvec[0][i]) * g.measure(i);
  cd rhs = inner(u, rstar_g);
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("identity suite on a 32x32 grid") {
  Space g = Space::periodic_grid(2, 32, 1.0);
  for (double a : {0.3, 0.5, 0.7}) {
    IdentityReport rep = identity_suite(g, a, 424242, 4);
    CHECK(rep.defect_gradient_vs_transform < 1e-10);
    CHECK(rep.defect_gradient_vs_potential < 1e-10);
    CHECK(rep.defect_rstar_r < 1e-10);
    CHECK(rep.rstar_r_sign == doctest::Approx(1.0));  // pinned for this convention
    CHECK(rep.potential_norm_ratio > 0.0);
  }
}

TEST_CASE("symbol dispatcher rejects bad shapes and spaces") {
  Space g = Space::periodic_grid(1, 32, 1.0);
  CxField u(g.size(), cd(1.0, 0.0));
  CxVectorField vec = {u};
  CHECK_THROWS(apply_symbol(g, FieldVariant{u}, Symbol{SymbolId::RieszAdjoint, 0.0}));
  CHECK_THROWS(apply_symbol(g, FieldVariant{vec}, Symbol{SymbolId::FracLaplacian, 0.5}));
  Space cloud = Space::point_cloud({{0.0}, {1.0}}, {1.0, 1.0}, euclidean_dist);
  CHECK_THROWS(apply_symbol(cloud, FieldVariant{u}, Symbol{SymbolId::FracLaplacian, 0.5}));
}

TEST_CASE("singular-integral quadrature matches the spectral operator") {
  // u = cos(x) on the 2pi torus: (-Lap)^{a/2} u = cos(x) exactly.
  Space g = Space::periodic_grid(1, 256, kTwoPi);
  double a = 0.5;
  Field u(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) u[i] = std::cos(g.coords(i)[0]);
  FracQuadrature quad(g, a, 100.0 * g.period());
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); i += 25) {
    double got = quad.evaluate(u, i);
    worst = std::max(worst, std::abs(got - u[i]));
  }
  CHECK(worst < 0.05);

  // Constants give exactly zero.
  Field c(g.size(), 4.0);
  CHECK(quad.evaluate(c, 3) == doctest::Approx(0.0));

  // Band-limited fields stay within 5% at sampled points.
  Field bl = make_bandlimited_field(g, 321);
  CxField spec = apply_scalar_symbol(g, to_complex(bl), Symbol{SymbolId::FracLaplacian, a});
  double scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) scale = std::max(scale, std::abs(spec[i].real()));
  for (int t = 0; t < 10; ++t) {
    std::size_t x = (g.size() * static_cast<std::size_t>(t)) / 10;
    CHECK(std::abs(quad.evaluate(bl, x) - spec[x].real()) / scale < 0.05);
  }

  CHECK_THROWS(FracQuadrature(g, a, 1.0 * g.spacing()));  // below 2 cells
}
