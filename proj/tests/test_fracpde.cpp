#include <cmath>

#include "doctest.h"
#include "rhtail/field.hpp"
#include "rhtail/fracpde.hpp"

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

TEST_CASE("ellipticity check accepts checkerboards and rejects violations") {
  Space g = Space::periodic_grid(2, 16, 1.0);
  Coefficients ok = make_checkerboard_coefficients(g, 4, 0.2, 5.0, 0.2);
  CHECK_NOTHROW(check_ellipticity(g, ok));

  Coefficients bad = make_checkerboard_coefficients(g, 4, 0.05, 5.0, 0.2);  // below lambda
  CHECK_THROWS(check_ellipticity(g, bad));
}

TEST_CASE("operator with identity coefficients is the 2a-laplacian") {
  Space g = Space::periodic_grid(2, 32, 1.0);
  double a = 0.5;
  CxField u = to_complex(make_bandlimited_field(g, 4));
  CxField via_op = apply_operator(g, make_identity_coefficients(g), a, u);
  CxField direct = apply_scalar_symbol(g, u, Symbol{SymbolId::FracLaplacian, 2.0 * a});
  CHECK(rel_l2(g, via_op, direct) < 1e-12);

  CxField c(g.size(), cd(2.0, 0.0));
  bool projected = false;
  CxField out = apply_operator(g, make_identity_coefficients(g), a, c, &projected);
  CHECK(projected);
  for (const cd& v : out) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("discrete weak identity holds for the assembled operator") {
  Space g = Space::periodic_grid(2, 16, 1.0);
  double a = 0.4;
  Coefficients coeffs = make_checkerboard_coefficients(g, 4, 0.3, 2.5, 0.3);
  CxField u = to_complex(make_bandlimited_field(g, 21));
  CxField lu = apply_operator(g, coeffs, a, u);

  for (int t = 0; t < 5; ++t) {
    CxField phi = to_complex(make_bandlimited_field(g, 50 + t));
    CxVectorField du = apply_vector_symbol(g, u, Symbol{SymbolId::RieszGradient, a});
    CxVectorField dphi = apply_vector_symbol(g, phi, Symbol{SymbolId::RieszGradient, a});
    cd weak(0.0, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
      for (int r = 0; r < 2; ++r) {
        cd flux(0.0, 0.0);
        for (int c = 0; c < 2; ++c) flux += coeffs.entry(i, r, c) * du[c][i];
        weak += flux * std::conj(dphi[r][i]) * g.measure(i);
      }
    cd strong(0.0, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) strong += lu[i] * std::conj(phi[i]) * g.measure(i);
    CHECK(std::abs(weak - strong) < 1e-10);
  }
}

TEST_CASE("single-mode solve and coefficient linearity") {
  Space g = Space::periodic_grid(2, 32, 1.0);
  double a = 0.5;

  // f = cos(2 pi x): with A = I the solution is cos(2 pi x)/(2 pi)^{2a}.
  Field f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::cos(kTwoPi * g.coords(i)[0]);
  PDEProblem prob;
  prob.space = &g;
  prob.coeffs = make_identity_coefficients(g);
  prob.small_f = to_complex(f);
  prob.a = a;
  prob.tol = 1e-11;
  SolveResult sol = solve(prob);
  CHECK(sol.converged);
  CxField want(g.size());
  double factor = std::pow(kTwoPi, -2.0 * a);
  for (std::size_t i = 0; i < g.size(); ++i) want[i] = cd(factor * f[i], 0.0);
  CHECK(rel_l2(g, sol.u, want) < 1e-8);

  // A = c I scales the solution by 1/c.
  PDEProblem scaled = prob;
  scaled.coeffs = make_scalar_coefficients(g, cd(2.0, 0.0), 0.5);
  SolveResult sol2 = solve(scaled);
  CxField half = sol.u;
  for (cd& v : half) v *= 0.5;
  CHECK(rel_l2(g, sol2.u, half) < 1e-8);
}

TEST_CASE("oracle solve identity closed forms") {
  Space g = Space::periodic_grid(2, 32, 1.0);
  double a = 0.5;
  // Single-mode scalar datum.
  Field f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::cos(kTwoPi * g.coords(i)[1]);
  CxField u = oracle_solve_identity(g, {}, to_complex(f), a);
  double factor = std::pow(kTwoPi, -2.0 * a);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(u[i] - cd(factor * f[i], 0.0)));
  CHECK(worst < 1e-12);

  // Cross-validation against the iterative solver on random band-limited data.
  PDEProblem prob;
  prob.space = &g;
  prob.coeffs = make_identity_coefficients(g);
  prob.big_f = {to_complex(make_bandlimited_field(g, 61)),
                to_complex(make_bandlimited_field(g, 62))};
  prob.small_f = to_complex(make_bandlimited_field(g, 63));
  prob.a = a;
  prob.tol = 1e-11;
  SolveResult sol = solve(prob);
  CxField oracle = oracle_solve_identity(g, prob.big_f, prob.small_f, a);
  CHECK(rel_l2(g, sol.u, oracle) < 1e-8);
}

TEST_CASE("checkerboard solve against the dense oracle") {
  Space g = Space::periodic_grid(2, 8, 1.0);
  double a = 0.5;
  Coefficients coeffs = make_checkerboard_coefficients(g, 2, 0.2, 5.0, 0.2);

  // Single-mode input through the operator, checked against dense assembly.
  CxField mode(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    mode[i] = cd(std::cos(kTwoPi * g.coords(i)[0]), 0.0);
  CxField lu = apply_operator(g, coeffs, a, mode);
  // Dense assembly: columns of L from unit vectors.
  CxField dense_lu(g.size(), cd(0.0, 0.0));
  for (std::size_t c = 0; c < g.size(); ++c) {
    CxField e(g.size(), cd(0.0, 0.0));
    e[c] = cd(1.0, 0.0);
    CxField col = apply_operator(g, coeffs, a, e);
    cd coeff = mode[c] - cd(0.0, 0.0);
    for (std::size_t r = 0; r < g.size(); ++r) dense_lu[r] += col[r] * coeff;
  }
  CHECK(rel_l2(g, lu, dense_lu) < 1e-10);

  PDEProblem prob;
  prob.space = &g;
  prob.coeffs = coeffs;
  prob.big_f = {to_complex(make_bandlimited_field(g, 71)),
                to_complex(make_bandlimited_field(g, 72))};
  prob.small_f = to_complex(make_bandlimited_field(g, 73));
  prob.a = a;
  prob.tol = 1e-12;
  SolveResult sol = solve(prob);
  CHECK(sol.converged);
  CHECK(sol.method == "pcg");
  CxField rhs = assemble_rhs(g, prob.big_f, prob.small_f, a);
  CxField dense = dense_solve_oracle(g, coeffs, a, rhs);
  CHECK(rel_l2(g, sol.u, dense) < 1e-8);
}

TEST_CASE("richardson fallback for non-hermitian coefficients") {
  Space g = Space::periodic_grid(2, 16, 1.0);
  double a = 0.5;
  Coefficients coeffs = make_identity_coefficients(g);
  // Small skew perturbation keeps ellipticity but breaks hermitian symmetry.
  for (std::size_t p = 0; p < g.size(); ++p) {
    coeffs.a[(p * 2 + 0) * 2 + 1] += cd(0.1, 0.0);
    coeffs.a[(p * 2 + 1) * 2 + 0] -= cd(0.1, 0.0);
  }
  coeffs.lambda = 0.5;
  PDEProblem prob;
  prob.space = &g;
  prob.coeffs = coeffs;
  prob.small_f = to_complex(make_bandlimited_field(g, 81));
  prob.a = a;
  prob.tol = 1e-9;
  prob.max_iters = 20000;
  SolveResult sol = solve(prob);
  CHECK(sol.method == "richardson");
  CHECK(sol.converged);
  CHECK(sol.residual <= prob.tol);
}

TEST_CASE("weak-form testing and the energy bound for a computed solution") {
  Space g = Space::periodic_grid(2, 32, 1.0);
  double a = 0.5;
  PDEProblem prob;
  prob.space = &g;
  prob.coeffs = make_checkerboard_coefficients(g, 8, 0.2, 5.0, 0.2);
  prob.big_f = {to_complex(make_bandlimited_field(g, 91)),
                to_complex(make_bandlimited_field(g, 92))};
  prob.small_f = to_complex(make_bandlimited_field(g, 93));
  prob.a = a;
  prob.tol = 1e-10;
  SolveResult sol = solve(prob);
  REQUIRE(sol.converged);

  // Projected data actually used by the solver.
  CxField f0 = prob.small_f;
  cd mean(0.0, 0.0);
  for (const cd& v : f0) mean += v;
  mean /= static_cast<double>(f0.size());
  for (cd& v : f0) v -= mean;

  CxVectorField du = apply_vector_symbol(g, sol.u, Symbol{SymbolId::RieszGradient, a});
  for (int t = 0; t < 20; ++t) {
    CxField phi = to_complex(make_bandlimited_field(g, 100 + t));
    CxVectorField dphi = apply_vector_symbol(g, phi, Symbol{SymbolId::RieszGradient, a});
    cd lhs(0.0, 0.0), rhs(0.0, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (int r = 0; r < 2; ++r) {
        cd flux(0.0, 0.0);
        for (int c = 0; c < 2; ++c) flux += prob.coeffs.entry(i, r, c) * du[c][i];
        lhs += flux * std::conj(dphi[r][i]) * g.measure(i);
        rhs += prob.big_f[r][i] * std::conj(dphi[r][i]) * g.measure(i);
      }
      rhs += f0[i] * std::conj(phi[i]) * g.measure(i);
    }
    CxField lap_phi = apply_scalar_symbol(g, phi, Symbol{SymbolId::FracLaplacian, a});
    double h_norm = std::sqrt(std::pow(cx_norm2(g, phi), 2.0) + std::pow(cx_norm2(g, lap_phi), 2.0));
    CHECK(std::abs(lhs - rhs) <= 10.0 * prob.tol * h_norm + 1e-12);
  }

  // Energy bound lambda |D^a u|^2 <= |F| |D^a u| + |f| |u| up to tolerance.
  double du_norm = cx_norm2(g, du);
  double f_norm = cx_norm2(g, prob.big_f);
  double u_norm = cx_norm2(g, sol.u);
  double f0_norm = cx_norm2(g, f0);
  CHECK(prob.coeffs.lambda * du_norm * du_norm <=
        f_norm * du_norm + f0_norm * u_norm + 100.0 * prob.tol);
}

TEST_CASE("solver is linear in the data") {
  Space g = Space::periodic_grid(2, 16, 1.0);
  PDEProblem p1, p2;
  p1.space = p2.space = &g;
  p1.coeffs = p2.coeffs = make_checkerboard_coefficients(g, 4, 0.2, 5.0, 0.2);
  p1.a = p2.a = 0.5;
  p1.tol = p2.tol = 1e-11;
  p1.small_f = to_complex(make_bandlimited_field(g, 11));
  p2.small_f = to_complex(make_bandlimited_field(g, 12));
  SolveResult s1 = solve(p1), s2 = solve(p2);

  PDEProblem sum = p1;
  sum.small_f.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) sum.small_f[i] = p1.small_f[i] + p2.small_f[i];
  SolveResult ss = solve(sum);
  CxField expect(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) expect[i] = s1.u[i] + s2.u[i];
  CHECK(rel_l2(g, ss.u, expect) < 1e-7);
}

TEST_CASE("resolution stability of the gradient norm") {
  double a = 0.5;
  double norms[2];
  int idx = 0;
  for (int m : {32, 64}) {
    Space g = Space::periodic_grid(2, m, 1.0);
    PDEProblem prob;
    prob.space = &g;
    prob.coeffs = make_checkerboard_coefficients(g, m / 8, 0.2, 5.0, 0.2);
    // The same four analytic modes at every resolution.
    Field f(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto c = g.coords(i);
      f[i] = std::cos(kTwoPi * c[0]) + 0.5 * std::sin(kTwoPi * (c[0] + 2.0 * c[1])) +
             0.25 * std::cos(kTwoPi * (3.0 * c[0] - c[1]));
    }
    prob.small_f = to_complex(f);
    prob.a = a;
    prob.tol = 1e-10;
    SolveResult sol = solve(prob);
    REQUIRE(sol.converged);
    CxVectorField du = apply_vector_symbol(g, sol.u, Symbol{SymbolId::RieszGradient, a});
    norms[idx++] = cx_norm2(g, du);
  }
  CHECK(std::abs(norms[1] - norms[0]) / norms[0] < 0.05);

  // Band-limited data with identity coefficients is resolved exactly.
  double exact[2];
  idx = 0;
  for (int m : {32, 64}) {
    Space g = Space::periodic_grid(2, m, 1.0);
    PDEProblem prob;
    prob.space = &g;
    prob.coeffs = make_identity_coefficients(g);
    Field f(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto c = g.coords(i);
      f[i] = std::cos(kTwoPi * c[0]) - 2.0 * std::sin(kTwoPi * (c[1] + c[0]));
    }
    prob.small_f = to_complex(f);
    prob.a = a;
    prob.tol = 1e-12;
    SolveResult sol = solve(prob);
    CxVectorField du = apply_vector_symbol(g, sol.u, Symbol{SymbolId::RieszGradient, a});
    exact[idx++] = cx_norm2(g, du);
  }
  CHECK(std::abs(exact[1] - exact[0]) / exact[0] < 1e-10);
}

TEST_CASE("solution reverse Holder report") {
  Space g = Space::periodic_grid(2, 32, 1.0);
  PDEProblem prob;
  prob.space = &g;
  prob.coeffs = make_checkerboard_coefficients(g, 8, 0.2, 5.0, 0.2);
  prob.big_f = {to_complex(make_bandlimited_field(g, 31)),
                to_complex(make_bandlimited_field(g, 32))};
  prob.small_f = to_complex(make_bandlimited_field(g, 33));
  prob.a = 0.5;
  prob.tol = 1e-9;
  SolveResult sol = solve(prob);
  REQUIRE(sol.converged);

  auto family = make_ball_family(g, 16, 2.0);
  SolutionRHReport rep = solution_rh_report(prob, sol, 1.5, family, {2.1, 2.3, 2.5}, 50.0);
  CHECK(rep.two_star == doctest::Approx(4.0 / 3.0));
  CHECK(rep.two_star_one == doctest::Approx(1.0));
  CHECK(std::isfinite(rep.combined_best));
  CHECK(rep.combined_best > 0.0);
  CHECK(rep.eps0_found);
  CHECK(rep.eps0 > 0.0);

  // Zero data: everything is identically zero and the constants are zero.
  PDEProblem zero = prob;
  zero.big_f.clear();
  zero.small_f.assign(g.size(), cd(0.0, 0.0));
  SolveResult zsol = solve(zero);
  SolutionRHReport zrep = solution_rh_report(zero, zsol, 1.5, family, {2.1}, 50.0);
  CHECK(zrep.combined_best == doctest::Approx(0.0));
}
