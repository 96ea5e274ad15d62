#include "rhtail/fracpde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rhtail/field.hpp"

namespace rhtail {

namespace {

void project_mean_zero(CxField& u) {
  cd mean(0.0, 0.0);
  for (const cd& v : u) mean += v;
  mean /= static_cast<double>(u.size());
  for (cd& v : u) v -= mean;
}

bool is_mean_zero(const CxField& u) {
  cd mean(0.0, 0.0);
  for (const cd& v : u) mean += v;
  mean /= static_cast<double>(u.size());
  return std::abs(mean) <= 1e-13;
}

cd dot(const Space& s, const CxField& x, const CxField& y) {
  cd acc(0.0, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(y[i]) * x[i] * s.measure(i);
  return acc;
}

CxVectorField matvec_pointwise(const Coefficients& coeffs, const CxVectorField& g) {
  int n = coeffs.dim;
  CxVectorField out(n, CxField(g[0].size(), cd(0.0, 0.0)));
  for (std::size_t p = 0; p < g[0].size(); ++p)
    for (int r = 0; r < n; ++r) {
      cd acc(0.0, 0.0);
      for (int c = 0; c < n; ++c) acc += coeffs.entry(p, r, c) * g[c][p];
      out[r][p] = acc;
    }
  return out;
}

bool is_hermitian(const Coefficients& coeffs, std::size_t points) {
  for (std::size_t p = 0; p < points; ++p)
    for (int r = 0; r < coeffs.dim; ++r)
      for (int c = 0; c < coeffs.dim; ++c)
        if (std::abs(coeffs.entry(p, r, c) - std::conj(coeffs.entry(p, c, r))) > 1e-13)
          return false;
  return true;
}

CxField precondition(const Space& s, const CxField& r, double a) {
  return apply_scalar_symbol(s, r, Symbol{SymbolId::RieszPotential, 2.0 * a});
}

}  // namespace

Coefficients make_scalar_coefficients(const Space& s, cd value, double lambda) {
  Coefficients c;
  c.dim = s.dim();
  c.lambda = lambda;
  c.a.assign(s.size() * c.dim * c.dim, cd(0.0, 0.0));
  for (std::size_t p = 0; p < s.size(); ++p)
    for (int d = 0; d < c.dim; ++d) c.a[(p * c.dim + d) * c.dim + d] = value;
  return c;
}

Coefficients make_identity_coefficients(const Space& s) {
  return make_scalar_coefficients(s, cd(1.0, 0.0), 1.0);
}

Coefficients make_checkerboard_coefficients(const Space& s, int block_cells, double c1, double c2,
                                            double lambda) {
  if (!s.is_grid()) throw std::invalid_argument("checkerboard coefficients need a grid");
  Coefficients c;
  c.dim = s.dim();
  c.lambda = lambda;
  c.a.assign(s.size() * c.dim * c.dim, cd(0.0, 0.0));
  for (std::size_t p = 0; p < s.size(); ++p) {
    auto ij = s.grid_coords_int(p);
    int parity = (ij[0] / block_cells + ij[1] / block_cells) % 2;
    double v = parity == 0 ? c1 : c2;
    for (int d = 0; d < c.dim; ++d) c.a[(p * c.dim + d) * c.dim + d] = cd(v, 0.0);
  }
  return c;
}

void check_ellipticity(const Space& s, const Coefficients& coeffs, std::uint64_t seed,
                       int n_vectors) {
  if (!(coeffs.lambda > 0.0 && coeffs.lambda <= 1.0))
    throw std::invalid_argument("lambda must lie in (0,1]");
  int n = coeffs.dim;
  std::vector<std::vector<cd>> probes;
  for (int d = 0; d < n; ++d) {
    std::vector<cd> e(n, cd(0.0, 0.0));
    e[d] = cd(1.0, 0.0);
    probes.push_back(e);
  }
  Rng rng(seed);
  for (int t = 0; t < n_vectors; ++t) {
    std::vector<cd> xi(n);
    double norm = 0.0;
    for (int d = 0; d < n; ++d) {
      xi[d] = cd(rng.normal(), rng.normal());
      norm += std::norm(xi[d]);
    }
    norm = std::sqrt(norm);
    for (int d = 0; d < n; ++d) xi[d] /= norm;
    probes.push_back(xi);
  }
  double lo = coeffs.lambda * (1.0 - 1e-10);
  double hi = (1.0 / coeffs.lambda) * (1.0 + 1e-10);
  for (std::size_t p = 0; p < s.size(); ++p) {
    for (const auto& xi : probes) {
      cd quad(0.0, 0.0);
      for (int r = 0; r < n; ++r) {
        cd row(0.0, 0.0);
        for (int c = 0; c < n; ++c) row += coeffs.entry(p, r, c) * xi[c];
        quad += row * std::conj(xi[r]);
      }
      double re = quad.real();
      if (re < lo || re > hi)
        throw std::runtime_error("ellipticity violated at point " + std::to_string(p));
    }
  }
}

CxField apply_operator(const Space& s, const Coefficients& coeffs, double a, const CxField& u,
                       bool* projected) {
  CxField u0 = u;
  bool proj = !is_mean_zero(u0);
  if (proj) project_mean_zero(u0);
  if (projected) *projected = proj;
  CxVectorField grad = apply_vector_symbol(s, u0, Symbol{SymbolId::RieszGradient, a});
  CxVectorField flux = matvec_pointwise(coeffs, grad);
  return riesz_gradient_adjoint(s, flux, a);
}

CxField assemble_rhs(const Space& s, const CxVectorField& big_f, const CxField& small_f, double a,
                     bool* projected, double* mean_subtracted) {
  CxField rhs(s.size(), cd(0.0, 0.0));
  if (!big_f.empty()) rhs = riesz_gradient_adjoint(s, big_f, a);
  bool proj = false;
  double sub = 0.0;
  if (!small_f.empty()) {
    cd mean(0.0, 0.0);
    for (const cd& v : small_f) mean += v;
    mean /= static_cast<double>(small_f.size());
    if (std::abs(mean) > 1e-14) proj = true;
    sub = std::abs(mean);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += small_f[i] - mean;
  }
  if (projected) *projected = proj;
  if (mean_subtracted) *mean_subtracted = sub;
  return rhs;
}

SolveResult solve(const PDEProblem& problem) {
  const Space& s = *problem.space;
  if (!(problem.tol > 0.0)) throw std::invalid_argument("residual tolerance must be positive");
  if (!(problem.a > 0.0 && problem.a < 1.0))
    throw std::invalid_argument("fractional order must be in (0,1)");
  check_ellipticity(s, problem.coeffs);

  SolveResult res;
  CxField rhs = assemble_rhs(s, problem.big_f, problem.small_f, problem.a, &res.rhs_projected,
                             &res.f_mean_subtracted);

  auto apply_l = [&](const CxField& v) { return apply_operator(s, problem.coeffs, problem.a, v); };
  auto res_norm = [&](const CxField& r) { return cx_norm2(s, r); };

  CxField u(s.size(), cd(0.0, 0.0));
  CxField r = rhs;  // residual rhs - L*0
  double rn = res_norm(r);
  res.residual_history.push_back(rn);

  bool hermitian = is_hermitian(problem.coeffs, s.size());
  res.method = hermitian ? "pcg" : "richardson";

  if (hermitian) {
    CxField z = precondition(s, r, problem.a);
    CxField p = z;
    cd rz = dot(s, r, z);
    int it = 0;
    while (rn > problem.tol && it < problem.max_iters) {
      CxField lp = apply_l(p);
      cd plp = dot(s, lp, p);
      if (std::abs(plp) == 0.0) break;
      cd alpha = rz / plp;
      for (std::size_t i = 0; i < u.size(); ++i) u[i] += alpha * p[i];
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= alpha * lp[i];
      rn = res_norm(r);
      res.residual_history.push_back(rn);
      ++it;
      if (rn <= problem.tol) break;
      CxField z_next = precondition(s, r, problem.a);
      cd rz_next = dot(s, r, z_next);
      cd beta = rz_next / rz;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = z_next[i] + beta * p[i];
      z = std::move(z_next);
      rz = rz_next;
    }
    res.iterations = it;
  } else {
    double tau = problem.coeffs.lambda;
    int it = 0;
    while (rn > problem.tol && it < problem.max_iters) {
      CxField pz = precondition(s, r, problem.a);
      for (std::size_t i = 0; i < u.size(); ++i) u[i] += tau * pz[i];
      CxField lu = apply_l(u);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - lu[i];
      rn = res_norm(r);
      res.residual_history.push_back(rn);
      ++it;
    }
    res.iterations = it;
  }

  project_mean_zero(u);
  res.u = std::move(u);
  // Residual recomputed from scratch against the assembled right-hand side.
  CxField lu = apply_l(res.u);
  for (std::size_t i = 0; i < lu.size(); ++i) lu[i] = rhs[i] - lu[i];
  res.residual = res_norm(lu);
  res.converged = res.residual <= problem.tol;
  return res;
}

CxField oracle_solve_identity(const Space& s, const CxVectorField& big_f, const CxField& small_f,
                              double a) {
  CxField rhs = assemble_rhs(s, big_f, small_f, a);
  CxField hat = rhs;
  fft_nd(hat, s.dim(), s.cells_per_side(), false);
  const double two_pi = 6.283185307179586476925286766559;
  double scale = two_pi / s.period();
  int m = s.cells_per_side();
  auto freq = [m](int j) { return j <= m / 2 ? j : j - m; };
  if (s.dim() == 1) {
    for (int j = 0; j < m; ++j) {
      double xi = scale * freq(j);
      hat[j] = xi == 0.0 ? cd(0.0, 0.0) : hat[j] / std::pow(std::abs(xi), 2.0 * a);
    }
  } else {
    for (int jy = 0; jy < m; ++jy)
      for (int jx = 0; jx < m; ++jx) {
        double xix = scale * freq(jx), xiy = scale * freq(jy);
        double xin = std::sqrt(xix * xix + xiy * xiy);
        std::size_t i = static_cast<std::size_t>(jy) * m + jx;
        hat[i] = xin == 0.0 ? cd(0.0, 0.0) : hat[i] / std::pow(xin, 2.0 * a);
      }
  }
  fft_nd(hat, s.dim(), s.cells_per_side(), true);
  return hat;
}

CxField dense_solve_oracle(const Space& s, const Coefficients& coeffs, double a,
                           const CxField& rhs) {
  const std::size_t n = s.size();
  if (n > 1024) throw std::invalid_argument("dense oracle limited to 1024 points");
  // Assemble L column by column, then pin the mean with a rank-one shift so
  // the system is nonsingular on mean-zero data.
  std::vector<cd> mat(n * n, cd(0.0, 0.0));
  for (std::size_t c = 0; c < n; ++c) {
    CxField e(n, cd(0.0, 0.0));
    e[c] = cd(1.0, 0.0);
    CxField col = apply_operator(s, coeffs, a, e);
    for (std::size_t r = 0; r < n; ++r) mat[r * n + c] = col[r];
  }
  double shift = 1.0 / static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) mat[r * n + c] += cd(shift, 0.0);

  CxField b = rhs;
  project_mean_zero(b);

  // Gaussian elimination with partial pivoting.
  std::vector<std::size_t> piv(n);
  for (std::size_t i = 0; i < n; ++i) piv[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    double best_mag = std::abs(mat[k * n + k]);
    for (std::size_t r = k + 1; r < n; ++r) {
      double mag = std::abs(mat[r * n + k]);
      if (mag > best_mag) {
        best = r;
        best_mag = mag;
      }
    }
    if (best_mag == 0.0) throw std::runtime_error("dense oracle: singular matrix");
    if (best != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(mat[k * n + c], mat[best * n + c]);
      std::swap(b[k], b[best]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      cd factor = mat[r * n + k] / mat[k * n + k];
      if (factor == cd(0.0, 0.0)) continue;
      mat[r * n + k] = cd(0.0, 0.0);
      for (std::size_t c = k + 1; c < n; ++c) mat[r * n + c] -= factor * mat[k * n + c];
      b[r] -= factor * b[k];
    }
  }
  CxField x(n, cd(0.0, 0.0));
  for (std::size_t ri = n; ri-- > 0;) {
    cd acc = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) acc -= mat[ri * n + c] * x[c];
    x[ri] = acc / mat[ri * n + ri];
  }
  project_mean_zero(x);
  return x;
}

SolutionRHReport solution_rh_report(const PDEProblem& problem, const SolveResult& result,
                                    double rho, const std::vector<Ball>& family,
                                    const std::vector<double>& p_grid, double c_max) {
  const Space& s = *problem.space;
  int n = s.dim();
  double a = problem.a;

  SolutionRHReport rep;
  rep.two_star = 2.0 * n / (n + 2.0 * a);
  rep.two_star_one = 2.0 * n / (n + 2.0);
  rep.rho_warning = rho <= rep.two_star_one || rho >= 2.0;

  CxVectorField da = apply_vector_symbol(s, result.u, Symbol{SymbolId::RieszGradient, a});
  CxField lap = apply_scalar_symbol(s, result.u, Symbol{SymbolId::FracLaplacian, a});

  Field da_mag(s.size(), 0.0), lap_mag(s.size(), 0.0), v(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    double g2 = 0.0;
    for (int c = 0; c < n; ++c) g2 += std::norm(da[c][i]);
    da_mag[i] = std::sqrt(g2);
    lap_mag[i] = std::abs(lap[i]);
    v[i] = da_mag[i] + lap_mag[i];
  }
  Field f_mag(s.size(), 0.0);
  if (!problem.big_f.empty())
    for (std::size_t i = 0; i < s.size(); ++i) {
      double g2 = 0.0;
      for (int c = 0; c < n; ++c) g2 += std::norm(problem.big_f[c][i]);
      f_mag[i] = std::sqrt(g2);
    }
  Field small_mag(s.size(), 0.0);
  if (!problem.small_f.empty())
    for (std::size_t i = 0; i < s.size(); ++i) small_mag[i] = std::abs(problem.small_f[i]);

  TailWeights tw_one = TailWeights::geometric(1.0, 0.5, 2.0);
  TailWeights tw_slow = TailWeights::geometric(1.0, std::pow(2.0, a - 1.0), 2.0);

  Field v2 = field_pow(v, 2.0);
  Field da_rho = field_pow(da_mag, rho);
  Field f2 = field_pow(f_mag, 2.0);
  Field f_small_2star = field_pow(small_mag, rep.two_star);

  for (const Ball& b : family) {
    RHRow row;
    row.ball = b;
    row.lhs = std::sqrt(ball_average(s, v2, b));
    double rhs = std::pow(ball_average(s, da_rho, dilate(b, 4.0)), 1.0 / rho);
    rhs += ball_integral(s, lap_mag, dilate(b, 2.0));  // integral, not an average
    rhs += std::sqrt(ball_average(s, f2, dilate(b, 4.0)));
    rhs += tail_functional(s, da_mag, b, tw_one);
    rhs += std::pow(b.radius, a) *
           std::pow(tail_functional(s, f_small_2star, b, tw_slow), 1.0 / rep.two_star);
    row.tail_u = rhs;
    row.ratio = rhs > 0.0 ? row.lhs / rhs : 0.0;
    rep.combined_rows.push_back(row);
    rep.combined_best = std::max(rep.combined_best, row.ratio);
  }

  RHInstance inst;
  inst.space = &s;
  inst.u = v;
  inst.f = f_mag;
  inst.h = small_mag;
  inst.q = 2.0;
  inst.s = rep.two_star;
  inst.beta = a;
  inst.tw = tw_slow;
  inst.variant = RHVariant::RadiusPower;
  rep.gain = estimate_gain(inst, family, p_grid, c_max);
  rep.eps0_found = rep.gain.p_found;
  rep.eps0 = rep.gain.p_found ? rep.gain.p_hat - 2.0 : 0.0;
  return rep;
}

}  // namespace rhtail
