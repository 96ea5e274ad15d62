#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rhtail/fracops.hpp"
#include "rhtail/gehring.hpp"
#include "rhtail/space.hpp"

namespace rhtail {

/// Measurable complex coefficients A(x) with two-sided ellipticity
///   lambda |xi|^2 <= Re(A(x) xi . conj(xi)) <= lambda^-1 |xi|^2.
struct Coefficients {
  int dim = 1;
  std::vector<cd> a;  // size * dim * dim, row-major blocks per point
  double lambda = 1.0;

  cd entry(std::size_t point, int row, int col) const {
    return a[(point * dim + row) * dim + col];
  }
};

Coefficients make_scalar_coefficients(const Space& s, cd value, double lambda);
Coefficients make_identity_coefficients(const Space& s);
/// Checkerboard of scalar blocks c1*I / c2*I with block_cells cells per side.
Coefficients make_checkerboard_coefficients(const Space& s, int block_cells, double c1, double c2,
                                            double lambda);

/// Seeded unit-vector ellipticity check; throws on violation.
void check_ellipticity(const Space& s, const Coefficients& coeffs, std::uint64_t seed = 11,
                       int n_vectors = 24);

struct PDEProblem {
  const Space* space = nullptr;
  Coefficients coeffs;
  CxVectorField big_f;  // vector datum F
  CxField small_f;      // scalar datum f (mean-projected on assembly)
  double a = 0.5;       // fractional order in (0,1)
  double tol = 1e-10;   // residual tolerance |Lu - rhs|_2
  int max_iters = 10000;
};

struct SolveResult {
  CxField u;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
  bool converged = false;
  bool rhs_projected = false;
  double f_mean_subtracted = 0.0;
  std::string method;  // "pcg" or "richardson"
};

/// (D^a)^* (A D^a u); mean-zero in and out. Non-mean-zero input is projected
/// and flagged through *projected.
CxField apply_operator(const Space& s, const Coefficients& coeffs, double a, const CxField& u,
                       bool* projected = nullptr);

/// Iterates on the mean-zero subspace with the Riesz-potential preconditioner
/// |xi|^(-2a). Hermitian coefficients get conjugate gradients in the inner
/// product induced by the preconditioner; otherwise damped Richardson with
/// step lambda.
SolveResult solve(const PDEProblem& problem);

/// Closed form for A = I: u_hat = rhs_hat / |xi|^(2a).
CxField oracle_solve_identity(const Space& s, const CxVectorField& big_f, const CxField& small_f,
                              double a);

/// Dense direct solve (Gaussian elimination, mean pinned by a rank-one
/// shift); intended for small grids as an independent oracle.
CxField dense_solve_oracle(const Space& s, const Coefficients& coeffs, double a,
                           const CxField& rhs);

CxField assemble_rhs(const Space& s, const CxVectorField& big_f, const CxField& small_f, double a,
                     bool* projected = nullptr, double* mean_subtracted = nullptr);

struct SolutionRHReport {
  std::vector<RHRow> combined_rows;  // per-ball combined-estimate constants
  double combined_best = 0.0;
  bool integral_term_scale_flag = true;  // the |(-Lap)^{a/2}u| piece enters unnormalized
  bool rho_warning = false;              // rho at or below 2n/(n+2)
  double two_star = 0.0;                 // 2n/(n+2a)
  double two_star_one = 0.0;             // 2n/(n+2)
  RHReport gain;                         // estimate_gain on v with q = 2
  double eps0 = 0.0;
  bool eps0_found = false;
};

/// Per-ball reverse Holder data for v = |D^a u| + |(-Lap)^{a/2} u| and the
/// measured integrability gain eps0 with exponent 2 + eps0.
SolutionRHReport solution_rh_report(const PDEProblem& problem, const SolveResult& result,
                                    double rho, const std::vector<Ball>& family,
                                    const std::vector<double>& p_grid, double c_max);

}  // namespace rhtail
