#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "rhtail/fft.hpp"
#include "rhtail/space.hpp"

namespace rhtail {

using CxField = std::vector<cd>;
using CxVectorField = std::vector<CxField>;  // one entry per coordinate

enum class SymbolId {
  RieszGradient,   // i xi / |xi|^(1-a), vector-valued
  FracLaplacian,   // |xi|^a
  RieszPotential,  // |xi|^(-s)
  RieszTransform,  // i xi / |xi|, vector-valued
  RieszAdjoint,    // -i xi^T / |xi|, consumes vector fields
};

/// Fourier multiplier descriptor. `order` is the fractional order a (or s for
/// the potential); ignored by the transform and its adjoint. Every symbol
/// takes the value 0 at xi = 0, so all operators annihilate constants and
/// produce mean-zero output.
struct Symbol {
  SymbolId id;
  double order = 0.0;
};

CxField to_complex(const Field& u);
Field real_part(const CxField& u, double* max_imag = nullptr);
double cx_norm2(const Space& s, const CxField& u);
double cx_norm2(const Space& s, const CxVectorField& u);

CxField apply_scalar_symbol(const Space& s, const CxField& u, const Symbol& sym);
CxVectorField apply_vector_symbol(const Space& s, const CxField& u, const Symbol& sym);
CxField apply_adjoint_symbol(const Space& s, const CxVectorField& g, const Symbol& sym);

/// Spectral coordinate gradient, multiplier i xi (used for grad I_{1-a}).
CxVectorField spectral_gradient(const Space& s, const CxField& u);

/// Adjoint of the Riesz fractional gradient, multiplier -i xi^T/|xi|^(1-a).
CxField riesz_gradient_adjoint(const Space& s, const CxVectorField& g, double a);

using FieldVariant = std::variant<CxField, CxVectorField>;

/// Single dispatcher matching the operator table; throws on a non-grid space
/// and on RieszAdjoint applied to a scalar field.
FieldVariant apply_symbol(const Space& s, const FieldVariant& u, const Symbol& sym);

struct IdentityReport {
  double a = 0.0;
  double defect_gradient_vs_transform = 0.0;  // D^a u vs R (-Lap)^{a/2} u
  double defect_gradient_vs_potential = 0.0;  // D^a u vs grad I_{1-a} u
  double rstar_r_sign = 0.0;                  // sign with R* R = sign * id on mean-zero
  double defect_rstar_r = 0.0;
  double potential_norm_ratio = 0.0;          // |I_s u|_2 / |u|_2 sanity
};

/// Relative L2 defects of the operator identities on seeded band-limited
/// fields. The R*R sign is measured and reported.
IdentityReport identity_suite(const Space& s, double a, std::uint64_t seed, int n_fields = 10);

/// Direct singular-integral evaluation of (-Lap)^{a/2} on a periodic grid.
/// Sums (u(x)-u(y)) |x-y|^(-n-a) over the periodized lattice out to
/// truncation_radius (a length, typically many periods), adds a local Taylor
/// correction for the singular cell, and scales by a constant calibrated once
/// against the spectral operator on the lowest mode.
class FracQuadrature {
 public:
  FracQuadrature(const Space& s, double a, double truncation_radius);

  double evaluate(const Field& u, std::size_t x) const;
  double calibration() const { return calibration_; }

 private:
  double raw_sum(const Field& u, std::size_t x) const;

  const Space* space_;
  double a_;
  double truncation_;
  double calibration_ = 1.0;
};

}  // namespace rhtail
