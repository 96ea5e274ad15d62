#include "rhtail/fracops.hpp"

#include <cmath>
#include <stdexcept>

#include "rhtail/field.hpp"

namespace rhtail {

namespace {

const double kTwoPi = 6.283185307179586476925286766559;

void require_grid(const Space& s) {
  if (!s.is_grid()) throw std::invalid_argument("spectral operators need a periodic grid");
}

int freq_of(int j, int m) { return j <= m / 2 ? j : j - m; }

// Scalar multiplier value for the radial part of each symbol; 0 at xi = 0.
double radial_multiplier(SymbolId id, double order, double xi_norm) {
  if (xi_norm == 0.0) return 0.0;
  switch (id) {
    case SymbolId::FracLaplacian:
      return std::pow(xi_norm, order);
    case SymbolId::RieszPotential:
      return std::pow(xi_norm, -order);
    case SymbolId::RieszGradient:
      return std::pow(xi_norm, order - 1.0);  // times i xi_j
    case SymbolId::RieszTransform:
    case SymbolId::RieszAdjoint:
      return 1.0 / xi_norm;  // times +/- i xi_j
  }
  return 0.0;
}

struct FreqIter {
  const Space& s;
  int m;
  double scale;  // 2*pi/period

  template <typename Fn>
  void for_each(Fn&& fn) const {
    if (s.dim() == 1) {
      for (int j = 0; j < m; ++j) {
        double xi = scale * freq_of(j, m);
        fn(static_cast<std::size_t>(j), xi, 0.0);
      }
      return;
    }
    for (int jy = 0; jy < m; ++jy) {
      double xiy = scale * freq_of(jy, m);
      for (int jx = 0; jx < m; ++jx) {
        double xix = scale * freq_of(jx, m);
        fn(static_cast<std::size_t>(jy) * m + jx, xix, xiy);
      }
    }
  }
};

FreqIter freqs(const Space& s) {
  return FreqIter{s, s.cells_per_side(), kTwoPi / s.period()};
}

}  // namespace

CxField to_complex(const Field& u) {
  CxField out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = cd(u[i], 0.0);
  return out;
}

Field real_part(const CxField& u, double* max_imag) {
  Field out(u.size());
  double mi = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] = u[i].real();
    mi = std::max(mi, std::abs(u[i].imag()));
  }
  if (max_imag) *max_imag = mi;
  return out;
}

double cx_norm2(const Space& s, const CxField& u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::norm(u[i]) * s.measure(i);
  return std::sqrt(acc);
}

double cx_norm2(const Space& s, const CxVectorField& u) {
  double acc = 0.0;
  for (const CxField& comp : u)
    for (std::size_t i = 0; i < comp.size(); ++i) acc += std::norm(comp[i]) * s.measure(i);
  return std::sqrt(acc);
}

CxField apply_scalar_symbol(const Space& s, const CxField& u, const Symbol& sym) {
  require_grid(s);
  if (sym.id != SymbolId::FracLaplacian && sym.id != SymbolId::RieszPotential)
    throw std::invalid_argument("apply_scalar_symbol: symbol is not scalar-valued");
  CxField hat = u;
  fft_nd(hat, s.dim(), s.cells_per_side(), false);
  freqs(s).for_each([&](std::size_t i, double xix, double xiy) {
    double xin = std::sqrt(xix * xix + xiy * xiy);
    hat[i] *= radial_multiplier(sym.id, sym.order, xin);
  });
  hat[0] = cd(0.0, 0.0);
  fft_nd(hat, s.dim(), s.cells_per_side(), true);
  return hat;
}

CxVectorField apply_vector_symbol(const Space& s, const CxField& u, const Symbol& sym) {
  require_grid(s);
  if (sym.id != SymbolId::RieszGradient && sym.id != SymbolId::RieszTransform)
    throw std::invalid_argument("apply_vector_symbol: symbol is not vector-valued");
  CxField hat = u;
  fft_nd(hat, s.dim(), s.cells_per_side(), false);
  hat[0] = cd(0.0, 0.0);
  int n = s.dim();
  CxVectorField out(n, CxField(u.size()));
  const cd iunit(0.0, 1.0);
  freqs(s).for_each([&](std::size_t i, double xix, double xiy) {
    double xin = std::sqrt(xix * xix + xiy * xiy);
    double rad = radial_multiplier(sym.id, sym.order, xin);
    out[0][i] = iunit * xix * rad * hat[i];
    if (n == 2) out[1][i] = iunit * xiy * rad * hat[i];
  });
  for (int c = 0; c < n; ++c) fft_nd(out[c], s.dim(), s.cells_per_side(), true);
  return out;
}

CxField apply_adjoint_symbol(const Space& s, const CxVectorField& g, const Symbol& sym) {
  require_grid(s);
  if (sym.id != SymbolId::RieszAdjoint)
    throw std::invalid_argument("apply_adjoint_symbol: expected the Riesz adjoint");
  if (static_cast<int>(g.size()) != s.dim())
    throw std::invalid_argument("adjoint symbol needs one component per dimension");
  int n = s.dim();
  std::vector<CxField> hats(n);
  for (int c = 0; c < n; ++c) {
    hats[c] = g[c];
    fft_nd(hats[c], s.dim(), s.cells_per_side(), false);
  }
  CxField out(g[0].size(), cd(0.0, 0.0));
  const cd minus_i(0.0, -1.0);
  freqs(s).for_each([&](std::size_t i, double xix, double xiy) {
    double xin = std::sqrt(xix * xix + xiy * xiy);
    double rad = radial_multiplier(SymbolId::RieszAdjoint, 0.0, xin);
    cd acc = minus_i * xix * rad * hats[0][i];
    if (n == 2) acc += minus_i * xiy * rad * hats[1][i];
    out[i] = acc;
  });
  out[0] = cd(0.0, 0.0);
  fft_nd(out, s.dim(), s.cells_per_side(), true);
  return out;
}

CxVectorField spectral_gradient(const Space& s, const CxField& u) {
  require_grid(s);
  CxField hat = u;
  fft_nd(hat, s.dim(), s.cells_per_side(), false);
  hat[0] = cd(0.0, 0.0);
  int n = s.dim();
  CxVectorField out(n, CxField(u.size()));
  const cd iunit(0.0, 1.0);
  freqs(s).for_each([&](std::size_t i, double xix, double xiy) {
    out[0][i] = iunit * xix * hat[i];
    if (n == 2) out[1][i] = iunit * xiy * hat[i];
  });
  for (int c = 0; c < n; ++c) fft_nd(out[c], s.dim(), s.cells_per_side(), true);
  return out;
}

CxField riesz_gradient_adjoint(const Space& s, const CxVectorField& g, double a) {
  require_grid(s);
  if (static_cast<int>(g.size()) != s.dim())
    throw std::invalid_argument("gradient adjoint needs one component per dimension");
  int n = s.dim();
  std::vector<CxField> hats(n);
  for (int c = 0; c < n; ++c) {
    hats[c] = g[c];
    fft_nd(hats[c], s.dim(), s.cells_per_side(), false);
  }
  CxField out(g[0].size(), cd(0.0, 0.0));
  const cd minus_i(0.0, -1.0);
  freqs(s).for_each([&](std::size_t i, double xix, double xiy) {
    double xin = std::sqrt(xix * xix + xiy * xiy);
    double rad = radial_multiplier(SymbolId::RieszGradient, a, xin);
    cd acc = minus_i * xix * rad * hats[0][i];
    if (n == 2) acc += minus_i * xiy * rad * hats[1][i];
    out[i] = acc;
  });
  out[0] = cd(0.0, 0.0);
  fft_nd(out, s.dim(), s.cells_per_side(), true);
  return out;
}

FieldVariant apply_symbol(const Space& s, const FieldVariant& u, const Symbol& sym) {
  require_grid(s);
  switch (sym.id) {
    case SymbolId::FracLaplacian:
    case SymbolId::RieszPotential: {
      const CxField* scalar = std::get_if<CxField>(&u);
      if (!scalar) throw std::invalid_argument("scalar symbol applied to a vector field");
      return apply_scalar_symbol(s, *scalar, sym);
    }
    case SymbolId::RieszGradient:
    case SymbolId::RieszTransform: {
      const CxField* scalar = std::get_if<CxField>(&u);
      if (!scalar) throw std::invalid_argument("vector symbol applied to a vector field");
      return apply_vector_symbol(s, *scalar, sym);
    }
    case SymbolId::RieszAdjoint: {
      const CxVectorField* vec = std::get_if<CxVectorField>(&u);
      if (!vec) throw std::invalid_argument("riesz_adjoint needs a vector field");
      return apply_adjoint_symbol(s, *vec, sym);
    }
  }
  throw std::invalid_argument("unknown symbol");
}

namespace {

double rel_defect(const Space& s, const CxVectorField& a, const CxVectorField& b) {
  CxVectorField diff = a;
  for (std::size_t c = 0; c < diff.size(); ++c)
    for (std::size_t i = 0; i < diff[c].size(); ++i) diff[c][i] -= b[c][i];
  double na = cx_norm2(s, a);
  return na == 0.0 ? cx_norm2(s, diff) : cx_norm2(s, diff) / na;
}

}  // namespace

IdentityReport identity_suite(const Space& s, double a, std::uint64_t seed, int n_fields) {
  require_grid(s);
  IdentityReport rep;
  rep.a = a;
  for (int t = 0; t < n_fields; ++t) {
    Field ur = make_bandlimited_field(s, seed + 1000ull * t);
    CxField u = to_complex(ur);

    CxVectorField da = apply_vector_symbol(s, u, Symbol{SymbolId::RieszGradient, a});
    CxField lap = apply_scalar_symbol(s, u, Symbol{SymbolId::FracLaplacian, a});
    CxVectorField r_lap = apply_vector_symbol(s, lap, Symbol{SymbolId::RieszTransform, 0.0});
    CxField pot = apply_scalar_symbol(s, u, Symbol{SymbolId::RieszPotential, 1.0 - a});
    CxVectorField grad_pot = spectral_gradient(s, pot);

    rep.defect_gradient_vs_transform =
        std::max(rep.defect_gradient_vs_transform, rel_defect(s, da, r_lap));
    rep.defect_gradient_vs_potential =
        std::max(rep.defect_gradient_vs_potential, rel_defect(s, da, grad_pot));

    // R* R on the mean-zero part of u; the sign is measured empirically.
    CxVectorField ru = apply_vector_symbol(s, u, Symbol{SymbolId::RieszTransform, 0.0});
    CxField rstar_ru = apply_adjoint_symbol(s, ru, Symbol{SymbolId::RieszAdjoint, 0.0});
    double mean = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) mean += u[i].real();
    mean /= static_cast<double>(u.size());
    CxField u0 = u;
    for (auto& v : u0) v -= mean;
    double dot = 0.0, nn = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      dot += rstar_ru[i].real() * u0[i].real() + rstar_ru[i].imag() * u0[i].imag();
      nn += std::norm(u0[i]);
    }
    double sign = dot >= 0.0 ? 1.0 : -1.0;
    rep.rstar_r_sign = sign;
    CxField diff = rstar_ru;
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= sign * u0[i];
    rep.defect_rstar_r =
        std::max(rep.defect_rstar_r, cx_norm2(s, diff) / std::sqrt(nn * s.measure(0)));

    CxField is_u = apply_scalar_symbol(s, u, Symbol{SymbolId::RieszPotential, a});
    double num = cx_norm2(s, is_u), den = cx_norm2(s, u);
    rep.potential_norm_ratio = std::max(rep.potential_norm_ratio, den == 0.0 ? 0.0 : num / den);
  }
  return rep;
}

FracQuadrature::FracQuadrature(const Space& s, double a, double truncation_radius)
    : space_(&s), a_(a), truncation_(truncation_radius) {
  require_grid(s);
  if (a <= 0.0 || a >= 1.0) throw std::invalid_argument("fractional order must be in (0,1)");
  if (truncation_radius < 2.0 * s.spacing())
    throw std::invalid_argument("truncation radius below 2 cells");

  // Calibrate against the spectral operator on the lowest mode.
  int m = s.cells_per_side();
  Field mode(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto c = s.grid_coords_int(i);
    mode[i] = std::cos(kTwoPi * c[0] / static_cast<double>(m));
  }
  CxField spec = apply_scalar_symbol(s, to_complex(mode), Symbol{SymbolId::FracLaplacian, a});
  double dot = 0.0, nn = 0.0;
  std::size_t stride = std::max<std::size_t>(1, s.size() / 64);
  for (std::size_t i = 0; i < s.size(); i += stride) {
    double raw = raw_sum(mode, i);
    dot += spec[i].real() * raw;
    nn += raw * raw;
  }
  if (nn == 0.0) throw std::runtime_error("quadrature calibration degenerate");
  calibration_ = dot / nn;
}

double FracQuadrature::raw_sum(const Field& u, std::size_t x) const {
  const Space& s = *space_;
  double h = s.spacing();
  int n = s.dim();
  double ux = u[x];
  double acc = 0.0;
  if (n == 1) {
    int jmax = static_cast<int>(std::floor(truncation_ / h));
    int cx = static_cast<int>(x);
    for (int j = 1; j <= jmax; ++j) {
      double dist = j * h;
      double kern = std::pow(dist, -(1.0 + a_));
      acc += (2.0 * ux - u[s.grid_index(cx + j)] - u[s.grid_index(cx - j)]) * kern * h;
    }
    double upp = (u[s.grid_index(cx + 1)] - 2.0 * ux + u[s.grid_index(cx - 1)]) / (h * h);
    acc += -upp * std::pow(h / 2.0, 2.0 - a_) / (2.0 - a_);
    return acc;
  }
  int jmax = static_cast<int>(std::floor(truncation_ / h));
  auto cc = s.grid_coords_int(x);
  for (int jy = -jmax; jy <= jmax; ++jy)
    for (int jx = -jmax; jx <= jmax; ++jx) {
      if (jx == 0 && jy == 0) continue;
      double dist = std::sqrt(static_cast<double>(jx) * jx + static_cast<double>(jy) * jy) * h;
      if (dist > truncation_) continue;
      double kern = std::pow(dist, -(2.0 + a_));
      acc += (ux - u[s.grid_index(cc[0] + jx, cc[1] + jy)]) * kern * h * h;
    }
  // Singular cell via Taylor cancellation on a disc of equal area.
  double uxx = (u[s.grid_index(cc[0] + 1, cc[1])] - 2.0 * ux + u[s.grid_index(cc[0] - 1, cc[1])]) / (h * h);
  double uyy = (u[s.grid_index(cc[0], cc[1] + 1)] - 2.0 * ux + u[s.grid_index(cc[0], cc[1] - 1)]) / (h * h);
  double re = h / std::sqrt(3.14159265358979323846);
  acc += -(uxx + uyy) * 0.5 * 3.14159265358979323846 * std::pow(re, 2.0 - a_) / (2.0 - a_);
  return acc;
}

double FracQuadrature::evaluate(const Field& u, std::size_t x) const {
  return calibration_ * raw_sum(u, x);
}

}  // namespace rhtail
