#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rhtail/space.hpp"

namespace rhtail {

Field make_constant_field(const Space& s, double c);

/// u(x) = dist(x, x0)^(-a) with the value at x0 capped to the value one cell
/// (or nearest neighbor) away. Exponents a >= dim are flagged through
/// *warned but still produced.
Field make_power_field(const Space& s, double a, std::size_t center, bool* warned = nullptr);

Field make_indicator_field(const Space& s, const Region& omega);

/// Band-limited random field on a grid: real trigonometric sum over modes
/// with max-norm frequency <= kmax, unit-scale coefficients, zero mean.
/// Deterministic in the seed. Default kmax = cells/6 keeps the top third of
/// the spectrum empty.
Field make_bandlimited_field(const Space& s, std::uint64_t seed, int kmax = 0);

Field field_pow(const Field& u, double p);
Field field_abs(const Field& u);
Field field_add(const Field& u, const Field& v);
Field field_scale(const Field& u, double c);
double field_min(const Field& u);
double field_max(const Field& u);

/// Shift so the minimum equals `floor` (used to make nonnegative test data
/// out of band-limited noise).
Field field_shift_nonneg(const Field& u, double floor_value);

// Raw little-endian double dump with a JSON sidecar (dims, period, row-major
// layout). `path` gets ".bin" and ".json" suffixes appended.
void save_field_binary(const std::string& path_prefix, const Space& s, const Field& u);
Field load_field_binary(const std::string& path_prefix, const Space& s);

}  // namespace rhtail
