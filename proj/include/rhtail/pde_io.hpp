#pragma once

#include <string>

#include "json.hpp"
#include "rhtail/fracpde.hpp"
#include "rhtail/tails.hpp"

namespace rhtail {

/// Field specs: {"kind": "constant", "value": c} | {"kind": "power", "a": a,
/// "center": i} | {"kind": "indicator", "lo": [...], "hi": [...], "offset": e}
/// | {"kind": "bandlimited", "seed": s, "shift": m} | {"kind": "csv", "path": p}.
Field field_from_json(const Space& s, const nlohmann::json& spec);

/// Coefficient specs: {"kind": "identity"} | {"kind": "scalar", "value": v,
/// "lambda": l} | {"kind": "checkerboard", "block": b, "c1": v1, "c2": v2,
/// "lambda": l} | {"kind": "csv", "path": p, "lambda": l} (one complex pair
/// per matrix entry, row-major blocks per point).
Coefficients coefficients_from_json(const Space& s, const nlohmann::json& spec);

/// Problem manifest: {"A": coeff spec, "F": [field spec per component] | null,
/// "f": field spec | null, "a": order, "tol": t, "max_iters": n}.
PDEProblem problem_from_manifest(const Space& s, const nlohmann::json& manifest);

/// Persists u as a raw little-endian double pair stream (re, im) with a JSON
/// metadata sidecar that includes the residual history.
void save_solve_result(const std::string& path_prefix, const Space& s, const SolveResult& result);
SolveResult load_solve_result(const std::string& path_prefix, const Space& s);

/// Tail weight envelopes: {"kind": "geometric", "alpha0": a, "g": g, "N": n}
/// | {"kind": "explicit", "alphas": [...], "N": n}.
nlohmann::json tail_weights_to_json(const TailWeights& tw);
TailWeights tail_weights_from_json(const nlohmann::json& spec);

}  // namespace rhtail
