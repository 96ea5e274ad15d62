#include "rhtail/pde_io.hpp"

#include <fstream>
#include <sstream>

#include "rhtail/field.hpp"

namespace rhtail {

using nlohmann::json;

Field field_from_json(const Space& s, const json& spec) {
  std::string kind = spec.at("kind").get<std::string>();
  if (kind == "constant") return make_constant_field(s, spec.value("value", 1.0));
  if (kind == "power")
    return make_power_field(s, spec.value("a", 0.5),
                            spec.value("center", static_cast<std::size_t>(0)));
  if (kind == "indicator") {
    Region box = region_box(s, spec.at("lo").get<std::vector<double>>(),
                            spec.at("hi").get<std::vector<double>>());
    Field u = make_indicator_field(s, box);
    double offset = spec.value("offset", 0.0);
    for (double& v : u) v += offset;
    return u;
  }
  if (kind == "bandlimited") {
    Field u = make_bandlimited_field(s, spec.at("seed").get<std::uint64_t>(),
                                     spec.value("kmax", 0));
    if (spec.contains("shift")) return field_shift_nonneg(u, spec.at("shift").get<double>());
    return u;
  }
  if (kind == "csv") return load_field_csv(spec.at("path").get<std::string>(), s);
  throw std::invalid_argument("unknown field kind \"" + kind + "\"");
}

Coefficients coefficients_from_json(const Space& s, const json& spec) {
  std::string kind = spec.at("kind").get<std::string>();
  if (kind == "identity") return make_identity_coefficients(s);
  if (kind == "scalar") {
    double v = spec.at("value").get<double>();
    double lambda = spec.value("lambda", std::min(v, 1.0 / v));
    return make_scalar_coefficients(s, cd(v, 0.0), lambda);
  }
  if (kind == "checkerboard")
    return make_checkerboard_coefficients(s, spec.value("block", 8), spec.at("c1").get<double>(),
                                          spec.at("c2").get<double>(),
                                          spec.at("lambda").get<double>());
  if (kind == "csv") {
    std::ifstream in(spec.at("path").get<std::string>());
    if (!in) throw std::runtime_error("cannot open coefficient CSV");
    Coefficients c;
    c.dim = s.dim();
    c.lambda = spec.at("lambda").get<double>();
    c.a.reserve(s.size() * c.dim * c.dim);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::stringstream ss(line);
      std::string tok;
      std::vector<double> row;
      while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
      if (row.size() != 2 * static_cast<std::size_t>(c.dim) * c.dim)
        throw std::runtime_error("coefficient CSV rows need 2*dim*dim entries (re, im pairs)");
      for (std::size_t e = 0; e < row.size(); e += 2) c.a.emplace_back(row[e], row[e + 1]);
    }
    if (c.a.size() != s.size() * c.dim * c.dim)
      throw std::runtime_error("coefficient CSV does not match the space");
    return c;
  }
  throw std::invalid_argument("unknown coefficient kind \"" + kind + "\"");
}

PDEProblem problem_from_manifest(const Space& s, const json& manifest) {
  PDEProblem prob;
  prob.space = &s;
  prob.coeffs = coefficients_from_json(s, manifest.at("A"));
  if (manifest.contains("F") && !manifest.at("F").is_null()) {
    for (const json& comp : manifest.at("F"))
      prob.big_f.push_back(to_complex(field_from_json(s, comp)));
    if (static_cast<int>(prob.big_f.size()) != s.dim())
      throw std::invalid_argument("F needs one component per dimension");
  }
  if (manifest.contains("f") && !manifest.at("f").is_null())
    prob.small_f = to_complex(field_from_json(s, manifest.at("f")));
  prob.a = manifest.value("a", 0.5);
  prob.tol = manifest.value("tol", 1e-10);
  prob.max_iters = manifest.value("max_iters", 10000);
  return prob;
}

void save_solve_result(const std::string& path_prefix, const Space& s, const SolveResult& result) {
  std::ofstream bin(path_prefix + ".bin", std::ios::binary);
  for (const cd& v : result.u) {
    double re = v.real(), im = v.imag();
    bin.write(reinterpret_cast<const char*>(&re), sizeof(double));
    bin.write(reinterpret_cast<const char*>(&im), sizeof(double));
  }
  json meta;
  meta["count"] = result.u.size();
  meta["layout"] = "row-major interleaved re/im";
  if (s.is_grid()) {
    meta["dims"] = s.dim() == 1 ? std::vector<int>{s.cells_per_side()}
                                : std::vector<int>{s.cells_per_side(), s.cells_per_side()};
    meta["period"] = s.period();
  }
  meta["residual"] = result.residual;
  meta["iterations"] = result.iterations;
  meta["residual_history"] = result.residual_history;
  meta["converged"] = result.converged;
  meta["method"] = result.method;
  meta["rhs_projected"] = result.rhs_projected;
  meta["f_mean_subtracted"] = result.f_mean_subtracted;
  std::ofstream js(path_prefix + ".json");
  js << meta.dump(2) << "\n";
}

SolveResult load_solve_result(const std::string& path_prefix, const Space& s) {
  std::ifstream bin(path_prefix + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + path_prefix + ".bin");
  SolveResult res;
  res.u.resize(s.size());
  for (cd& v : res.u) {
    double re = 0.0, im = 0.0;
    bin.read(reinterpret_cast<char*>(&re), sizeof(double));
    bin.read(reinterpret_cast<char*>(&im), sizeof(double));
    v = cd(re, im);
  }
  if (!bin) throw std::runtime_error("solution binary shorter than the space");
  std::ifstream js(path_prefix + ".json");
  if (js) {
    json meta = json::parse(js);
    res.residual = meta.value("residual", 0.0);
    res.iterations = meta.value("iterations", 0);
    res.converged = meta.value("converged", false);
    res.method = meta.value("method", "");
    res.residual_history = meta.value("residual_history", std::vector<double>{});
    res.rhs_projected = meta.value("rhs_projected", false);
    res.f_mean_subtracted = meta.value("f_mean_subtracted", 0.0);
  }
  return res;
}

json tail_weights_to_json(const TailWeights& tw) {
  json out;
  if (tw.kind == TailWeights::Kind::Geometric) {
    out["kind"] = "geometric";
    out["alpha0"] = tw.alpha0;
    out["g"] = tw.g;
  } else {
    out["kind"] = "explicit";
    out["alphas"] = tw.list;
  }
  out["N"] = tw.dilation;
  return out;
}

TailWeights tail_weights_from_json(const json& spec) {
  std::string kind = spec.at("kind").get<std::string>();
  double n = spec.value("N", 2.0);
  if (kind == "geometric")
    return TailWeights::geometric(spec.value("alpha0", 1.0), spec.value("g", 0.5), n);
  if (kind == "explicit")
    return TailWeights::explicit_list(spec.at("alphas").get<std::vector<double>>(), n);
  throw std::invalid_argument("unknown tail weight kind \"" + kind + "\"");
}

}  // namespace rhtail
