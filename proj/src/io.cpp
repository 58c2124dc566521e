#include "osc/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace osc {

static_assert(std::endian::native == std::endian::little,
              "array exchange assumes a little-endian host");

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

using nlohmann::json;

[[noreturn]] void spec_error(const std::string& where, const std::string& msg) {
  throw MalformedInput(where + ": " + msg);
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    spec_error(where, std::string("missing field '") + key + "'");
  return j.at(key);
}

int need_int(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_number_integer())
    spec_error(where, std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

double need_number(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_number())
    spec_error(where, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::vector<int> need_int_array(const json& j, const char* key,
                                const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_array())
    spec_error(where, std::string("field '") + key + "' must be an array");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer())
      spec_error(where, std::string("field '") + key + "' entry " +
                            std::to_string(i) + " must be an integer");
    out.push_back(v[i].get<int>());
  }
  return out;
}

Rational rational_at(const json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (!v.is_string())
    spec_error(where, "rationals must be \"p/q\" strings or integers");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const std::exception& e) {
    spec_error(where, e.what());
  }
}

Expr expr_at(const json& v, int nvars, const std::string& where) {
  if (!v.is_string()) spec_error(where, "expected an expression string");
  try {
    return Expr::parse(v.get<std::string>(), nvars);
  } catch (const std::exception& e) {
    spec_error(where, std::string("bad expression '") + v.get<std::string>() +
                          "': " + e.what());
  }
}

}  // namespace

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw MalformedInput(path + ": " + e.what());
  }
}

GradedLieAlgebra algebra_from_json(const nlohmann::json& j) {
  const std::string where = "algebra spec";
  auto weights = need_int_array(j, "weights", where);
  std::string name = j.value("name", std::string());
  GradedLieAlgebra alg(weights, name);
  const json& br = need(j, "brackets", where);
  if (!br.is_array()) spec_error(where, "field 'brackets' must be an array");
  for (std::size_t n = 0; n < br.size(); ++n) {
    std::string at = where + ": brackets[" + std::to_string(n) + "]";
    const json& e = br[n];
    if (!e.is_array() || e.size() != 4)
      spec_error(at, "must be [i, j, k, \"p/q\"]");
    int idx[3];
    for (int p = 0; p < 3; ++p) {
      if (!e[p].is_number_integer()) spec_error(at, "indices must be integers");
      idx[p] = e[p].get<int>();
      if (idx[p] < 0 || idx[p] >= alg.dim())
        spec_error(at, "index " + std::to_string(idx[p]) + " out of range");
    }
    alg.set_bracket(idx[0], idx[1], idx[2], rational_at(e[3], at));
  }
  return alg;
}

FilteredPatch patch_from_json(const nlohmann::json& j) {
  const std::string where = "patch spec";
  const json& fr = need(j, "frame", where);
  if (!fr.is_array() || fr.empty())
    spec_error(where, "field 'frame' must be a non-empty array");
  const int dim = static_cast<int>(fr.size());
  std::vector<VectorField> frame;
  for (int f = 0; f < dim; ++f) {
    std::string at = where + ": frame[" + std::to_string(f) + "]";
    if (!fr[f].is_array() || static_cast<int>(fr[f].size()) != dim)
      spec_error(at, "must list " + std::to_string(dim) + " coefficients");
    VectorField X;
    for (int k = 0; k < dim; ++k)
      X.coeffs.push_back(
          expr_at(fr[f][k], dim, at + "[" + std::to_string(k) + "]"));
    frame.push_back(std::move(X));
  }
  auto orders = need_int_array(j, "orders", where);
  if (static_cast<int>(orders.size()) != dim)
    spec_error(where, "'orders' must match the frame size");
  int depth = need_int(j, "depth", where);
  const json& per = need(j, "periodic", where);
  if (!per.is_boolean()) spec_error(where, "'periodic' must be a boolean");
  double inj = need_number(j, "injectivity_radius", where);
  double dom = j.value("domain_radius", 0.0);
  std::string name = j.value("name", std::string());
  return FilteredPatch(std::move(frame), std::move(orders), depth,
                       per.get<bool>(), inj, dom, name);
}

FilteredDiffOp operator_from_json(PatchRef patch, const nlohmann::json& j) {
  const std::string where = "operator spec";
  FilteredDiffOp A(patch);
  const json& terms = need(j, "terms", where);
  if (!terms.is_array()) spec_error(where, "field 'terms' must be an array");
  const int dim = patch->dim();
  for (std::size_t n = 0; n < terms.size(); ++n) {
    std::string at = where + ": terms[" + std::to_string(n) + "]";
    auto index = need_int_array(terms[n], "index", at);
    if (static_cast<int>(index.size()) != dim)
      spec_error(at, "'index' must have one entry per frame field");
    for (int e : index)
      if (e < 0) spec_error(at, "'index' entries must be non-negative");
    A.add_term(index, expr_at(need(terms[n], "coeff", at), dim, at));
  }
  return A;
}

FamilySpec family_spec_from_json(const nlohmann::json& j) {
  const std::string where = "family spec";
  FamilySpec spec;
  const json& kind = need(j, "kind", where);
  if (!kind.is_string()) spec_error(where, "'kind' must be a string");
  spec.kind = kind.get<std::string>();
  spec.grid_x = j.value("grid_x", spec.grid_x);
  spec.grid_eta = j.value("grid_eta", spec.grid_eta);
  spec.t_levels = j.value("t_levels", spec.t_levels);
  if (spec.grid_x < 1 || spec.grid_eta < 2 || spec.t_levels < 1)
    spec_error(where, "grid sizes and t_levels must be positive");
  return spec;
}

SymbolFamily family_from_spec(const FamilySpec& spec) {
  auto tg = dyadic_tgrid(spec.t_levels);
  if (spec.kind == "cone")
    return normalize_outside_interval(family_from_function(
        TorusGrid{{1}}, TorusGrid{{spec.grid_eta}}, {1}, 1.0, tg,
        [](const std::vector<double>&, const std::vector<double>& e,
           double t) { return cplx(std::sqrt(t * t + e[0] * e[0]), 0); }));
  if (spec.kind == "eta-squared")
    return normalize_outside_interval(family_from_function(
        TorusGrid{{1}}, TorusGrid{{spec.grid_eta}}, {1}, 2.0, tg,
        [](const std::vector<double>&, const std::vector<double>& e, double) {
          return cplx(e[0] * e[0], 0);
        }));
  if (spec.kind == "identity")
    return normalize_outside_interval(family_from_function(
        TorusGrid{{1}}, TorusGrid{{spec.grid_eta}}, {1}, 0.0, tg,
        [](const std::vector<double>&, const std::vector<double>&, double) {
          return cplx(1, 0);
        }));
  if (spec.kind == "lap-potential")
    return normalize_outside_interval(family_from_function(
        TorusGrid{{spec.grid_x}}, TorusGrid{{spec.grid_eta}}, {1}, 2.0, tg,
        [](const std::vector<double>& x, const std::vector<double>& e,
           double t) {
          return cplx(e[0] * e[0] + t * t * (2 + std::cos(x[0])), 0);
        }));
  if (spec.kind == "log-kernel")
    return log_kernel_family(spec.grid_eta, spec.t_levels);
  if (spec.kind == "heis-sublaplacian") {
    SymbolFamily S = family_from_function(
        TorusGrid{{1, 1, 1}}, TorusGrid{{spec.grid_eta, spec.grid_eta,
                                         spec.grid_eta}},
        {1, 1, 2}, 2.0, tg,
        [](const std::vector<double>&, const std::vector<double>& e, double) {
          return cplx(e[0] * e[0] + e[1] * e[1], 0);
        });
    return normalize_outside_interval(S);
  }
  throw MalformedInput("family spec: unknown kind '" + spec.kind + "'");
}

SymbolFamily log_kernel_family(int G, int t_levels) {
  TorusGrid eg{{G}};
  const double h = eg.h(0);
  std::vector<cplx> ker(static_cast<std::size_t>(G));
  for (int j = 0; j < G; ++j) {
    double xi = eg.coord(0, j);
    // cell average of log|xi| over the singular cell; psi is the properly
    // supporting cut-off whose frequency side is the symmetric mollifier
    double v = (j == 0) ? std::log(h / 2) - 1 : std::log(std::abs(xi));
    double s = std::sin(xi / 2);
    ker[static_cast<std::size_t>(j)] = cplx(v * (1 - s * s * s * s), 0);
  }
  kernel_to_symbol(eg, ker);
  SymbolFamily S;
  S.xgrid = TorusGrid{{1}};
  S.egrid = eg;
  S.weights = {1};
  S.weight = -1.0;
  S.tgrid = dyadic_tgrid(t_levels);
  S.values.resize(static_cast<std::size_t>(S.nt()) * G);
  for (int ti = 0; ti < S.nt(); ++ti)
    for (int j = 0; j < G; ++j)
      S.at(ti, 0, static_cast<std::size_t>(j)) =
          ker[static_cast<std::size_t>(j)];
  return S;
}

LogCocycleReport log_cocycle_check(int G, const std::vector<double>& lambdas,
                                   double tol) {
  TorusGrid eg{{G}};
  const double h = eg.h(0);
  LogCocycleReport rep;
  rep.pass = true;
  for (double lambda : lambdas) {
    if (lambda <= 1) throw DomainError("log cocycle check needs lambda > 1");
    LogCocycleEntry ent;
    ent.lambda = lambda;
    ent.expected = -std::log(lambda) / lambda * eg.volume();
    std::vector<cplx> diff(static_cast<std::size_t>(G));
    for (int j = 0; j < G; ++j) {
      double xi = eg.coord(0, j);
      double s = (j == 0) ? std::log(h / 2) - 1 : std::log(std::abs(xi));
      // zoom pullback minus the homogeneous rescaling: the xi = 0 sample is
      // the same in both, so the singular cell cancels exactly
      double a = (s - std::log(lambda)) / lambda;
      double b = s / lambda;
      diff[static_cast<std::size_t>(j)] = cplx(a - b, 0);
    }
    kernel_to_symbol(eg, diff);
    std::size_t zero = eg.index_of_freq(0, 0);
    ent.measured = diff[zero].real();
    ent.rel_error =
        std::abs(diff[zero] - cplx(ent.expected, 0)) / std::abs(ent.expected);
    for (std::size_t j = 0; j < diff.size(); ++j)
      if (j != zero) ent.tail_max = std::max(ent.tail_max, std::abs(diff[j]));
    if (ent.rel_error >= tol || ent.tail_max >= tol * std::abs(ent.expected))
      rep.pass = false;
    rep.entries.push_back(ent);
  }
  return rep;
}

namespace {

void append_axis(json& axes, const char* key, const TorusGrid& g) {
  axes[key] = g.sizes;
}

}  // namespace

void write_family(const std::string& base, const SymbolFamily& S) {
  json header;
  std::vector<std::size_t> shape;
  shape.push_back(static_cast<std::size_t>(S.nt()));
  for (int g : S.xgrid.sizes) shape.push_back(static_cast<std::size_t>(g));
  for (int g : S.egrid.sizes) shape.push_back(static_cast<std::size_t>(g));
  header["shape"] = shape;
  json axes = json::object();
  append_axis(axes, "x", S.xgrid);
  append_axis(axes, "eta", S.egrid);
  axes["t"] = S.tgrid;
  header["axes"] = axes;
  header["weight"] = S.weight;
  header["weights"] = S.weights;
  header["period"] = S.xgrid.period;
  header["nose_normalized"] = S.nose_normalized;
  header["dtype"] = "complex128";
  header["byte_order"] = "little";
  write_text(base + ".json", dump_json(header) + "\n");
  std::ofstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw MalformedInput(base + ".bin: cannot open for writing");
  bin.write(reinterpret_cast<const char*>(S.values.data()),
            static_cast<std::streamsize>(S.values.size() * sizeof(cplx)));
  if (!bin) throw MalformedInput(base + ".bin: write failed");
}

SymbolFamily read_family(const std::string& base) {
  json header = load_json(base + ".json");
  const std::string where = base + ".json";
  if (need(header, "dtype", where) != "complex128" ||
      need(header, "byte_order", where) != "little")
    spec_error(where, "expected little-endian complex128 data");
  SymbolFamily S;
  const json& axes = need(header, "axes", where);
  S.xgrid.sizes = need_int_array(axes, "x", where);
  S.egrid.sizes = need_int_array(axes, "eta", where);
  const json& tg = need(axes, "t", where);
  if (!tg.is_array() || tg.empty())
    spec_error(where, "'axes.t' must be a non-empty array");
  for (const auto& t : tg) {
    if (!t.is_number()) spec_error(where, "'axes.t' entries must be numbers");
    S.tgrid.push_back(t.get<double>());
  }
  S.weights = need_int_array(header, "weights", where);
  S.weight = need_number(header, "weight", where);
  if (header.contains("period")) {
    S.xgrid.period = need_number(header, "period", where);
    S.egrid.period = S.xgrid.period;
  }
  S.nose_normalized = header.value("nose_normalized", false);
  std::size_t count =
      static_cast<std::size_t>(S.nt()) * S.nx() * S.ne();
  auto shape = need(header, "shape", where);
  std::size_t prod = 1;
  for (const auto& d : shape) prod *= d.get<std::size_t>();
  if (prod != count) spec_error(where, "'shape' does not match the axes");
  std::ifstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw MalformedInput(base + ".bin: cannot open file");
  S.values.resize(count);
  bin.read(reinterpret_cast<char*>(S.values.data()),
           static_cast<std::streamsize>(count * sizeof(cplx)));
  if (static_cast<std::size_t>(bin.gcount()) != count * sizeof(cplx))
    throw MalformedInput(base + ".bin: truncated array data");
  return S;
}

namespace {

std::string join_index(const std::vector<int>& a) {
  std::string out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(a[i]);
  }
  return out;
}

}  // namespace

std::string seminorm_csv(const SchwartzSeminormReport& rep) {
  std::string out = "a,b,k,shell,radius,sup,slope,bound,pass\n";
  for (const auto& e : rep.entries)
    for (std::size_t s = 0; s < e.shell_sup.size(); ++s) {
      if (e.shell_sup[s] < 0) continue;
      out += join_index(e.a) + "," + join_index(e.b) + "," +
             std::to_string(e.k) + "," + std::to_string(s) + "," +
             fmt17(e.shell_radius[s]) + "," + fmt17(e.shell_sup[s]) + "," +
             fmt17(e.fitted_slope) + "," + fmt17(e.bound) + "," +
             (e.pass ? "1" : "0") + "\n";
    }
  return out;
}

std::string shell_profile_csv(const ShellProfile& p) {
  std::string out = "shell,radius,sup\n";
  for (std::size_t s = 0; s < p.sup.size(); ++s) {
    if (p.sup[s] < 0) continue;
    out += std::to_string(s) + "," + fmt17(p.radius[s]) + "," +
           fmt17(p.sup[s]) + "\n";
  }
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MalformedInput(path + ": cannot open for writing");
  out << content;
  if (!out) throw MalformedInput(path + ": write failed");
}

namespace {

void dump_rec(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad1(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad1 + json(it.key()).dump() + ": ";
        dump_rec(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ", ";
        dump_rec(j[i], out, indent);
      }
      out += "]";
      return;
    }
    case json::value_t::number_float:
      out += fmt17(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& j) {
  std::string out;
  dump_rec(j, out, 0);
  return out;
}

}  // namespace osc
