#include "sqfold/instance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sqfold {

using nlohmann::json;

bool SymMatrix::is_zero(double tol) const {
  for (double v : a)
    if (std::fabs(v) > tol) return false;
  return true;
}

bool SymMatrix::is_diagonal(double tol) const {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && std::fabs(at(i, j)) > tol) return false;
  return true;
}

bool SymMatrix::is_symmetric(double tol) const {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(at(i, j) - at(j, i)) > tol) return false;
  return true;
}

double SymMatrix::quad_form(const std::vector<double>& x) const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += at(i, j) * x[j];
    s += x[i] * row;
  }
  return s;
}

std::vector<double> SymMatrix::grad(const std::vector<double>& x) const {
  std::vector<double> g(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += at(i, j) * x[j];
    g[i] = 2.0 * row;
  }
  return g;
}

double Quadratic::value(const std::vector<double>& x) const {
  double s = Q.quad_form(x);
  for (size_t j = 0; j < c.size(); ++j) s += c[j] * x[j];
  return s;
}

std::vector<double> Quadratic::gradient(const std::vector<double>& x) const {
  std::vector<double> g = Q.grad(x);
  for (size_t j = 0; j < c.size(); ++j) g[j] += c[j];
  return g;
}

void QcpInstance::validate() const {
  if (n < 0) throw ParseError("instance: negative dimension");
  if (m != static_cast<int>(constraints.size()) ||
      m != static_cast<int>(rhs.size()))
    throw ParseError("instance: constraint count mismatch");
  if (static_cast<int>(lower.size()) != n ||
      static_cast<int>(upper.size()) != n)
    throw ParseError("instance: bounds length mismatch");
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]))
      throw ParseError("instance: infinite bound on variable " +
                       std::to_string(j));
    if (lower[j] > upper[j])
      throw ParseError("instance: l > u on variable " + std::to_string(j));
  }
  auto check_quad = [&](const Quadratic& q, const std::string& where) {
    if (q.Q.n != n || static_cast<int>(q.c.size()) != n)
      throw ParseError("instance: dimension mismatch in " + where);
    if (!q.Q.is_symmetric())
      throw ParseError("instance: asymmetric matrix in " + where);
  };
  check_quad(objective, "objective");
  for (int i = 0; i < m; ++i)
    check_quad(constraints[i], "constraint " + std::to_string(i));
}

namespace {

double require_finite_number(const json& v, const std::string& where) {
  if (!v.is_number())
    throw ParseError(where + ": expected a finite number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(where + ": infinite bound");
  return x;
}

Quadratic parse_quadratic(const json& jq, int n, const std::string& where) {
  Quadratic q;
  q.Q = SymMatrix(n);
  q.c.assign(n, 0.0);
  if (jq.contains("Q")) {
    const json& triplets = jq.at("Q");
    if (!triplets.is_array()) throw ParseError(where + ".Q: expected array");
    int row = 0;
    for (const auto& t : triplets) {
      const std::string loc = where + ".Q[" + std::to_string(row) + "]";
      if (!t.is_array() || t.size() != 3)
        throw ParseError(loc + ": expected [i, j, value]");
      if (!t[0].is_number_integer() || !t[1].is_number_integer())
        throw ParseError(loc + ": indices must be integers");
      const int i = t[0].get<int>();
      const int j = t[1].get<int>();
      if (i < 0 || i >= n || j < 0 || j >= n)
        throw ParseError(loc + ": index out of range");
      const double v = require_finite_number(t[2], loc);
      if (i == j) {
        q.Q.at(i, i) += v;
      } else {
        q.Q.at(i, j) += 0.5 * v;
        q.Q.at(j, i) += 0.5 * v;
      }
      ++row;
    }
  }
  if (jq.contains("c")) {
    const json& lin = jq.at("c");
    if (!lin.is_array() || static_cast<int>(lin.size()) != n)
      throw ParseError(where + ".c: expected array of length n");
    for (int j = 0; j < n; ++j)
      q.c[j] = require_finite_number(lin[j], where + ".c[" + std::to_string(j) + "]");
  }
  return q;
}

}  // namespace

QcpInstance parse_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("json: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("json: top level must be an object");

  QcpInstance inst;
  inst.name = root.value("name", std::string("unnamed"));
  if (!root.contains("n") || !root.at("n").is_number_integer())
    throw ParseError("json: missing integer field 'n'");
  inst.n = root.at("n").get<int>();
  if (inst.n < 0) throw ParseError("json: n must be nonnegative");

  if (!root.contains("bounds") || !root.at("bounds").is_array() ||
      static_cast<int>(root.at("bounds").size()) != inst.n)
    throw ParseError("json: 'bounds' must be an array of n pairs");
  inst.lower.resize(inst.n);
  inst.upper.resize(inst.n);
  for (int j = 0; j < inst.n; ++j) {
    const json& b = root.at("bounds")[j];
    const std::string loc = "bounds[" + std::to_string(j) + "]";
    if (!b.is_array() || b.size() != 2)
      throw ParseError(loc + ": expected [l, u]");
    auto bound = [&](const json& v) {
      if (!v.is_number() || !std::isfinite(v.get<double>()))
        throw ParseError(loc + ": infinite bound");
      return v.get<double>();
    };
    inst.lower[j] = bound(b[0]);
    inst.upper[j] = bound(b[1]);
    if (inst.lower[j] > inst.upper[j]) throw ParseError(loc + ": l > u");
  }

  if (!root.contains("objective") || !root.at("objective").is_object())
    throw ParseError("json: missing object field 'objective'");
  inst.objective = parse_quadratic(root.at("objective"), inst.n, "objective");

  const json cons = root.value("constraints", json::array());
  if (!cons.is_array()) throw ParseError("json: 'constraints' must be an array");
  inst.m = static_cast<int>(cons.size());
  if (root.contains("m") && root.at("m").is_number_integer() &&
      root.at("m").get<int>() != inst.m)
    throw ParseError("json: field 'm' disagrees with constraints array");
  for (int i = 0; i < inst.m; ++i) {
    const std::string loc = "constraints[" + std::to_string(i) + "]";
    if (!cons[i].is_object()) throw ParseError(loc + ": expected object");
    inst.constraints.push_back(parse_quadratic(cons[i], inst.n, loc));
    if (!cons[i].contains("rhs"))
      throw ParseError(loc + ": missing 'rhs'");
    inst.rhs.push_back(require_finite_number(cons[i].at("rhs"), loc + ".rhs"));
  }
  inst.validate();
  return inst;
}

QcpInstance load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

std::string serialize(const QcpInstance& inst) {
  auto quad_to_json = [&](const Quadratic& q) {
    json jq;
    json triplets = json::array();
    for (int i = 0; i < inst.n; ++i) {
      if (q.Q.at(i, i) != 0.0) triplets.push_back({i, i, q.Q.at(i, i)});
      for (int j = i + 1; j < inst.n; ++j)
        if (q.Q.at(i, j) != 0.0)
          triplets.push_back({i, j, 2.0 * q.Q.at(i, j)});
    }
    jq["Q"] = triplets;
    jq["c"] = q.c;
    return jq;
  };
  json root;
  root["name"] = inst.name;
  root["n"] = inst.n;
  root["m"] = inst.m;
  json bounds = json::array();
  for (int j = 0; j < inst.n; ++j)
    bounds.push_back({inst.lower[j], inst.upper[j]});
  root["bounds"] = bounds;
  root["objective"] = quad_to_json(inst.objective);
  json cons = json::array();
  for (int i = 0; i < inst.m; ++i) {
    json c = quad_to_json(inst.constraints[i]);
    c["rhs"] = inst.rhs[i];
    cons.push_back(c);
  }
  root["constraints"] = cons;
  return root.dump(2);
}

QcpInstance parse_boxqp(const std::string& text, bool negate) {
  std::istringstream in(text);
  std::string token;
  int line = 1;
  auto next = [&](const std::string& what) {
    // track line numbers by scanning whitespace manually
    int ch;
    while ((ch = in.peek()) != EOF &&
           (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n')) {
      if (ch == '\n') ++line;
      in.get();
    }
    if (!(in >> token))
      throw ParseError("boxqp line " + std::to_string(line) +
                       ": expected " + what + ", found end of file");
    return token;
  };
  auto next_double = [&](const std::string& what) {
    const std::string tok = next(what);
    try {
      size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError("boxqp line " + std::to_string(line) +
                       ": non-numeric token '" + tok + "'");
    }
  };

  const double nd = next_double("variable count");
  const int n = static_cast<int>(nd);
  if (n <= 0 || nd != n)
    throw ParseError("boxqp line 1: invalid variable count");

  QcpInstance inst;
  inst.name = "boxqp";
  inst.n = n;
  inst.m = 0;
  inst.lower.assign(n, 0.0);
  inst.upper.assign(n, 1.0);
  inst.objective.Q = SymMatrix(n);
  inst.objective.c.assign(n, 0.0);
  for (int j = 0; j < n; ++j)
    inst.objective.c[j] = next_double("objective entry");
  SymMatrix raw(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) raw.at(i, j) = next_double("matrix entry");
  if (in >> token)
    throw ParseError("boxqp: trailing token '" + token + "'");
  // min 1/2 x^T Q x: fold the half into the stored symmetric matrix
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      inst.objective.Q.at(i, j) = 0.25 * (raw.at(i, j) + raw.at(j, i));
  if (negate) {
    for (auto& v : inst.objective.Q.a) v = -v;
    for (auto& v : inst.objective.c) v = -v;
  }
  inst.validate();
  return inst;
}

QcpInstance load_boxqp_file(const std::string& path, bool negate) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_boxqp(buf.str(), negate);
}

std::vector<double> Reduction::back_map(
    const std::vector<double>& reduced_x) const {
  std::vector<double> full(is_fixed.size());
  for (size_t j = 0; j < is_fixed.size(); ++j)
    if (is_fixed[j]) full[j] = fixed_value[j];
  for (size_t r = 0; r < kept.size(); ++r) full[kept[r]] = reduced_x[r];
  return full;
}

ReducedInstance eliminate_fixed(const QcpInstance& inst) {
  inst.validate();
  ReducedInstance out;
  Reduction& red = out.reduction;
  red.is_fixed.assign(inst.n, false);
  red.fixed_value.assign(inst.n, 0.0);
  for (int j = 0; j < inst.n; ++j) {
    if (inst.upper[j] - inst.lower[j] <= 1e-12) {
      red.is_fixed[j] = true;
      red.fixed_value[j] = 0.5 * (inst.lower[j] + inst.upper[j]);
    } else {
      red.kept.push_back(j);
    }
  }
  const int nr = static_cast<int>(red.kept.size());

  QcpInstance& r = out.instance;
  r.name = inst.name;
  r.n = nr;
  r.m = inst.m;
  r.lower.resize(nr);
  r.upper.resize(nr);
  for (int k = 0; k < nr; ++k) {
    r.lower[k] = inst.lower[red.kept[k]];
    r.upper[k] = inst.upper[red.kept[k]];
  }

  // Substitute x_f: quadratic splits into kept/fixed blocks.
  auto reduce_quad = [&](const Quadratic& q, double* constant) {
    Quadratic rq;
    rq.Q = SymMatrix(nr);
    rq.c.assign(nr, 0.0);
    double cst = 0.0;
    for (int i = 0; i < inst.n; ++i) {
      for (int j = 0; j < inst.n; ++j) {
        const double v = q.Q.at(i, j);
        if (v == 0.0) continue;
        if (red.is_fixed[i] && red.is_fixed[j])
          cst += v * red.fixed_value[i] * red.fixed_value[j];
      }
    }
    for (int k = 0; k < nr; ++k) {
      const int i = red.kept[k];
      rq.c[k] = q.c[i];
      for (int j = 0; j < inst.n; ++j) {
        const double v = q.Q.at(i, j);
        if (v == 0.0 || !red.is_fixed[j]) continue;
        rq.c[k] += 2.0 * v * red.fixed_value[j];
      }
      for (int l = 0; l < nr; ++l) rq.Q.at(k, l) = q.Q.at(red.kept[k], red.kept[l]);
    }
    for (int j = 0; j < inst.n; ++j)
      if (red.is_fixed[j]) cst += q.c[j] * red.fixed_value[j];
    *constant = cst;
    return rq;
  };

  double c0 = 0.0;
  r.objective = reduce_quad(inst.objective, &c0);
  red.objective_offset = c0;
  for (int i = 0; i < inst.m; ++i) {
    double ci = 0.0;
    r.constraints.push_back(reduce_quad(inst.constraints[i], &ci));
    r.rhs.push_back(inst.rhs[i] - ci);
  }
  return out;
}

}  // namespace sqfold
