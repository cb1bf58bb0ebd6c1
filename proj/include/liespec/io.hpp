#pragma once

// Instance files and reports. Instances are JSON with complex entries as
// [re, im] pairs. Reports are key-ordered JSON with every float rounded to 12
// significant digits, so a given instance and tool version produce
// byte-identical output; the text format renders the same document.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "liespec/liealg.hpp"
#include "liespec/types.hpp"

namespace liespec::io {

using ordered_json = nlohmann::ordered_json;

inline double round_sig(double v) {
  if (!std::isfinite(v)) throw Error("non-finite value reached a report");
  if (v == 0.0) return 0.0;  // canonicalize -0
  const double mag = std::pow(10.0, 11.0 - std::floor(std::log10(std::abs(v))));
  const double r = std::round(v * mag) / mag;
  return r == 0.0 ? 0.0 : r;
}

inline ordered_json jcomplex(const Complex& z) {
  return ordered_json::array({round_sig(z.real()), round_sig(z.imag())});
}

inline ordered_json jcvec(const CVector& v) {
  ordered_json a = ordered_json::array();
  for (Index t = 0; t < v.size(); ++t) a.push_back(jcomplex(v(t)));
  return a;
}

inline ordered_json jcmat(const CMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(jcomplex(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", round_sig(v));
  return buf;
}

inline std::string format_complex(const Complex& z) {
  if (z.imag() == 0.0) return format_real(z.real());
  const std::string re = format_real(z.real());
  const std::string im = format_real(std::abs(z.imag()));
  return re + (z.imag() < 0 ? " - " : " + ") + im + "i";
}

struct Instance {
  std::string name;
  liealg::OperatorFamily family;
  Tolerances tol;
  bool has_tolerances = false;
};

namespace detail {

inline Complex parse_complex(const ordered_json& e, const std::string& where) {
  if (e.is_number()) return Complex(e.get<double>(), 0.0);
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return Complex(e[0].get<double>(), e[1].get<double>());
  }
  throw ParseError(where + ": expected a [re, im] pair");
}

}  // namespace detail

inline Instance parse_instance_json(const ordered_json& j, const std::string& origin) {
  if (!j.is_object()) throw ParseError(origin + ": instance must be a JSON object");
  Instance inst;
  inst.name = j.value("name", std::string("unnamed"));
  if (!j.contains("space_dim") || !j["space_dim"].is_number_integer() || j["space_dim"].get<long long>() < 1) {
    throw ParseError(origin + ": field 'space_dim' must be a positive integer");
  }
  const Index d = j["space_dim"].get<Index>();
  if (!j.contains("generators") || !j["generators"].is_array() || j["generators"].empty()) {
    throw ParseError(origin + ": field 'generators' must be a nonempty array");
  }
  inst.family.space_dim = d;
  inst.family.algebra_dim = Index(j["generators"].size());
  Index gi = 0;
  for (const auto& g : j["generators"]) {
    ++gi;
    const std::string where = origin + ": generator " + std::to_string(gi);
    if (!g.is_object() || !g.contains("matrix")) throw ParseError(where + ": expected an object with a 'matrix' field");
    const std::string label = g.value("label", "g" + std::to_string(gi));
    const auto& rows = g["matrix"];
    if (!rows.is_array() || Index(rows.size()) != d) {
      throw ParseError(where + " ('" + label + "'): 'matrix' must have space_dim = " + std::to_string(d) + " rows");
    }
    CMatrix m(d, d);
    Index r = 0;
    for (const auto& row : rows) {
      if (!row.is_array() || Index(row.size()) != d) {
        throw ParseError(where + " ('" + label + "'): row " + std::to_string(r + 1) + " must have " + std::to_string(d) +
                         " entries");
      }
      Index c = 0;
      for (const auto& e : row) {
        m(r, c) = detail::parse_complex(e, where + " ('" + label + "'), entry (" + std::to_string(r + 1) + "," +
                                               std::to_string(c + 1) + ")");
        ++c;
      }
      ++r;
    }
    if (!all_finite(m)) throw ParseError(where + " ('" + label + "'): matrix has non-finite entries");
    inst.family.generators.push_back(std::move(m));
    inst.family.labels.push_back(label);
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object()) throw ParseError(origin + ": field 'tolerances' must be an object");
    if (t.contains("rank_rel")) inst.tol.rank_rel = t["rank_rel"].get<double>();
    if (t.contains("eig_cluster")) inst.tol.eig_cluster = t["eig_cluster"].get<double>();
    if (t.contains("residual")) inst.tol.residual = t["residual"].get<double>();
    inst.has_tolerances = true;
    try {
      validate(inst.tol);
    } catch (const ParseError& e) {
      throw ParseError(origin + ": " + e.what());
    }
  }
  return inst;
}

inline Instance parse_instance_string(const std::string& text, const std::string& origin) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(origin + ": invalid JSON: " + e.what());
  }
  return parse_instance_json(j, origin);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance_string(ss.str(), path);
}

inline ordered_json instance_json(const liealg::OperatorFamily& fam, const std::string& name,
                                  const Tolerances* tolp = nullptr) {
  ordered_json j;
  j["name"] = name;
  j["space_dim"] = fam.space_dim;
  ordered_json gens = ordered_json::array();
  for (Index t = 0; t < fam.algebra_dim; ++t) {
    ordered_json g;
    g["label"] = fam.labels[std::size_t(t)];
    g["matrix"] = jcmat(fam.generators[std::size_t(t)]);
    gens.push_back(g);
  }
  j["generators"] = gens;
  if (tolp) {
    ordered_json t;
    t["rank_rel"] = tolp->rank_rel;
    t["eig_cluster"] = tolp->eig_cluster;
    t["residual"] = tolp->residual;
    j["tolerances"] = t;
  }
  return j;
}

struct Report {
  ordered_json doc = ordered_json::object();

  std::string to_json() const { return doc.dump(2) + "\n"; }

  static Report from_json(const std::string& text) {
    Report r;
    try {
      r.doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid report JSON: ") + e.what());
    }
    return r;
  }

 private:
  static bool inline_array(const ordered_json& a) {
    for (const auto& e : a) {
      if (e.is_object()) return false;
      if (e.is_array() && !inline_array(e)) return false;
    }
    return true;
  }

  static void render(const ordered_json& v, const std::string& indent, std::ostream& os) {
    if (v.is_object()) {
      for (const auto& [key, val] : v.items()) {
        os << indent << key << ":";
        if (val.is_object() || (val.is_array() && !inline_array(val))) {
          os << "\n";
          render(val, indent + "  ", os);
        } else {
          os << " " << val.dump() << "\n";
        }
      }
    } else if (v.is_array()) {
      for (const auto& e : v) {
        if (e.is_object() || (e.is_array() && !inline_array(e))) {
          os << indent << "-\n";
          render(e, indent + "  ", os);
        } else {
          os << indent << "- " << e.dump() << "\n";
        }
      }
    } else {
      os << indent << v.dump() << "\n";
    }
  }

 public:
  std::string to_text() const {
    std::ostringstream os;
    render(doc, "", os);
    return os.str();
  }
};

}  // namespace liespec::io
