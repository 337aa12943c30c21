#include "nullgeo/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nullgeo {

using nlohmann::json;

std::string format_float(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

json to_json(const IdentityReport& r) {
  json j;
  j["check"] = r.check;
  j["value"] = r.value;
  j["scale"] = r.scale;
  j["relative"] = r.relative;
  json terms = json::array();
  for (const auto& [name, v] : r.terms) terms.push_back({{"name", name}, {"value", v}});
  j["terms"] = terms;
  j["grid"] = {{"n_theta", r.n_theta}, {"n_phi", r.n_phi}};
  if (r.refined_value) {
    j["refined"] = {{"value", *r.refined_value},
                    {"relative", *r.refined_relative},
                    {"n_theta", r.refined_n_theta},
                    {"n_phi", r.refined_n_phi}};
  }
  j["verdict"] = to_string(r.verdict);
  if (!r.classification.empty()) j["classification"] = r.classification;
  json diag = json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = v;
  j["diagnostics"] = diag;
  j["notes"] = r.notes;
  return j;
}

json to_json(const HypothesisFlags& h) {
  json j;
  j["H_spacelike"] = h.H_spacelike;
  j["Q_LLbar_nonneg"] = h.Q_LLbar_nonneg;
  j["chi_positive"] = h.chi_positive;
  j["chibar_neg_positive"] = h.chibar_neg_positive;
  j["QsqL_cond"] = h.QsqL_cond;
  j["QsqLbar_cond"] = h.QsqLbar_cond;
  j["dzeta_zero"] = h.dzeta_zero;
  j["dzeta_max"] = h.dzeta_max;
  j["gauge_residual"] = h.gauge_residual;
  j["case1"] = h.case1();
  j["case2"] = h.case2();
  j["case3"] = h.case3();
  json cones = json::array();
  for (const auto& [k, m] : h.cone_membership)
    cones.push_back({{"k", k}, {"chi", m.first}, {"minus_chibar", m.second}});
  j["cone_membership"] = cones;
  json fails = json::object();
  for (const auto& [k, v] : h.failing_nodes) fails[k] = v;
  j["failing_nodes"] = fails;
  return j;
}

namespace {

void emit(std::ostringstream& out, const json& j, int depth, bool exact) {
  const std::string pad(2 * depth, ' '), pad_in(2 * (depth + 1), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      // nlohmann's default object is a std::map, so iteration is key-sorted
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad_in << json(it.key()).dump() << ": ";
        emit(out, it.value(), depth + 1, exact || (depth == 0 && it.key() == "config"));
      }
      out << "\n" << pad << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ",\n";
        out << pad_in;
        emit(out, j[i], depth + 1, exact);
      }
      out << "\n" << pad << "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (exact && std::isfinite(v))
        out << j.dump();
      else if (std::isfinite(v))
        out << format_float(v);
      else
        out << json(format_float(v)).dump();
      return;
    }
    default:
      out << j.dump();
  }
}

}  // namespace

std::string dump_report(const json& report) {
  std::ostringstream out;
  emit(out, report, 0, false);
  out << "\n";
  return out.str();
}

void write_field_csv(const std::string& path, const ScalarField& field) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "theta,phi,value\n";
  const GridSpec& g = *field.grid;
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j)
      out << format_float(g.theta(i)) << "," << format_float(g.phi(j)) << ","
          << format_float(field[g.index(i, j)]) << "\n";
}

}  // namespace nullgeo
