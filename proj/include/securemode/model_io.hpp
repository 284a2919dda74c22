#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "securemode/model.hpp"
#include "securemode/simulate.hpp"

namespace securemode {

using Json = nlohmann::json;

/// A parsed model file. `system` always holds discrete-time matrices; for
/// continuous-time files the original (Ac, Bc) are kept in `continuous`.
struct ModelFile {
  SwitchingSystem<Rational> system;
  std::optional<SwitchingSystem<Rational>> continuous;
  std::string scalar = "rational";
  Rational h = 0;
  Discretization method = Discretization::euler;
  std::string notes;
  std::vector<std::string> warnings;
};

namespace detail {

inline Rational json_scalar(const Json& j, const std::string& where) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(Integer(j.dump(), 10));
    if (j.is_number()) return rational_from_double(j.get<double>());
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
  throw ParseError(where + ": expected a number or a numeric string, got " + std::string(j.type_name()));
}

inline Matrix<Rational> json_matrix(const Json& j, std::size_t rows, std::size_t cols, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of rows");
  if (j.size() != rows)
    throw ParseError(where + ": has " + std::to_string(j.size()) + " rows, expected " + std::to_string(rows));
  Matrix<Rational> out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const Json& row = j[i];
    const std::string rw = where + "[" + std::to_string(i) + "]";
    if (!row.is_array()) throw ParseError(rw + ": expected an array");
    if (row.size() != cols)
      throw ParseError(rw + ": has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) out(i, c) = json_scalar(row[c], rw + "[" + std::to_string(c) + "]");
  }
  return out;
}

inline std::size_t json_count(const Json& obj, const char* key, const std::string& where, std::optional<std::size_t> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ParseError(where + ": missing field \"" + key + "\"");
  }
  const Json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ParseError(where + "." + key + ": expected a nonnegative integer");
  return v.get<std::size_t>();
}

template <Scalar T>
Json scalar_json(const T& x) {
  if constexpr (is_exact_v<T>)
    return to_string(x);
  else
    return x;
}

template <Scalar T>
Json row_json(const Matrix<T>& m, std::size_t r) {
  Json row = Json::array();
  for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(scalar_json(m(r, c)));
  return row;
}

}  // namespace detail

template <Scalar T>
Json matrix_json(const Matrix<T>& m) {
  Json out = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(detail::row_json(m, r));
  return out;
}

/// Column vector as a flat array.
template <Scalar T>
Json vector_json(const Matrix<T>& v) {
  Json out = Json::array();
  for (const auto& x : v.values()) out.push_back(detail::scalar_json(x));
  return out;
}

inline Json index_set_json(const IndexSet& s) {
  Json out = Json::array();
  for (auto k : s) out.push_back(k + 1);
  return out;
}

/// Validates and converts a model document. `source` prefixes every message.
inline ModelFile parse_model(const Json& doc, const std::string& source = "model") {
  if (!doc.is_object()) throw ParseError(source + ": top level must be an object");
  ModelFile mf;
  const std::size_t n = detail::json_count(doc, "n", source);
  const std::size_t m = detail::json_count(doc, "m", source);
  const std::size_t p = detail::json_count(doc, "p", source);
  if (n == 0) throw ParseError(source + ".n: must be at least 1");
  if (p == 0) throw ParseError(source + ".p: must be at least 1");

  if (doc.contains("scalar")) {
    mf.scalar = doc.at("scalar").get<std::string>();
    if (mf.scalar != "rational" && mf.scalar != "float")
      throw ParseError(source + ".scalar: expected \"rational\" or \"float\"");
  }
  const bool continuous = doc.value("continuous_time", false);
  if (doc.contains("discretization")) {
    try {
      mf.method = parse_discretization(doc.at("discretization").get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(source + ".discretization: " + e.what());
    }
  }
  if (doc.contains("h")) mf.h = detail::json_scalar(doc.at("h"), source + ".h");
  if (continuous && !(mf.h > 0)) throw ParseError(source + ".h: continuous-time models need a positive step h");
  mf.notes = doc.value("notes", std::string());

  if (!doc.contains("modes") || !doc.at("modes").is_array()) throw ParseError(source + ": missing \"modes\" array");
  const Json& modes = doc.at("modes");
  if (modes.size() < 2) throw ParseError(source + ".modes: at least two modes required");

  SwitchingSystem<Rational> sys;
  sys.sigma = detail::json_count(doc, "sigma", source, 0);
  sys.rho = detail::json_count(doc, "rho", source, 0);
  sys.dwell = detail::json_count(doc, "dwell", source, 2 * n);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const Json& md = modes[k];
    const std::string where = source + ".modes[" + std::to_string(k) + "]";
    if (!md.is_object()) throw ParseError(where + ": expected an object");
    LinearMode<Rational> mode;
    if (!md.contains("id")) throw ParseError(where + ": missing field \"id\"");
    mode.id = md.at("id").is_string() ? md.at("id").get<std::string>() : md.at("id").dump();
    if (!md.contains("A") || !md.contains("C")) throw ParseError(where + ": fields \"A\" and \"C\" are required");
    mode.A = detail::json_matrix(md.at("A"), n, n, where + ".A");
    const bool no_input = m == 0 || !md.contains("B") || (md.at("B").is_array() && md.at("B").empty());
    if (no_input && m > 0) throw ParseError(where + ": missing field \"B\" (m=" + std::to_string(m) + ")");
    mode.B = no_input ? Matrix<Rational>(n, 0) : detail::json_matrix(md.at("B"), n, m, where + ".B");
    mode.C = detail::json_matrix(md.at("C"), p, n, where + ".C");
    sys.modes.push_back(std::move(mode));
  }
  try {
    sys.validate();
  } catch (const Error& e) {
    throw ParseError(source + ": " + e.what());
  }

  if (continuous) {
    mf.continuous = sys;
    for (auto& mode : sys.modes) {
      auto d = discretize(mode.A, mode.B, mf.h, mf.method);
      mode.A = std::move(d.Ad);
      mode.B = std::move(d.Bd);
    }
  }
  if (sys.dwell < 2 * n)
    mf.warnings.push_back("dwell time " + std::to_string(sys.dwell) + " is shorter than 2n=" + std::to_string(2 * n) +
                          "; pairwise verdicts assume at least 2n samples per mode");
  mf.system = std::move(sys);
  return mf;
}

inline ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parse_model(doc, path);
}

/// Serializes a discrete-time system in the model-file schema.
inline Json model_json(const SwitchingSystem<Rational>& sys, const std::string& notes = {}) {
  Json doc;
  doc["n"] = sys.n();
  doc["m"] = sys.m();
  doc["p"] = sys.p();
  doc["sigma"] = sys.sigma;
  doc["rho"] = sys.rho;
  doc["dwell"] = sys.dwell;
  doc["scalar"] = "rational";
  doc["continuous_time"] = false;
  if (!notes.empty()) doc["notes"] = notes;
  Json modes = Json::array();
  for (const auto& md : sys.modes)
    modes.push_back({{"id", md.id}, {"A", matrix_json(md.A)}, {"B", matrix_json(md.B)}, {"C", matrix_json(md.C)}});
  doc["modes"] = std::move(modes);
  return doc;
}

/// JSON lines, one record per sample {t, mode, x, u, y, w, v}, followed by a
/// record {t: tau, mode, x} carrying the final state.
template <Scalar T>
void write_trace_jsonl(std::ostream& os, const Trace<T>& tr) {
  const std::size_t tau = tr.samples();
  for (std::size_t t = 0; t < tau; ++t) {
    Json rec;
    rec["t"] = t;
    rec["mode"] = tr.mode;
    rec["x"] = detail::row_json(tr.x, t);
    rec["u"] = detail::row_json(tr.u, t);
    rec["y"] = detail::row_json(tr.y, t);
    rec["w"] = detail::row_json(tr.w, t);
    rec["v"] = detail::row_json(tr.v, t);
    os << rec.dump() << '\n';
  }
  Json last;
  last["t"] = tau;
  last["mode"] = tr.mode;
  last["x"] = detail::row_json(tr.x, tau);
  os << last.dump() << '\n';
}

inline Trace<Rational> read_trace_jsonl(std::istream& in, const std::string& source = "trace") {
  std::vector<Json> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw ParseError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  std::vector<const Json*> samples;
  const Json* final_state = nullptr;
  for (const auto& r : records) {
    if (!r.is_object() || !r.contains("x")) throw ParseError(source + ": every record needs \"x\"");
    if (r.contains("y"))
      samples.push_back(&r);
    else
      final_state = &r;
  }
  if (samples.empty()) throw ParseError(source + ": no samples");
  auto width = [&](const char* key) { return samples.front()->at(key).size(); };
  const std::size_t tau = samples.size();
  Trace<Rational> tr;
  tr.mode = samples.front()->value("mode", std::string());
  tr.x = Matrix<Rational>(tau + 1, width("x"));
  tr.y = Matrix<Rational>(tau, width("y"));
  tr.u = Matrix<Rational>(tau, samples.front()->contains("u") ? width("u") : 0);
  tr.w = Matrix<Rational>(tau, samples.front()->contains("w") ? width("w") : 0);
  tr.v = Matrix<Rational>(tau, samples.front()->contains("v") ? width("v") : 0);
  auto fill_row = [&](Matrix<Rational>& dst, std::size_t t, const Json& rec, const char* key) {
    if (dst.cols() == 0 && !rec.contains(key)) return;
    const std::string where = source + ": t=" + std::to_string(t) + "." + key;
    if (!rec.contains(key) || !rec.at(key).is_array() || rec.at(key).size() != dst.cols())
      throw ParseError(where + ": expected " + std::to_string(dst.cols()) + " entries");
    for (std::size_t c = 0; c < dst.cols(); ++c)
      dst(t, c) = detail::json_scalar(rec.at(key)[c], where + "[" + std::to_string(c) + "]");
  };
  for (std::size_t t = 0; t < tau; ++t) {
    const Json& rec = *samples[t];
    if (rec.value("t", t) != t) throw ParseError(source + ": records out of order at t=" + std::to_string(t));
    fill_row(tr.x, t, rec, "x");
    fill_row(tr.y, t, rec, "y");
    fill_row(tr.u, t, rec, "u");
    fill_row(tr.w, t, rec, "w");
    fill_row(tr.v, t, rec, "v");
  }
  if (final_state) fill_row(tr.x, tau, *final_state, "x");
  return tr;
}

}  // namespace securemode
