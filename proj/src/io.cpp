#include "phasekit/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace phasekit::io {

namespace {

[[noreturn]] void parse_fail(const std::string& msg) { fail(ErrorCode::ParseError, msg); }

RealMatrix rows_to_matrix(const json& j, const std::string& what) {
  if (!j.is_array()) parse_fail(what + ": expected an array of rows");
  if (j.empty()) return RealMatrix(0, 0);
  // a flat array of numbers is read as a single row
  if (j.front().is_number()) {
    RealMatrix M(1, j.size());
    for (size_t c = 0; c < j.size(); ++c) {
      if (!j[c].is_number()) parse_fail(what + ": entries must be numbers");
      M(0, c) = j[c].get<double>();
    }
    return M;
  }
  const size_t cols = j.front().is_array() ? j.front().size() : 0;
  RealMatrix M(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) parse_fail(what + ": rows must be arrays of equal length");
    for (size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) parse_fail(what + ": entries must be numbers");
      M(r, c) = j[r][c].get<double>();
    }
  }
  return M;
}

json rows(const RealMatrix& M) {
  json out = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    out.push_back(row);
  }
  return out;
}

json angles(const std::vector<double>& v) { return json(v); }

}  // namespace

json read_json(const std::string& path) {
  std::string text;
  if (path.empty() || path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  } else {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail("invalid JSON in " + (path.empty() ? std::string("-") : path) + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

json rounded(const json& j, int digits) {
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (!std::isfinite(x)) return j;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return std::strtod(buf, nullptr);
  }
  if (j.is_array() || j.is_object()) {
    json out = j;
    for (auto& v : out) v = rounded(v, digits);
    return out;
  }
  return j;
}

std::string dump(const json& j) { return rounded(j).dump(2) + "\n"; }

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

RealMatrix real_matrix_from_json(const json& j) {
  const ComplexMatrix M = matrix_from_json(j);
  if (M.imag().norm() != 0.0) parse_fail("expected a real matrix");
  return M.real();
}

ComplexMatrix matrix_from_json(const json& j) {
  if (j.is_array()) return rows_to_matrix(j, "matrix").cast<Complex>();
  if (!j.is_object() || !j.contains("re")) parse_fail("matrix: expected {\"re\": ..., \"im\": ...} or an array");
  const RealMatrix re = rows_to_matrix(j.at("re"), "matrix.re");
  RealMatrix im = RealMatrix::Zero(re.rows(), re.cols());
  if (j.contains("im")) {
    im = rows_to_matrix(j.at("im"), "matrix.im");
    if (im.rows() != re.rows() || im.cols() != re.cols()) parse_fail("matrix: re and im differ in shape");
  }
  ComplexMatrix M(re.rows(), re.cols());
  M.real() = re;
  M.imag() = im;
  return M;
}

json matrix_to_json(const ComplexMatrix& M) {
  return {{"re", rows(M.real())}, {"im", rows(M.imag())}};
}

json real_matrix_to_json(const RealMatrix& M) { return rows(M); }

StateSpace system_from_json(const json& j) {
  if (!j.is_object()) parse_fail("system: expected an object");
  StateSpace G;
  try {
    if (j.contains("num") || j.contains("den")) {
      if (!j.contains("num") || !j.contains("den")) parse_fail("system: num and den go together");
      return tf(j.at("num").get<std::vector<double>>(), j.at("den").get<std::vector<double>>());
    }
  } catch (const json::exception& e) {
    parse_fail(std::string("system: ") + e.what());
  }
  if (!j.contains("D")) parse_fail("system: missing D");
  G.D = rows_to_matrix(j.at("D"), "system.D");
  const auto m = G.D.rows();
  const RealMatrix A = j.contains("A") ? rows_to_matrix(j.at("A"), "system.A") : RealMatrix(0, 0);
  const auto n = A.rows();
  G.A = A.size() == 0 ? RealMatrix(0, 0) : A;
  auto part = [&](const char* key, Eigen::Index r, Eigen::Index c) -> RealMatrix {
    if (!j.contains(key)) {
      if (n == 0) return RealMatrix(r, c);
      parse_fail(std::string("system: missing ") + key);
    }
    RealMatrix X = rows_to_matrix(j.at(key), std::string("system.") + key);
    if (X.size() == 0) return RealMatrix(r, c);
    return X;
  };
  G.B = part("B", G.A.rows(), m);
  G.C = part("C", m, G.A.rows());
  G.validate();
  return G;
}

json system_to_json(const StateSpace& G) {
  return {{"A", rows(G.A)}, {"B", rows(G.B)}, {"C", rows(G.C)}, {"D", rows(G.D)}};
}

json omega_to_json(double w) {
  if (std::isinf(w)) return "inf";
  return w;
}

double omega_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Infinity" || s == "infinity") return kInfFrequency;
    parse_fail("frequency: unknown string " + s);
  }
  if (!j.is_number()) parse_fail("frequency: expected a number or \"inf\"");
  return j.get<double>();
}

PhaseEnvelope phase_envelope_from_json(const json& j) {
  if (!j.is_object()) parse_fail("envelope: expected an object");
  try {
    if (!j.contains("points")) {
      return PhaseEnvelope::constant(j.at("alpha").get<double>(), j.at("beta").get<double>());
    }
    std::vector<EnvelopePoint> pts;
    for (const auto& p : j.at("points")) {
      pts.push_back({omega_from_json(p.at("omega")), p.at("alpha").get<double>(), p.at("beta").get<double>()});
    }
    return PhaseEnvelope(std::move(pts));
  } catch (const json::exception& e) {
    parse_fail(std::string("envelope: ") + e.what());
  }
}

json phase_envelope_to_json(const PhaseEnvelope& env) {
  json pts = json::array();
  for (const auto& p : env.points()) pts.push_back({{"omega", omega_to_json(p.omega)}, {"alpha", p.alpha}, {"beta", p.beta}});
  return {{"points", pts}};
}

GainEnvelope gain_envelope_from_json(const json& j) {
  GainEnvelope env;
  if (j.is_number()) {
    env.constant = j.get<double>();
    return env;
  }
  if (!j.is_object()) parse_fail("gain envelope: expected an object");
  if (j.contains("points")) {
    fail(ErrorCode::InvalidArgument, "gain envelope: tabulated gamma is not supported; give a constant or a weight");
  }
  if (j.contains("weight")) {
    env.weight = system_from_json(j.at("weight"));
  } else if (j.contains("gamma") && j.at("gamma").is_number()) {
    env.constant = j.at("gamma").get<double>();
  } else {
    parse_fail("gain envelope: expected \"gamma\" or \"weight\"");
  }
  return env;
}

json to_json(const SectorialClass& c) {
  json out{{"class", to_string(c.tag)}, {"min_support", c.min_support}, {"in_tolerance_band", c.in_tolerance_band}};
  out["delta"] = c.delta ? json(*c.delta) : json(nullptr);
  out["theta0"] = c.theta0 ? json(*c.theta0) : json(nullptr);
  return out;
}

json to_json(const PhaseSector& s) {
  return {{"phases", angles(s.phases)}, {"gamma", s.gamma}, {"delta", s.delta},
          {"max", s.max()}, {"min", s.min()}};
}

json to_json(const SectorialDecomposition& d) {
  return {{"T", matrix_to_json(d.T)},
          {"kernel_dim", d.kernel_dim},
          {"d_phases", angles(d.d_phases)},
          {"e_block_count", d.e_block_count},
          {"theta0", d.theta0},
          {"phases", angles(d.phases())}};
}

json to_json(const RealCongruenceDecomposition& d) {
  return {{"T", real_matrix_to_json(d.T)},
          {"kernel_dim", d.kernel_dim},
          {"d_phases", angles(d.d_phases)},
          {"e_block_count", d.e_block_count},
          {"theta0", d.theta0},
          {"phases", angles(d.phases())}};
}

json to_json(const TakagiFactorization& t) {
  std::vector<double> s(t.sigma.data(), t.sigma.data() + t.sigma.size());
  return {{"U", matrix_to_json(t.U)}, {"sigma", s}};
}

json to_json(const Certificate& c) {
  json margins = json::array();
  for (const auto& m : c.margins) {
    margins.push_back({{"omega", omega_to_json(m.omega)}, {"kind", to_string(m.kind)}, {"param", m.param},
                       {"margin", m.margin}});
  }
  json out{{"verdict", to_string(c.verdict)}, {"min_margin", c.min_margin}, {"margins", margins}};
  if (c.violation) {
    out["violation"] = {{"omega", omega_to_json(c.violation->omega)}, {"detail", c.violation->detail}};
  } else {
    out["violation"] = nullptr;
  }
  return out;
}

json to_json(const Membership& m) {
  json out{{"member", m.member}, {"worst_slack", m.worst_slack}, {"reason", m.reason}};
  out["offending_omega"] = m.offending_omega ? omega_to_json(*m.offending_omega) : json(nullptr);
  return out;
}

json to_json(const DestabilizerReport& r) {
  json out{{"H", system_to_json(r.H)},
           {"construction", r.construction},
           {"omega0", omega_to_json(r.omega0)},
           {"sigma_min", r.sigma_min},
           {"pole_distance", r.pole_distance},
           {"ill_posed", r.ill_posed},
           {"membership", to_json(r.membership)}};
  if (r.closed_loop_pole) {
    out["closed_loop_pole"] = {{"re", r.closed_loop_pole->real()}, {"im", r.closed_loop_pole->imag()}};
  } else {
    out["closed_loop_pole"] = nullptr;
  }
  return out;
}

json to_json(const Error& e) { return {{"error", to_string(e.code())}, {"message", e.what()}}; }

}  // namespace phasekit::io
