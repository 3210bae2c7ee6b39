#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "phasekit/feedback.hpp"
#include "phasekit/phasecore.hpp"
#include "phasekit/symmetric.hpp"

namespace phasekit::io {

using nlohmann::json;

/// Whole file (or stdin for "-") parsed as JSON. IoError / ParseError.
json read_json(const std::string& path);
/// Writes text to the file, or stdout for "-" or an empty path. IoError.
void write_text(const std::string& path, const std::string& text);

/// Copy of j with every floating-point number rounded to `digits` significant
/// digits.
json rounded(const json& j, int digits = 12);
/// rounded(j) pretty-printed with a trailing newline.
std::string dump(const json& j);
/// %.12g formatting for CSV cells.
std::string fmt(double x);

/// Matrices: {"re": [[...]], "im": [[...]]} ("im" optional) or a bare real
/// array of rows.
ComplexMatrix matrix_from_json(const json& j);
RealMatrix real_matrix_from_json(const json& j);
json matrix_to_json(const ComplexMatrix& M);
json real_matrix_to_json(const RealMatrix& M);

/// Systems: {"A", "B", "C", "D"} as real row arrays (A/B/C may be omitted or
/// empty for a static gain), or {"num": [...], "den": [...]} for SISO.
StateSpace system_from_json(const json& j);
json system_to_json(const StateSpace& G);

/// {"points": [{"omega": w | "inf", "alpha": a, "beta": b}, ...]} or
/// {"alpha": a, "beta": b} for a constant envelope.
PhaseEnvelope phase_envelope_from_json(const json& j);
json phase_envelope_to_json(const PhaseEnvelope& env);
/// {"gamma": c} or {"weight": system}.
GainEnvelope gain_envelope_from_json(const json& j);

/// Frequencies serialize as numbers, infinity as the string "inf".
json omega_to_json(double w);
double omega_from_json(const json& j);

json to_json(const SectorialClass& c);
json to_json(const PhaseSector& s);
json to_json(const SectorialDecomposition& d);
json to_json(const RealCongruenceDecomposition& d);
json to_json(const TakagiFactorization& t);
json to_json(const Certificate& c);
json to_json(const Membership& m);
json to_json(const DestabilizerReport& r);
json to_json(const Error& e);

}  // namespace phasekit::io
