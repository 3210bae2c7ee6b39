// phasekit command-line frontend.
//
// Exit codes: 0 success, 2 condition violated (certify commands),
// 3 certificate inapplicable, 1 error (JSON on stderr).

#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "phasekit/io.hpp"

namespace io = phasekit::io;
using phasekit::ComplexMatrix;
using phasekit::StateSpace;
using phasekit::ToleranceConfig;
using nlohmann::json;

namespace {

struct Options {
  std::string output = "-";
  std::string format;  // tabular commands default to csv
  ToleranceConfig tol;
  std::string in1, in2;
  std::string envelope;
  std::string gain_envelope;
  std::string mode = "symmetric";
  double gamma = 0.0;
  double hint = std::nan("");
  int samples = 256;
  int ppd = 40;
};

void emit(const Options& o, const json& j) { io::write_text(o.output, io::dump(j)); }

ComplexMatrix load_matrix(const std::string& path) { return io::matrix_from_json(io::read_json(path)); }
StateSpace load_system(const std::string& path) { return io::system_from_json(io::read_json(path)); }

json complex_list(const std::vector<phasekit::Complex>& zs) {
  json out = json::array();
  for (const auto& z : zs) out.push_back({{"re", z.real()}, {"im", z.imag()}});
  return out;
}

int matrix_classify(const Options& o) {
  const ComplexMatrix C = load_matrix(o.in1);
  const auto cls = phasekit::classify(C, o.tol);
  json out = io::to_json(cls);
  out["zero_location"] = phasekit::to_string(phasekit::zero_location(C, o.tol));
  if (phasekit::is_semi_sectorial(cls.tag)) {
    out["phases"] = phasekit::phases(C, std::nullopt, o.tol).phases;
  } else {
    out["phases"] = nullptr;
  }
  emit(o, out);
  return 0;
}

int matrix_phases(const Options& o) {
  std::optional<double> hint;
  if (!std::isnan(o.hint)) hint = o.hint;
  emit(o, io::to_json(phasekit::phases(load_matrix(o.in1), hint, o.tol)));
  return 0;
}

int decompose(const Options& o) {
  const ComplexMatrix C = load_matrix(o.in1);
  const auto d = phasekit::decompose(C, o.tol);
  json out = io::to_json(d);
  out["class"] = phasekit::to_string(phasekit::classify(C, o.tol).tag);
  out["residual"] = phasekit::spectral_norm(ComplexMatrix(d.reconstruct() - C));
  emit(o, out);
  return 0;
}

int takagi(const Options& o) {
  emit(o, io::to_json(phasekit::takagi(load_matrix(o.in1), o.tol)));
  return 0;
}

int real_congruence(const Options& o) {
  const ComplexMatrix C = load_matrix(o.in1);
  const auto d = phasekit::real_congruence_decompose(C, o.tol);
  json out = io::to_json(d);
  out["residual"] = phasekit::spectral_norm(ComplexMatrix(d.reconstruct() - C));
  emit(o, out);
  return 0;
}

int numrange(const Options& o) {
  const auto pts = phasekit::boundary_points(load_matrix(o.in1), o.samples);
  if (o.format == "json") {
    emit(o, complex_list(pts));
  } else {
    std::ostringstream os;
    os << "re,im\n";
    for (const auto& z : pts) os << io::fmt(z.real()) << ',' << io::fmt(z.imag()) << '\n';
    io::write_text(o.output, os.str());
  }
  return 0;
}

int sys_info(const Options& o) {
  const StateSpace G = load_system(o.in1);
  json poles = json::array();
  for (const auto& p : phasekit::poles(G, o.tol)) {
    poles.push_back({{"re", p.value.real()}, {"im", p.value.imag()}, {"multiplicity", p.multiplicity},
                     {"semi_simple", p.semi_simple}, {"on_axis", p.on_axis}});
  }
  const auto sc = phasekit::structural_checks(G, o.tol);
  json out{{"order", G.order()},
           {"size", G.size()},
           {"minimal_order", phasekit::minimal_realization(G, o.tol).order()},
           {"poles", poles},
           {"stable", phasekit::is_stable(G, o.tol)},
           {"lyapunov_stable", phasekit::is_lyapunov_stable(G, o.tol)},
           {"symmetric", sc.symmetric},
           {"inner", sc.inner},
           {"frequency_wise_class", phasekit::to_string(sc.frequency_wise_class)},
           {"axis_pole_frequencies", phasekit::axis_pole_frequencies(G, o.tol)},
           {"axis_zero_frequencies", phasekit::axis_zero_frequencies(G, o.tol)}};
  emit(o, out);
  return 0;
}

int phase_response(const Options& o) {
  const StateSpace G = load_system(o.in1);
  phasekit::GridSpec grid;
  grid.points_per_decade = o.ppd;
  const auto contour = phasekit::build_contour(G, std::nullopt, grid, o.tol);
  const auto r = phasekit::phase_response(G, contour, o.tol);
  if (o.format == "json") {
    json samples = json::array();
    for (const auto& s : r.samples) {
      samples.push_back({{"kind", phasekit::to_string(s.point.kind)},
                         {"omega", io::omega_to_json(s.point.omega)},
                         {"param", s.point.param},
                         {"phases", s.phases},
                         {"phi_low", s.phi_low},
                         {"phi_high", s.phi_high},
                         {"gamma", s.gamma},
                         {"class", phasekit::to_string(s.tag)},
                         {"empty", s.empty}});
    }
    emit(o, {{"samples", samples}, {"continuous", r.continuous}});
    return 0;
  }
  std::ostringstream os;
  os << "kind,omega,param,phi_low,phi_high,gamma,class,phases\n";
  for (const auto& s : r.samples) {
    os << phasekit::to_string(s.point.kind) << ',' << io::fmt(s.point.omega) << ',' << io::fmt(s.point.param)
       << ',' << io::fmt(s.phi_low) << ',' << io::fmt(s.phi_high) << ',' << io::fmt(s.gamma) << ','
       << phasekit::to_string(s.tag) << ',';
    for (size_t i = 0; i < s.phases.size(); ++i) os << (i ? ";" : "") << io::fmt(s.phases[i]);
    os << '\n';
  }
  io::write_text(o.output, os.str());
  return 0;
}

int gain_response(const Options& o) {
  const StateSpace G = load_system(o.in1);
  const auto r = phasekit::gain_response(G, phasekit::default_frequency_grid(G, o.ppd));
  if (o.format == "json") {
    json samples = json::array();
    for (const auto& s : r.samples) samples.push_back({{"omega", io::omega_to_json(s.omega)}, {"sigma_max", s.sigma_max}});
    emit(o, {{"samples", samples}});
    return 0;
  }
  std::ostringstream os;
  os << "omega,sigma_max\n";
  for (const auto& s : r.samples) os << io::fmt(s.omega) << ',' << io::fmt(s.sigma_max) << '\n';
  io::write_text(o.output, os.str());
  return 0;
}

int hinf(const Options& o) {
  const auto h = phasekit::hinf_norm(load_system(o.in1), o.tol);
  emit(o, {{"value", h.value}, {"omega", io::omega_to_json(h.omega)}});
  return 0;
}

int phi_inf(const Options& o) {
  const auto p = phasekit::phi_inf_sector(load_system(o.in1), o.tol);
  emit(o, {{"low", p.low}, {"high", p.high}});
  return 0;
}

int verdict_code(phasekit::Verdict v) {
  switch (v) {
    case phasekit::Verdict::CertifiedStable: return 0;
    case phasekit::Verdict::ConditionViolated: return 2;
    case phasekit::Verdict::Inapplicable: return 3;
  }
  return 1;
}

int certify_gain(const Options& o) {
  const auto c = phasekit::certify_small_gain(load_system(o.in1), load_system(o.in2), o.tol);
  emit(o, io::to_json(c));
  return verdict_code(c.verdict);
}

int certify_phase(const Options& o) {
  const StateSpace G = load_system(o.in1);
  const StateSpace H = load_system(o.in2);
  const auto c = phasekit::certify_small_phase(G, H, o.tol);
  json out = io::to_json(c);
  if (!o.envelope.empty()) {
    const auto env = io::phase_envelope_from_json(io::read_json(o.envelope));
    out["membership"] = io::to_json(phasekit::envelope_membership(H, env, false, o.tol));
  }
  emit(o, out);
  return verdict_code(c.verdict);
}

int synthesize(const Options& o) {
  const StateSpace G = load_system(o.in1);
  phasekit::DestabilizerReport r;
  if (o.mode == "gain") {
    phasekit::GainEnvelope env;
    if (!o.gain_envelope.empty()) {
      env = io::gain_envelope_from_json(io::read_json(o.gain_envelope));
    } else if (o.gamma > 0.0) {
      env.constant = o.gamma;
    } else {
      phasekit::fail(phasekit::ErrorCode::InvalidArgument, "gain mode needs --gamma or --gain-envelope");
    }
    r = phasekit::synthesize_destabilizer_gain_symmetric(G, env, o.tol);
  } else {
    if (o.envelope.empty()) phasekit::fail(phasekit::ErrorCode::InvalidArgument, "--envelope is required");
    const auto env = io::phase_envelope_from_json(io::read_json(o.envelope));
    r = o.mode == "inner" ? phasekit::synthesize_destabilizer_inner(G, env, o.tol)
                          : phasekit::synthesize_destabilizer_symmetric(G, env, o.tol);
  }
  emit(o, io::to_json(r));
  return 0;
}

int interconnect(const Options& o) {
  const StateSpace G = load_system(o.in1);
  const StateSpace H = load_system(o.in2);
  const StateSpace cl = phasekit::interconnect(G, H, o.tol);
  std::vector<phasekit::Complex> p;
  for (const auto& q : phasekit::poles(cl, o.tol)) {
    for (int k = 0; k < q.multiplicity; ++k) p.push_back(q.value);
  }
  emit(o, {{"system", io::system_to_json(cl)}, {"stable", phasekit::is_stable(cl, o.tol)}, {"poles", complex_list(p)}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phasekit: matrix phases, LTI phase/gain analysis and small phase/gain feedback tools"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("-o,--output", o.output, "Output path ('-' for stdout)");
  app.add_option("--format", o.format, "Output format for tabular commands")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--rank-tol", o.tol.rank_tol, "Rank decision tolerance");
  app.add_option("--psd-tol", o.tol.psd_tol, "Semi-definiteness tolerance");
  app.add_option("--recon-tol", o.tol.recon_tol, "Reconstruction residual bound");

  std::function<int(const Options&)> action;
  auto add = [&](const char* name, const char* help, int (*fn)(const Options&), int inputs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("input", o.in1, inputs == 2 ? "G system JSON" : "Input JSON")->required();
    if (inputs == 2) sub->add_option("second", o.in2, "H system JSON")->required();
    sub->callback([&action, fn] { action = fn; });
    return sub;
  };
  add("matrix-classify", "Sectoriality class, angle and phases of a matrix", matrix_classify, 1);
  add("matrix-phases", "Phases of a semi-sectorial matrix", matrix_phases, 1)
      ->add_option("--hint", o.hint, "Branch centre hint for the phase center");
  add("decompose", "Generalized sectorial decomposition", decompose, 1);
  add("takagi", "Takagi factorization of a complex symmetric matrix", takagi, 1);
  add("real-congruence", "Real-congruence decomposition of a complex symmetric matrix", real_congruence, 1);
  add("numrange", "Boundary points of the numerical range", numrange, 1)
      ->add_option("--samples", o.samples, "Number of support directions");
  add("sys-info", "Poles, stability and structure of a system", sys_info, 1);
  add("phase-response", "Phase response along the indented imaginary axis", phase_response, 1)
      ->add_option("--ppd", o.ppd, "Grid points per decade");
  add("gain-response", "Largest singular value over frequency", gain_response, 1)
      ->add_option("--ppd", o.ppd, "Grid points per decade");
  add("hinf", "H-infinity norm of a stable system", hinf, 1);
  add("phi-inf", "Phase sector over all frequencies", phi_inf, 1);
  add("certify-gain", "Small gain certificate for G#H", certify_gain, 2);
  add("certify-phase", "Small phase certificate for G#H", certify_phase, 2)
      ->add_option("--envelope", o.envelope, "Phase envelope JSON; adds H membership to the output");
  {
    CLI::App* sub = add("synthesize", "Destabilizing uncertainty for a plant violating the condition", synthesize, 1);
    sub->add_option("--envelope", o.envelope, "Phase envelope JSON");
    sub->add_option("--mode", o.mode, "symmetric, inner or gain")->check(CLI::IsMember({"symmetric", "inner", "gain"}));
    sub->add_option("--gamma", o.gamma, "Constant gain bound (gain mode)");
    sub->add_option("--gain-envelope", o.gain_envelope, "Gain envelope JSON (gain mode)");
  }
  add("interconnect", "Realization and poles of the feedback interconnection", interconnect, 2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "ParseError"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  try {
    o.tol.validate();
    return action(o);
  } catch (const phasekit::Error& e) {
    std::cerr << io::to_json(e).dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "InternalError"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
}
