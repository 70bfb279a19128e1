// qslab: command-line front end. Every command reads JSON (file or inline),
// writes one JSON report to stdout, and exits 0 on pass/success verdicts,
// 1 on fail verdicts, 2 on usage or validation errors. Diagnostics go to
// stderr only.

#include <CLI11.hpp>

#include "qslab/qslab.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using namespace qslab;

struct Options {
  std::string command;
  std::string input;
  std::uint64_t seed = 42;
  int samples = 1000;
  bool pretty = false;
};

json load_input(const std::string& arg) {
  if (arg.empty()) throw std::invalid_argument("no --input given");
  if (!arg.empty() && arg.front() == '{') return json::parse(arg);
  std::ifstream in(arg);
  if (!in) throw std::invalid_argument("cannot open input file: " + arg);
  std::stringstream ss;
  ss << in.rdbuf();
  return json::parse(ss.str());
}

json settings_json(const Options& opt) {
  json s;
  s["seed"] = opt.seed;
  s["samples"] = opt.samples;
  s["defaults"] = {{"samples", 1000}, {"seed", 42}};
  s["tolerances"] = {{"quasistate", 1e-7},      {"ad_invariance", 1e-6},
                     {"weyl_vanishing", 1e-8},  {"frame_identity", 1e-8},
                     {"no_mixed", 1e-6},        {"rank_cutoff", 1e-9},
                     {"bracket_respect", 1e-9}};
  return s;
}

FrameFunction frame_from_json(const json& j) {
  const Eigen::Index n = j.at("n").get<Eigen::Index>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero") return zero_frame_function(n);
  if (kind == "squared_norm") return squared_norm_frame_function(n);
  if (kind == "norm") return norm_frame_candidate(n);
  if (kind == "linear" || kind == "linear_real") {
    Eigen::VectorXcd d;
    if (j.contains("direction"))
      d = cvector_from_json(j["direction"]);
    else
      d = Eigen::VectorXcd::Constant(n, std::complex<double>(1.0, 0.0));
    if (d.size() != n)
      throw std::invalid_argument("frame direction length != n");
    return linear_frame_function(d);
  }
  throw std::invalid_argument("unknown frame function kind: " + kind);
}

QuasiState quasistate_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "zeta_alpha_c") {
    AlmostAbelianSpec spec = phi_from_json(j.at("phi"));
    const Eigen::VectorXd alpha = vector_from_json(j.at("alpha"));
    const SublinearFunction c =
        sublinear_from_json(j.value("c", json{{"kind", "zero"}}), spec,
                            spec.rank_phi);
    return zeta_alpha_c(spec, alpha, c, j.value("c0", 0.0));
  }
  if (family == "heisenberg") {
    Eigen::MatrixXd phi2(2, 2);
    phi2 << 0, 1, 0, 0;
    AlmostAbelianSpec spec(phi2);
    const SublinearFunction c =
        sublinear_from_json(j.value("c", json{{"kind", "zero"}}), spec, 1);
    return heisenberg_quasistate(j.value("a", 0.0), c);
  }
  if (family == "gw") {
    const std::string kind = j.at("kind").get<std::string>();
    const double lambda = j.value("lambda", 1.0);
    if (kind == "sl2R") return gw_quasistate(AlgebraKind::sl2R(), lambda);
    if (kind == "su2") return gw_quasistate(AlgebraKind::su2(), lambda);
    if (kind == "un")
      return gw_quasistate(AlgebraKind::un(j.at("n").get<Eigen::Index>()),
                           lambda);
    throw std::invalid_argument("unknown gw kind: " + kind);
  }
  if (family == "motion_ad")
    return motion_ad_quasistate(j.at("n").get<Eigen::Index>(),
                                j.value("lambda", 1.0));
  if (family == "linear") {
    auto g = algebra_from_json(j.at("algebra"));
    return linear_quasistate(g, vector_from_json(j.at("coeffs")));
  }
  if (family == "zero") {
    auto g = algebra_from_json(j.at("algebra"));
    return zero_quasistate(g);
  }
  throw std::invalid_argument("unknown quasi-state family: " + family);
}

int run_classify3d(const Options& opt, json& out) {
  auto g = algebra_from_json(load_input(opt.input));
  out.update(classification_to_json(classify_3d(g)));
  return 0;
}

int run_rigid(const Options& opt, json& out) {
  AlmostAbelianSpec spec = phi_from_json(load_input(opt.input));
  auto verdict = decide_rigidity(spec);
  out.update(rigidity_to_json(verdict));
  if (verdict.witness_chain) {
    out["terminal_label"] =
        classification_to_json(classify_3d(verdict.witness_chain->back().target));
    double worst = 0.0;
    for (const auto& p : *verdict.witness_chain)
      worst = std::max(worst, bracket_respect_residual(p));
    out["witness_bracket_residual"] = worst;
  }
  return 0;
}

int run_check(const Options& opt, json& out, bool ad) {
  auto zeta = quasistate_from_json(load_input(opt.input).at("quasistate"));
  const VerificationReport rep =
      ad ? check_ad_invariance(zeta, opt.samples, opt.seed)
         : check_quasistate(zeta, opt.samples, opt.seed);
  out["family"] = family_name(zeta.family);
  out["params"] = zeta.params;
  out["report"] = rep.to_json();
  return rep.pass ? 0 : 1;
}

int run_heisenberg(const Options& opt, json& out) {
  const json in = load_input(opt.input);
  Eigen::MatrixXd phi2(2, 2);
  phi2 << 0, 1, 0, 0;
  AlmostAbelianSpec spec(phi2);
  const SublinearFunction c =
      sublinear_from_json(in.value("c", json{{"kind", "arctan"}}), spec, 1);
  auto zeta = heisenberg_quasistate(in.value("a", 0.0), c);
  out["params"] = zeta.params;
  if (in.contains("points")) {
    json values = json::array();
    for (const auto& p : in["points"]) {
      const Eigen::VectorXd x = vector_from_json(p);
      if (x.size() != 3)
        throw std::invalid_argument("heisenberg points must be (x, y, z)");
      values.push_back(zeta.eval(x));
    }
    out["values"] = values;
  }
  const auto qs = check_quasistate(zeta, opt.samples, opt.seed);
  const auto ad = check_ad_invariance(zeta, opt.samples, opt.seed);
  out["quasistate_report"] = qs.to_json();
  out["ad_invariance_report"] = ad.to_json();
  return (qs.pass && ad.pass) ? 0 : 1;
}

int run_gw(const Options& opt, json& out) {
  const json in = load_input(opt.input);
  const std::string kind = in.value("kind", std::string("sl2R"));
  const double lambda = in.value("lambda", 1.0);
  QuasiState zeta = quasistate_from_json(
      json{{"family", "gw"}, {"kind", kind}, {"lambda", lambda},
           {"n", in.value("n", Eigen::Index(1))}});
  out["params"] = zeta.params;
  if (in.contains("points")) {
    json values = json::array();
    for (const auto& p : in["points"]) {
      Eigen::VectorXd coords;
      if (kind == "sl2R")
        coords = sl2_coords(matrix_from_json(p));
      else if (kind == "su2")
        coords = su2_coords(cmatrix_from_json(p));
      else
        coords = un_coords(in.at("n").get<Eigen::Index>(), cmatrix_from_json(p));
      values.push_back(zeta.eval(coords));
    }
    out["values"] = values;
  }
  const auto qs = check_quasistate(zeta, opt.samples, opt.seed);
  const auto ad = check_ad_invariance(zeta, opt.samples, opt.seed);
  out["quasistate_report"] = qs.to_json();
  out["ad_invariance_report"] = ad.to_json();
  bool pass = qs.pass && ad.pass;
  if (kind == "sl2R") {
    const auto weyl = weyl_vanishing_check(zeta, std::min(opt.samples, 200), opt.seed);
    out["weyl_vanishing_report"] = weyl.to_json();
    pass = pass && weyl.pass;
  }
  return pass ? 0 : 1;
}

int run_motion(const Options& opt, json& out) {
  const json in = load_input(opt.input);
  const Eigen::Index n = in.at("n").get<Eigen::Index>();
  const double lambda = in.value("lambda", 1.0);
  auto zeta = motion_ad_quasistate(n, lambda);
  out["params"] = zeta.params;
  const auto qs = check_quasistate(zeta, opt.samples, opt.seed);
  const auto ad = check_ad_invariance(zeta, opt.samples, opt.seed);
  out["quasistate_report"] = qs.to_json();
  out["ad_invariance_report"] = ad.to_json();
  bool pass = qs.pass && ad.pass;
  if (n >= 2) {
    const auto nm = no_mixed_decomposition_check(zeta, opt.samples, opt.seed);
    out["no_mixed_report"] = nm.to_json();
    pass = pass && nm.report.pass;
  }
  return pass ? 0 : 1;
}

int run_frame_pipeline(const Options& opt, json& out) {
  const json in = load_input(opt.input);
  const FrameFunction f = frame_from_json(in.at("f"));
  const int steps = in.value("steps", 20);
  const int points = in.value("test_points", 5);
  const auto rep = triviality_pipeline(f, points, steps, opt.seed);
  out["pipeline"] = rep.to_json();
  return rep.frame_identity.pass ? 0 : 1;
}

int run_reconstruct(const Options& opt, json& out) {
  const json in = load_input(opt.input);
  const FrameFunction f = frame_from_json(in.at("f"));
  const MotionElement elem = motion_from_json(in.at("element"));
  const auto data = spectral_data(elem.X);
  out["value"] = reconstruct_with(f, elem.w, data);
  json spectral;
  spectral["lambdas"] = to_json(data.lambdas);
  spectral["l"] = data.l;
  spectral["eigenvectors"] = to_json(data.vectors);
  out["spectral"] = spectral;
  return 0;
}

void emit(const json& out, bool pretty) {
  if (pretty)
    std::cout << out.dump(2) << "\n";
  else
    std::cout << out.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"qslab: numerical laboratory for Lie quasi-states"};
  app.require_subcommand(1);

  const std::vector<std::string> names = {
      "classify3d", "rigid",  "check-qs",       "check-ad",   "heisenberg",
      "gw",         "motion", "frame-pipeline", "reconstruct"};
  const std::vector<std::string> descriptions = {
      "classify a 3-dimensional Lie algebra (table families or simple)",
      "decide rigidity of g_phi and emit the Heisenberg witness chain",
      "verify the quasi-state identity on sampled commuting pairs",
      "verify Ad-invariance along sampled adjoint orbits",
      "evaluate and verify the Heisenberg family c(y/x) x + a y",
      "evaluate and verify the reductive family alpha(Y_c)",
      "verify the unitary motion family i lambda tr(X)",
      "run the sublinear-triviality contraction pipeline",
      "evaluate the spectral reconstruction formula"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto* sub = app.add_subcommand(names[i], descriptions[i]);
    sub->add_option("--input", opt.input, "input file path or inline JSON");
    sub->add_option("--seed", opt.seed, "sampling seed (default 42)");
    sub->add_option("--samples", opt.samples, "sample count (default 1000)");
    sub->add_flag("--pretty", opt.pretty, "indented JSON output");
    bool json_flag = false;
    sub->add_flag("--json", json_flag, "JSON output (default; kept for CI)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    json out;
    out["error"] = e.what();
    emit(out, false);
    std::cerr << e.what() << "\n";
    return 2;
  }

  if (const char* env_seed = std::getenv("QSLAB_SEED")) {
    try {
      opt.seed = std::stoull(env_seed);
    } catch (...) {
      json out;
      out["error"] = "QSLAB_SEED is not an integer";
      emit(out, false);
      std::cerr << "QSLAB_SEED is not an integer\n";
      return 2;
    }
  }

  const auto* sub = app.get_subcommands().front();
  opt.command = sub->get_name();

  json out;
  out["command"] = opt.command;
  out["settings"] = settings_json(opt);
  int code = 2;
  try {
    if (opt.command == "classify3d") code = run_classify3d(opt, out);
    else if (opt.command == "rigid") code = run_rigid(opt, out);
    else if (opt.command == "check-qs") code = run_check(opt, out, false);
    else if (opt.command == "check-ad") code = run_check(opt, out, true);
    else if (opt.command == "heisenberg") code = run_heisenberg(opt, out);
    else if (opt.command == "gw") code = run_gw(opt, out);
    else if (opt.command == "motion") code = run_motion(opt, out);
    else if (opt.command == "frame-pipeline") code = run_frame_pipeline(opt, out);
    else if (opt.command == "reconstruct") code = run_reconstruct(opt, out);
  } catch (const std::exception& e) {
    json err;
    err["command"] = opt.command;
    err["error"] = e.what();
    emit(err, opt.pretty);
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  emit(out, opt.pretty);
  return code;
}
