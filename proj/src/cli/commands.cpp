#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gibbs/cli.hpp"

namespace gibbs::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir);
}

std::string write_text(const std::string& dir, const std::string& name, const std::string& text) {
  fs::path p = fs::path(dir) / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
  return p.string();
}

json base_report(const json& cfg) {
  return {{"command", cfg.at("command")}, {"config", cfg}, {"config_hash", config_hash(cfg)}, {"status", "ok"}};
}

void finish(RunResult& res, const std::string& dir) {
  res.files.push_back(
      write_text(dir, res.report.at("command").get<std::string>() + "_report.json", res.report.dump(2) + "\n"));
}

void fail(RunResult& res, const std::exception& e) {
  res.exit_code = kExitNumerical;
  res.report["status"] = "numerical_failure";
  res.report["error"] = e.what();
}

std::string index_name(const std::string& stem, std::size_t i, std::size_t n) {
  int width = std::max(2, static_cast<int>(std::to_string(n > 0 ? n - 1 : 0).size()));
  std::string s = std::to_string(i);
  return stem + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s +
         ".csv";
}

double chord_deviation(const std::vector<std::array<double, 2>>& pts) {
  if (pts.size() < 3) return 0.0;
  auto a = pts.front(), b = pts.back();
  double dx = b[0] - a[0], dy = b[1] - a[1];
  double len = std::hypot(dx, dy);
  double worst = 0.0;
  for (const auto& p : pts) {
    double d = len > 0.0 ? std::abs(dx * (p[1] - a[1]) - dy * (p[0] - a[0])) / len
                         : std::hypot(p[0] - a[0], p[1] - a[1]);
    worst = std::max(worst, d);
  }
  return worst;
}

double relative_drift(const std::vector<double>& energy) {
  double e0 = energy.front();
  double scale = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;
  double worst = 0.0;
  for (double e : energy) worst = std::max(worst, std::abs(e - e0) / scale);
  return worst;
}

json markov_path_json(const GeodesicPath& p) {
  return {{"reason", to_string(p.reason)},
          {"samples", p.times.size()},
          {"t_end", p.times.back()},
          {"end", {p.states.back().r, p.states.back().s}},
          {"max_error_estimate", p.max_error_estimate},
          {"halvings", p.halvings},
          {"final_step", p.final_step},
          {"energy_drift", relative_drift(p.energy)}};
}

std::string markov_csv(const GeodesicPath& p) {
  std::string out = "t,r,s,dr,ds,energy\n";
  for (std::size_t i = 0; i < p.times.size(); ++i) {
    const auto& y = p.states[i];
    out += fmt17(p.times[i]) + "," + fmt17(y.r) + "," + fmt17(y.s) + "," + fmt17(y.dr) + "," + fmt17(y.ds) + "," +
           fmt17(p.energy[i]) + "\n";
  }
  return out;
}

std::string submanifold_csv(const SubmanifoldPath& p, int m) {
  std::string out = "t";
  for (int i = 1; i <= m; ++i) out += ",c" + std::to_string(i);
  for (int i = 1; i <= m; ++i) out += ",v" + std::to_string(i);
  out += ",energy\n";
  for (std::size_t k = 0; k < p.times.size(); ++k) {
    out += fmt17(p.times[k]);
    for (int i = 0; i < m; ++i) out += "," + fmt17(p.coords[k][i]);
    for (int i = 0; i < m; ++i) out += "," + fmt17(p.velocities[k][i]);
    out += "," + fmt17(p.energy[k]) + "\n";
  }
  return out;
}

json potential_json(const Potential& a) {
  return {{"alphabet", a.alphabet()}, {"depth", a.depth()}, {"values", a.function().values()}};
}

bool is_bernoulli(const StochasticMatrix& p) {
  for (int i = 1; i < p.size(); ++i)
    for (int j = 0; j < p.size(); ++j)
      if (p(i, j) != p(0, j)) return false;
  return true;
}

}  // namespace

RunResult run_geodesic(const json& cfg, const std::string& out_dir) {
  GeodesicJob job = parse_geodesic(cfg);
  ensure_dir(out_dir);
  RunResult res;
  res.report = base_report(cfg);
  json paths = json::array();
  double max_chord = 0.0;
  try {
    if (job.integrator == Integrator::submanifold) {
      SubmanifoldChart chart = markov_chart(job.r, job.s, job.chart_bound);
      SubmanifoldOptions so;
      so.unit_speed = job.unit_speed;
      so.sample_every = job.sample_every;
      Eigen::VectorXd t0 = Eigen::VectorXd::Zero(chart.dimension());
      for (std::size_t i = 0; i < job.angles.size(); ++i) {
        Eigen::VectorXd v0(2);
        v0 << std::cos(job.angles[i]), std::sin(job.angles[i]);
        SubmanifoldPath p = integrate_submanifold_geodesic(chart, t0, v0, job.t_max, job.step, so);
        std::vector<std::array<double, 2>> trace;
        for (const auto& c : p.coords) trace.push_back(markov_coordinates(chart.point(c)));
        double dev = chord_deviation(trace);
        max_chord = std::max(max_chord, dev);
        std::string name = index_name("geodesic_", i, job.angles.size());
        res.files.push_back(write_text(out_dir, name, submanifold_csv(p, chart.dimension())));
        paths.push_back({{"index", i},
                         {"angle", job.angles[i]},
                         {"file", name},
                         {"reason", to_string(p.reason)},
                         {"samples", p.times.size()},
                         {"t_end", p.times.back()},
                         {"end", {trace.back()[0], trace.back()[1]}},
                         {"step", p.step},
                         {"refinements", p.refinements},
                         {"energy_drift", p.energy_drift},
                         {"chord_deviation", dev}});
      }
    } else {
      MarkovIntegrationOptions mo;
      mo.tol = job.tolerance;
      mo.h_min = job.min_step;
      mo.sample_every = job.sample_every;
      mo.model = job.integrator == Integrator::closed_form ? MarkovModel::closed_form : MarkovModel::levi_civita;
      for (std::size_t i = 0; i < job.angles.size(); ++i) {
        GeodesicState s0 = markov_initial_state(job.r, job.s, job.angles[i], job.unit_speed);
        GeodesicPath p = integrate_markov_geodesic(s0, job.t_max, job.step, mo);
        std::vector<std::array<double, 2>> trace;
        for (const auto& y : p.states) trace.push_back({y.r, y.s});
        double dev = chord_deviation(trace);
        max_chord = std::max(max_chord, dev);
        std::string name = index_name("geodesic_", i, job.angles.size());
        res.files.push_back(write_text(out_dir, name, markov_csv(p)));
        json entry = markov_path_json(p);
        entry["index"] = i;
        entry["angle"] = job.angles[i];
        entry["file"] = name;
        entry["chord_deviation"] = dev;
        paths.push_back(entry);
      }
    }
  } catch (const NumericalError& e) {
    fail(res, e);
  } catch (const std::domain_error& e) {
    fail(res, e);
  }
  res.report["results"] = {{"paths", paths}, {"max_chord_deviation", max_chord}};
  res.report["tolerances"] = {{"step", job.step},
                              {"tolerance", job.tolerance},
                              {"min_step", job.min_step},
                              {"domain_margin", kDomainMargin}};
  res.report["checks"] = {{"completed", res.exit_code == kExitOk}, {"non_straight", max_chord > 1e-3}};
  finish(res, out_dir);
  return res;
}

RunResult run_divergence(const json& cfg, const std::string& out_dir) {
  DivergenceJob job = parse_divergence(cfg);
  ensure_dir(out_dir);
  RunResult res;
  res.report = base_report(cfg);
  res.report["tolerances"] = {{"oracle", job.oracle_tolerance},
                              {"identity", job.identity_tolerance},
                              {"oracle_h1", job.oracle.h1},
                              {"oracle_h2", job.oracle.h2},
                              {"depth", job.depth}};
  try {
    DivergenceReport rep = defects(job.jacobians[0], job.jacobians[1], job.jacobians[2], job.depth, job.oracle);
    json derivs = json::array();
    bool all_pass = true;
    const FormulaValue* second0 = nullptr;
    for (const auto& d : rep.derivatives) {
      bool pass = d.relative_error <= job.oracle_tolerance;
      all_pass = all_pass && pass;
      if (d.name == "second_j_at_0") second0 = &d;
      derivs.push_back({{"name", d.name},
                        {"closed_form", d.closed_form},
                        {"oracle", d.oracle},
                        {"relative_error", d.relative_error},
                        {"pass", pass}});
    }
    json results = {
        {"depth", rep.depth},
        {"kl", rep.kl},
        {"pythagorean",
         {{"type1", rep.pythagorean_type1},
          {"type1_from_kl", rep.pythagorean_type1_from_kl},
          {"type2", rep.pythagorean_type2},
          {"type2_from_kl", rep.pythagorean_type2_from_kl}}},
        {"triangle", {{"type1", rep.triangle_type1}, {"type2", rep.triangle_type2}}},
        {"derivatives", derivs},
        {"regime", to_string(rep.regime)},
        {"oracle_regime", to_string(rep.oracle_regime)}};
    json checks = {
        {"oracle_agreement", all_pass},
        {"type1_consistency",
         std::abs(rep.pythagorean_type1 - rep.pythagorean_type1_from_kl) <= job.identity_tolerance},
        {"type2_consistency",
         std::abs(rep.pythagorean_type2 - rep.pythagorean_type2_from_kl) <= job.identity_tolerance}};
    if (job.matrices && is_bernoulli((*job.matrices)[0]) && is_bernoulli((*job.matrices)[1]) &&
        is_bernoulli((*job.matrices)[2])) {
      double cf = bernoulli_three_way((*job.matrices)[0](0, 0), (*job.matrices)[1](0, 0), (*job.matrices)[2](0, 0));
      double dv = second0->closed_form;
      double df = rep.pythagorean_type1;
      double dev = std::max({std::abs(dv - df), std::abs(dv - cf), std::abs(df - cf)});
      results["three_way"] = {{"derivative", dv}, {"defect", df}, {"closed_form", cf}, {"max_deviation", dev}};
      checks["three_way_identity"] = dev <= job.identity_tolerance;
    }
    if (!job.references.empty()) {
      json refs = json::array();
      for (double v : job.references)
        refs.push_back({{"value", v},
                        {"closed_form_match", std::abs(second0->closed_form - v) <= job.reference_tolerance},
                        {"oracle_match", std::abs(second0->oracle - v) <= job.reference_tolerance}});
      results["second_j_at_0_references"] = refs;
      res.report["tolerances"]["reference"] = job.reference_tolerance;
    }
    res.report["results"] = results;
    res.report["checks"] = checks;
    if (!all_pass) {
      res.exit_code = kExitNumerical;
      res.report["status"] = "oracle_mismatch";
    }
  } catch (const NumericalError& e) {
    fail(res, e);
  } catch (const std::domain_error& e) {
    fail(res, e);
  }
  finish(res, out_dir);
  return res;
}

RunResult run_basis(const json& cfg, const std::string& out_dir) {
  BasisJob job = parse_basis(cfg);
  BasisFamily fam;
  try {
    fam = build_family(job.kind, job.source, job.n_max);
  } catch (const std::length_error& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  ensure_dir(out_dir);
  RunResult res;
  res.report = base_report(cfg);
  res.report["tolerances"] = {{"gram", job.tolerance}, {"kernel", job.tolerance}};
  try {
    FamilyVerification v = verify_family(fam);
    std::string csv = "label,depth,values,c0_norm,l2_norm,kernel_residual\n";
    bool exact_pm1 = true;
    for (std::size_t i = 0; i < fam.elements.size(); ++i) {
      const auto& e = fam.elements[i];
      csv += e.label + "," + std::to_string(e.f.depth());
      for (double x : e.f.values()) {
        csv += "," + fmt17(x);
        exact_pm1 = exact_pm1 && (x == 1.0 || x == -1.0);
      }
      double kr = apply_ruelle(fam.log_j, e.f).sup_norm();
      csv += "," + fmt17(v.bounds.sup_norms[i]) + "," + fmt17(v.bounds.l2_norms[i]) + "," + fmt17(kr) + "\n";
    }
    std::string name = "basis_" + to_string(job.kind) + ".csv";
    res.files.push_back(write_text(out_dir, name, csv));
    json checks = {{"gram", v.gram_deviation <= job.tolerance}};
    if (is_kernel_kind(job.kind)) checks["kernel"] = v.kernel_residual <= job.tolerance;
    if (job.kind == BasisKind::maxent_alpha || job.kind == BasisKind::maxent_beta) checks["exact_pm1"] = exact_pm1;
    res.report["results"] = {{"kind", to_string(job.kind)},
                             {"elements", fam.elements.size()},
                             {"file", name},
                             {"log_j", potential_json(fam.log_j)},
                             {"gram_deviation", v.gram_deviation},
                             {"orthogonality_deviation", v.orthogonality_deviation},
                             {"kernel_residual", v.kernel_residual},
                             {"alpha_hat", v.bounds.alpha_hat},
                             {"beta_hat", v.bounds.beta_hat}};
    res.report["checks"] = checks;
  } catch (const NumericalError& e) {
    fail(res, e);
  }
  finish(res, out_dir);
  return res;
}

RunResult run_project(const json& cfg, const std::string& out_dir) {
  ProjectJob job = parse_project(cfg);
  ensure_dir(out_dir);
  RunResult res;
  res.report = base_report(cfg);
  res.report["tolerances"] = {{"certificate", job.options.certificate_tol},
                              {"line", job.options.line_tol},
                              {"depth", job.problem.depth}};
  try {
    SimplexResult r = project_simplex(job.problem, job.options);
    res.report["results"] = {{"weights", r.weights},
                             {"value", r.value},
                             {"optimum", potential_json(r.optimum)},
                             {"directional", r.directional},
                             {"directional_fd", r.directional_fd},
                             {"start", r.start},
                             {"iterations", r.iterations},
                             {"on_boundary", r.on_boundary}};
    json checks = {{"certificate", r.certificate}, {"certificate_fd", r.certificate_fd}};
    if (job.problem.mode == Mode::max) checks["boundary"] = r.on_boundary;
    res.report["checks"] = checks;
  } catch (const NumericalError& e) {
    fail(res, e);
  } catch (const std::domain_error& e) {
    fail(res, e);
  }
  finish(res, out_dir);
  return res;
}

RunResult run(const Invocation& inv) {
  json cfg = effective_config(inv);
  if (inv.command == "geodesic") return run_geodesic(cfg, inv.out_dir);
  if (inv.command == "divergence") return run_divergence(cfg, inv.out_dir);
  if (inv.command == "basis") return run_basis(cfg, inv.out_dir);
  if (inv.command == "project") return run_project(cfg, inv.out_dir);
  throw ConfigError("unknown command '" + inv.command + "'");
}

int main(int argc, char** argv) {
  CLI::App app{"Gibbs measure geometry toolkit"};
  app.require_subcommand(1);
  Invocation inv;
  std::string config, preset_name;
  int depth = 0;
  std::uint64_t seed = 0;
  const std::pair<const char*, const char*> commands[] = {
      {"geodesic", "integrate a fan of geodesics on the Markov surface"},
      {"divergence", "KL divergences, Pythagorean defects and derivative checks for a triple"},
      {"basis", "build and verify a Haar-type basis family"},
      {"project", "KL projection onto a simplex of Jacobians"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON job configuration");
    sub->add_option("--preset", preset_name, "figure-1, figure-2, mama or bernoulli");
    sub->add_option("--out", inv.out_dir, "output directory");
    sub->add_option("--depth", depth, "working depth override")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for randomized commands");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    inv.command = sub->get_name();
    if (sub->count("--config")) inv.config_path = config;
    if (sub->count("--preset")) inv.preset = preset_name;
    if (sub->count("--depth")) inv.depth = depth;
    if (sub->count("--seed")) inv.seed = seed;
  }
  try {
    RunResult res = run(inv);
    std::cout << res.report.dump(2) << "\n";
    return res.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace gibbs::cli
