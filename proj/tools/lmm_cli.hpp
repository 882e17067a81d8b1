#pragma once

// Command-line front end. `run_cli` is separate from main() so tests can drive it.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lmm/lmm.hpp"
#include "lmm/method_json.hpp"

namespace lmm::cli {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string method = "midpoint";
  std::string method_file;
  std::string pair = "inf-spijker";
  std::string n_list;
  std::string norm = "spijker";
  std::string scheme;
  std::string ivp;
  std::string start = "exact";
  std::string out;
  std::string format = "csv";
  std::string dump_matrix;
  double T = 1.0;
  int n = 0;
  double perturbation = 1e-3;
  unsigned seed = 0;
};

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<int> parse_n_list(const std::string& text, const std::vector<int>& fallback) {
  if (text.empty()) return fallback;
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(item, &pos);
      if (pos != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("--n-list: '" + item + "' is not a positive integer");
    }
  }
  if (out.empty()) throw UsageError("--n-list: empty list");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] <= out[i - 1]) throw UsageError("--n-list: values must be strictly increasing");
  }
  return out;
}

inline MultistepMethod load_user_method(const std::string& path) {
  try {
    return load_method_file(path);
  } catch (const Error& e) {
    throw UsageError(std::string("--method-file: ") + e.what());
  }
}

inline MultistepMethod resolve_method(const RunConfig& cfg) {
  if (!cfg.method_file.empty()) return load_user_method(cfg.method_file);
  if (auto m = find_method(cfg.method)) return *m;
  throw UsageError("--method: unknown method '" + cfg.method + "'");
}

inline IVP resolve_ivp(const std::string& name, double T) {
  if (name == "growth") return growth_ivp(T);
  if (name == "decay") return decay_ivp(T);
  if (name == "constant") return constant_rate_ivp(1.0, 0.0, T);
  throw UsageError("--ivp: expected growth, decay or constant, got '" + name + "'");
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline void write_summary(std::ostream& os, const json& summary) { os << "# summary " << summary.dump() << '\n'; }

// ---------------------------------------------------------------------------
// Subcommands

inline json classify_json(const MultistepMethod& m) {
  const auto rs = find_roots(m);
  const auto cls = classify(rs);
  json roots = json::array();
  for (const auto& r : rs.roots) roots.push_back(complex_json(r));
  json boundary = json::array();
  for (const auto& r : cls.boundary_roots) boundary.push_back(complex_json(r));
  return json{{"method", m.name()}, {"roots", roots}, {"boundary_roots", boundary}, {"verdict", to_string(cls.verdict)}};
}

inline void cmd_classify(const RunConfig& cfg, std::ostream& os) {
  os << classify_json(resolve_method(cfg)).dump(2) << '\n';
}

inline void cmd_stability_constant(const RunConfig& cfg, std::ostream& os) {
  const auto m = resolve_method(cfg);
  NormPair pair = NormPair::inf_spijker();
  if (cfg.pair == "inf-inf") {
    pair = NormPair::inf_inf();
  } else if (cfg.pair != "inf-spijker") {
    throw UsageError("--pair: expected inf-inf or inf-spijker, got '" + cfg.pair + "'");
  }
  const auto n_list = parse_n_list(cfg.n_list, {8, 16, 32, 64, 128, 256});
  const auto report = stability_constant_report(m, pair, n_list, cfg.T);

  if (!cfg.dump_matrix.empty()) {
    const auto bundle = make_bundle(m, n_list.back(), cfg.T);
    std::ofstream a(cfg.dump_matrix + "_A.csv"), b(cfg.dump_matrix + "_B.csv");
    if (!a || !b) throw UsageError("--dump-matrix: cannot write '" + cfg.dump_matrix + "_A.csv'");
    write_csv(a, dense_A(bundle));
    write_csv(b, dense_B(bundle));
  }

  if (cfg.format == "json") {
    json rows = json::array();
    for (auto [n, s] : report.rows) rows.push_back({{"n", n}, {"S", s}});
    os << json{{"method", m.name()}, {"pair", pair.label()}, {"T", cfg.T}, {"rows", rows}}.dump(2) << '\n';
    return;
  }
  os << "n,S\n";
  for (auto [n, s] : report.rows) os << n << ',' << fmt_double(s) << '\n';
}

inline json sweep_summary(const RatioSweep& s) {
  return json{{"method", s.method},
              {"xi2", complex_json(s.xi2)},
              {"case", to_string(s.which)},
              {"monotone", s.monotone},
              {"min_ratio", s.min_ratio}};
}

inline void cmd_witness(const RunConfig& cfg, std::ostream& os) {
  const auto m = resolve_method(cfg);
  const auto n_list = parse_n_list(cfg.n_list, {64, 128, 256, 512, 1024, 2048, 4096});
  const auto sweep = ratio_sweep(m, find_roots(m), n_list, cfg.T);
  if (cfg.format == "json") {
    json rows = json::array();
    for (const auto& r : sweep.rows) {
      rows.push_back({{"n", r.n}, {"ratio", r.ratio}, {"image_norm", r.image_spijker_norm}, {"u_inf_norm", r.u_inf_norm}});
    }
    auto doc = sweep_summary(sweep);
    doc["rows"] = rows;
    os << doc.dump(2) << '\n';
    return;
  }
  os << "n,ratio,image_norm,u_inf_norm\n";
  for (const auto& r : sweep.rows) {
    os << r.n << ',' << fmt_double(r.ratio) << ',' << fmt_double(r.image_spijker_norm) << ','
       << fmt_double(r.u_inf_norm) << '\n';
  }
  write_summary(os, sweep_summary(sweep));
}

inline Scheme resolve_scheme(const RunConfig& cfg) {
  const StartRule rule = cfg.start == "rk4" ? StartRule::RK4Bootstrap : StartRule::ExactStart;
  if (cfg.start != "rk4" && cfg.start != "exact") throw UsageError("--start: expected exact or rk4");
  if (cfg.scheme == "alt-euler") return Scheme::alternating_euler(rule);
  if (!cfg.method_file.empty()) return Scheme::lmm(load_user_method(cfg.method_file), rule);
  const std::string name = cfg.scheme.empty() ? cfg.method : cfg.scheme;
  if (auto m = find_method(name)) return Scheme::lmm(*m, rule);
  throw UsageError("--scheme: unknown scheme '" + name + "'");
}

inline void cmd_consistency(const RunConfig& cfg, std::ostream& os) {
  const auto scheme = resolve_scheme(cfg);
  NormKind which = NormKind::KSpijker;
  if (cfg.norm == "inf") {
    which = NormKind::KInf;
  } else if (cfg.norm != "spijker") {
    throw UsageError("--norm: expected inf or spijker, got '" + cfg.norm + "'");
  }
  const auto ivp = resolve_ivp(cfg.ivp.empty() ? "growth" : cfg.ivp, cfg.T);
  const auto n_list = parse_n_list(cfg.n_list, {20, 40, 80, 160, 320});
  if (n_list.size() < 3) throw UsageError("--n-list: consistency needs at least 3 grids");
  const auto est = order_in_norm(scheme, ivp, which, n_list);
  const json summary{{"scheme", scheme.name()}, {"norm", to_string(which)}, {"slope", est.slope}};
  if (cfg.format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < est.step_sizes.size(); ++i) {
      rows.push_back({{"n", est.grid_sizes[i]}, {"h", est.step_sizes[i]}, {"defect_norm", est.defect_norms[i]}});
    }
    auto doc = summary;
    doc["rows"] = rows;
    os << doc.dump(2) << '\n';
    return;
  }
  os << "h,defect_norm\n";
  for (std::size_t i = 0; i < est.step_sizes.size(); ++i) {
    os << fmt_double(est.step_sizes[i]) << ',' << fmt_double(est.defect_norms[i]) << '\n';
  }
  write_summary(os, summary);
}

inline void write_trajectory(std::ostream& os, const RunResult& r, const IVP& ivp) {
  os << "t,u,exact,error\n";
  for (int i = 0; i < r.grid.size(); ++i) {
    const double t = r.grid.t(i), u = r.trajectory.values[i], e = ivp.exact(t);
    os << fmt_double(t) << ',' << fmt_double(u) << ',' << fmt_double(e) << ',' << fmt_double(u - e) << '\n';
  }
}

inline void cmd_integrate(const RunConfig& cfg, std::ostream& os) {
  const auto m = resolve_method(cfg);
  const auto ivp = resolve_ivp(cfg.ivp.empty() ? "decay" : cfg.ivp, cfg.T);
  if (cfg.start != "rk4" && cfg.start != "exact") throw UsageError("--start: expected exact or rk4");
  const auto rule = cfg.start == "rk4" ? StartRule::RK4Bootstrap : StartRule::ExactStart;
  const auto grid = make_grid(m.k(), cfg.n > 0 ? cfg.n : 100, cfg.T);
  const auto run = integrate(m, ivp, grid, rule);
  int max_iters = 0;
  for (int it : run.newton_iters) max_iters = std::max(max_iters, it);
  const double final_error = run.trajectory.values.back() - ivp.exact(cfg.T);
  write_trajectory(os, run, ivp);
  write_summary(os, {{"method", m.name()}, {"n", grid.n}, {"h", grid.h}, {"start", to_string(rule)},
                     {"final_error", final_error}, {"max_newton_iters", max_iters}});
}

inline void cmd_demo_oscillation(const RunConfig& cfg, std::ostream& os) {
  const auto m = resolve_method(cfg);
  const auto ivp = resolve_ivp(cfg.ivp.empty() ? "decay" : cfg.ivp, cfg.T);
  // Default grid: h = 0.05.
  const int n = cfg.n > 0 ? cfg.n : std::max(1, static_cast<int>(std::lround(cfg.T / 0.05)) - m.k() + 1);
  const auto grid = make_grid(m.k(), n, cfg.T);
  const auto demo = oscillation_demo(m, ivp, grid, cfg.perturbation);
  write_trajectory(os, demo.run, ivp);
  write_summary(os, {{"method", m.name()}, {"h", grid.h}, {"perturbation", cfg.perturbation},
                     {"parasitic_amplitude", demo.parasitic_amplitude}});
}

inline json reproduce_report(unsigned seed) {
  json report;
  report["seed"] = seed;

  // Alternating-ramp witness for the midpoint method.
  {
    const auto midpoint = *find_method("midpoint");
    json cases = json::array();
    double worst_image = 0.0, measured = 0.0;
    for (int n : {4, 50, 500}) {
      const auto bundle = make_bundle(midpoint, n);
      const auto u = spijker_witness(n);
      const auto zero = make_trajectory(std::vector<double>(u.values.size(), 0.0), 2);
      const auto zero_f = [](double) { return 0.0; };
      auto diff = apply_F(bundle, zero_f, u);
      const auto f0 = apply_F(bundle, zero_f, zero);
      for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= f0.values[i];
      const double image = norm_kspijker(diff, bundle.grid.h);
      if (std::abs(image - 0.5) >= worst_image) measured = image;
      worst_image = std::max(worst_image, std::abs(image - 0.5));
      cases.push_back({{"n", n}, {"u_norm", norm_kinf(u)}, {"image_norm", image}});
    }
    report["theorem1"] = {{"method", "midpoint"}, {"cases", cases}, {"image_norm", measured},
                          {"max_image_deviation", worst_image}};
  }

  // Witness growth for every weakly stable catalog method, cross-checked by the oracle.
  {
    const std::vector<int> n_list{64, 128, 256, 512, 1024, 2048, 4096};
    json methods = json::object();
    for (const auto& m : catalog()) {
      const auto rs = find_roots(m);
      if (classify(rs).verdict != Verdict::WeaklyStable) continue;
      const auto sweep = ratio_sweep(m, rs, n_list);
      json ratios = json::array();
      for (const auto& r : sweep.rows) ratios.push_back({{"n", r.n}, {"ratio", r.ratio}});
      json oracle = json::array();
      for (int n : {64, 128, 256}) {
        oracle.push_back({{"n", n},
                          {"ratio", weak_witness(m, rs, n).ratio},
                          {"S", stability_constant(make_bundle(m, n), NormPair::inf_spijker())}});
      }
      auto entry = sweep_summary(sweep);
      entry["ratios"] = ratios;
      entry["growth_4096_over_64"] = sweep.rows.back().ratio / sweep.rows.front().ratio;
      entry["oracle"] = oracle;
      methods[m.name()] = entry;
    }
    report["theorem2"] = {{"n_list", n_list}, {"methods", methods}};
  }

  json verdicts = json::object();
  for (const auto& m : catalog()) verdicts[m.name()] = to_string(classify(m).verdict);
  report["classification"] = verdicts;

  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0.0;
    for (const auto& m : catalog()) {
      const auto rs = find_roots(m);
      const auto bundle = make_bundle(m, 200);
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> u(200);
        for (auto& x : u) x = dist(rng);
        worst = std::max(worst, factorization_residual(bundle, rs, u) / sup_norm(u));
      }
    }
    report["factorization"] = {{"n", 200}, {"max_relative_residual", worst}};
  }

  {
    json pairs = json::object();
    for (const auto& pair : {NormPair::inf_inf(), NormPair::inf_spijker()}) {
      json per_method = json::object();
      for (const char* name : {"midpoint", "AB2", "BDF2", "milne"}) {
        const auto m = *find_method(name);
        const double s128 = stability_constant(make_bundle(m, 128), pair);
        const double s256 = stability_constant(make_bundle(m, 256), pair);
        per_method[name] = {{"S128", s128}, {"S256", s256}, {"ratio", s256 / s128}};
      }
      pairs[pair.label()] = per_method;
    }
    report["stability_constants"] = pairs;
  }

  {
    const auto alt = Scheme::alternating_euler();
    const auto ivp = growth_ivp();
    const std::vector<int> n_list{20, 40, 80, 160, 320};
    report["alternating_euler"] = {
        {"inf_slope", order_in_norm(alt, ivp, NormKind::KInf, n_list).slope},
        {"spijker_slope", order_in_norm(alt, ivp, NormKind::KSpijker, n_list).slope}};
  }
  return report;
}

inline void cmd_reproduce(const RunConfig& cfg, std::ostream& os) { os << reproduce_report(cfg.seed).dump(2) << '\n'; }

// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear multistep method stability toolkit", "lmm"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_method = [&](CLI::App* sub) {
    sub->add_option("--method", cfg.method, "Catalog method name");
    sub->add_option("--method-file", cfg.method_file, "JSON file {name, alpha, beta}");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "Output file (default stdout)");
    sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", cfg.seed, "Seed for random probes");
    sub->add_option("--T", cfg.T, "Time horizon")->check(CLI::PositiveNumber);
  };

  auto* classify_cmd = app.add_subcommand("classify", "Roots of rho and root-condition verdict (JSON)");
  add_method(classify_cmd);
  add_common(classify_cmd);

  auto* stab = app.add_subcommand("stability-constant", "Exact stability constants S_n (CSV n,S)");
  add_method(stab);
  add_common(stab);
  stab->add_option("--pair", cfg.pair, "inf-inf or inf-spijker");
  stab->add_option("--n-list", cfg.n_list, "Comma-separated increasing n values");
  stab->add_option("--dump-matrix", cfg.dump_matrix, "Write PREFIX_A.csv and PREFIX_B.csv for the largest n");

  auto* wit = app.add_subcommand("witness", "Instability witness ratios (CSV n,ratio,image_norm,u_inf_norm)");
  add_method(wit);
  add_common(wit);
  wit->add_option("--n-list", cfg.n_list, "Comma-separated increasing n values");

  auto* cons = app.add_subcommand("consistency", "Defect norms and fitted order (CSV h,defect_norm)");
  add_method(cons);
  add_common(cons);
  cons->add_option("--scheme", cfg.scheme, "Catalog method name or alt-euler");
  cons->add_option("--norm", cfg.norm, "inf or spijker");
  cons->add_option("--n-list", cfg.n_list, "Comma-separated increasing n values");
  cons->add_option("--ivp", cfg.ivp, "growth, decay or constant");
  cons->add_option("--start", cfg.start, "exact or rk4");

  auto* integ = app.add_subcommand("integrate", "Run a method (CSV t,u,exact,error)");
  add_method(integ);
  add_common(integ);
  integ->add_option("--n", cfg.n, "Number of computed levels")->check(CLI::PositiveNumber);
  integ->add_option("--ivp", cfg.ivp, "growth, decay or constant");
  integ->add_option("--start", cfg.start, "exact or rk4");

  auto* demo = app.add_subcommand("demo-oscillation", "Perturbed two-step run (CSV t,u,exact,error)");
  add_method(demo);
  add_common(demo);
  demo->add_option("--n", cfg.n, "Number of computed levels (default: h = 0.05)")->check(CLI::PositiveNumber);
  demo->add_option("--ivp", cfg.ivp, "growth, decay or constant");
  demo->add_option("--perturbation", cfg.perturbation, "Offset added to the second start value");

  auto* repro = app.add_subcommand("reproduce", "Full evidence report (JSON)");
  add_common(repro);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  // Default horizon for the oscillation demo.
  if (demo->parsed() && demo->count("--T") == 0) cfg.T = 10.0;

  std::ostringstream buffer;
  try {
    if (classify_cmd->parsed()) cmd_classify(cfg, buffer);
    else if (stab->parsed()) cmd_stability_constant(cfg, buffer);
    else if (wit->parsed()) cmd_witness(cfg, buffer);
    else if (cons->parsed()) cmd_consistency(cfg, buffer);
    else if (integ->parsed()) cmd_integrate(cfg, buffer);
    else if (demo->parsed()) cmd_demo_oscillation(cfg, buffer);
    else if (repro->parsed()) cmd_reproduce(cfg, buffer);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }

  if (cfg.out.empty()) {
    out << buffer.str();
  } else {
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) {
      err << "usage error: --out: cannot open '" << cfg.out << "'\n";
      return kUsage;
    }
    file << buffer.str();
  }
  return kOk;
}

}  // namespace lmm::cli
