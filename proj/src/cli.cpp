#include "schatten/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <sstream>

#include "schatten/config.hpp"
#include "schatten/exponents.hpp"
#include "schatten/hartree.hpp"
#include "schatten/record.hpp"
#include "schatten/strichartz.hpp"

namespace schatten::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Invocation {
  std::string config_path;
  std::string out_dir = ".";
  long long seed = -1;
  long long workers = -1;
};

void add_common(CLI::App* sub, Invocation& inv) {
  sub->add_option("--config", inv.config_path, "configuration file (key = value with sections)")->required();
  sub->add_option("--out", inv.out_dir, "output directory");
  sub->add_option("--seed", inv.seed, "master seed (overrides random.seed)");
  sub->add_option("--workers", inv.workers, "worker threads (overrides run.workers)");
}

std::string stem_of(const std::string& command) {
  std::string s = command;
  for (auto& c : s)
    if (c == ' ') c = '-';
  return s;
}

Provenance grid_provenance(const std::string& experiment, std::uint64_t seed, int d, int n, double L, double dt, double T) {
  return {{"experiment", experiment}, {"seed", std::to_string(seed)}, {"d", std::to_string(d)},
          {"n", std::to_string(n)},   {"L", format_double(L)},        {"dt", format_double(dt)},
          {"T", format_double(T)}};
}

/// Runs `body` with the loaded config, writes the run record and maps exceptions to exit codes.
/// `body` writes its outputs and returns the results object; it must call cfg.reject_unused()
/// once every key has been read.
int execute(const std::string& command, const Invocation& inv, std::ostream& out, std::ostream& err,
            const std::function<json(Config&, RunRecord&, const std::string& stem)>& body) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.command = command;
  rec.version = version_string();
  int code = 0;
  Config cfg;
  bool loaded = false;
  try {
    cfg = Config::load(inv.config_path);
    loaded = true;
    if (inv.seed >= 0) cfg.set("random.seed", std::to_string(inv.seed));
    if (inv.workers >= 0) cfg.set("run.workers", std::to_string(inv.workers));
    rec.seed = cfg.unsigned_integer("random.seed", 1);
    // validated for every command; the hartree solvers run serially and ignore it
    cfg.unsigned_integer("run.workers", 1);
    fs::create_directories(inv.out_dir);
    const std::string stem = (fs::path(inv.out_dir) / stem_of(command)).string();
    rec.results = body(cfg, rec, stem);
    if (rec.status.empty()) rec.status = "ok";
    if (rec.status == "numeric-failure") code = 2;
  } catch (const std::invalid_argument& e) {
    rec.status = "validation-error";
    rec.message = e.what();
    err << command << ": " << e.what() << "\n";
    code = 1;
  } catch (const NumericFailure& e) {
    rec.status = "numeric-failure";
    rec.message = e.what();
    err << command << ": numeric failure: " << e.what() << "\n";
    code = 2;
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.message = e.what();
    err << command << ": " << e.what() << "\n";
    code = 1;
  }
  if (loaded) rec.config = cfg.entries();
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!loaded) return code;
  try {
    const std::string path = (fs::path(inv.out_dir) / (stem_of(command) + ".json")).string();
    rec.outputs.push_back(path);
    write_record(path, rec);
    out << "record: " << path << "\n";
  } catch (const std::exception& e) {
    err << command << ": " << e.what() << "\n";
    if (code == 0) code = 1;
  }
  return code;
}

// ---- strichartz ------------------------------------------------------------------------

json strichartz_body(const std::string& kind, Config& cfg, RunRecord& rec, const std::string& stem, std::ostream& out) {
  if (kind == "key") {
    const auto kc = key_estimate_from_config(cfg);
    cfg.reject_unused();
    const auto res = lab::key_estimate_probe(kc);
    std::ostringstream csv;
    const auto prov = grid_provenance("key", kc.seed, kc.d, kc.n, kc.L, kc.T / static_cast<double>(kc.steps), kc.T);
    csv << "instance,ratio,ratio_refined";
    for (const auto& [k, v] : prov) csv << "," << k;
    csv << "\n";
    for (std::size_t i = 0; i < res.ratios.size(); ++i) {
      csv << i << "," << format_double(res.ratios[i]) << "," << format_double(res.ratios_refined[i]);
      for (const auto& [k, v] : prov) csv << "," << v;
      csv << "\n";
    }
    write_text(stem + ".csv", csv.str());
    rec.outputs.push_back(stem + ".csv");
    out << "max ratio " << format_double(res.max_ratio) << " (refined " << format_double(res.max_ratio_refined)
        << "), nu " << format_double(res.nu) << "\n";
    return json{{"max_ratio", res.max_ratio}, {"max_ratio_refined", res.max_ratio_refined}, {"nu", res.nu}};
  }

  auto ec = experiment_from_config(cfg);
  cfg.reject_unused();
  lab::ExperimentResult res;
  if (kind == "singular")
    res = lab::run_singular(ec);
  else if (kind == "full")
    res = lab::run_full(ec);
  else
    res = lab::run_function(ec);
  res.table.provenance = grid_provenance(kind, ec.seed, ec.d, ec.n, ec.L, ec.T / static_cast<double>(ec.steps), ec.T);
  write_text(stem + ".csv", to_csv(res.table));
  rec.outputs.push_back(stem + ".csv");
  out << "slope " << format_double(res.table.fit.slope) << " (95% interval " << format_double(res.table.fit.ci_low)
      << " .. " << format_double(res.table.fit.ci_high) << "), M " << res.table.samples << "\n";
  return json{{"moments", moment_table_json(res.table)},
              {"alpha", res.alpha},
              {"data_norm", res.data_norm},
              {"wrap_ratio", res.wrap_ratio},
              {"T", ec.T},
              {"dt", ec.T / static_cast<double>(ec.steps)}};
}

// ---- hartree ---------------------------------------------------------------------------

json hartree_solve(Config& cfg, RunRecord& rec, const std::string& stem, std::ostream& out) {
  const auto setup = hartree_from_config(cfg);
  const auto opt = picard_from_config(cfg, setup);
  cfg.reject_unused();
  const auto q0 = to_dense(lab::make_initial_operator(setup.grid, setup.initial, setup.seed));
  const auto run = hartree::picard_solve(q0, setup.background, opt);
  const auto prov = grid_provenance("solve", setup.seed, setup.grid.dim(), setup.grid.n(), setup.grid.length(), run.dt, run.T);
  write_text(stem + ".csv", trajectory_csv(run, prov));
  write_text(stem + "-deltas.csv", deltas_csv(run.deltas, prov));
  rec.outputs.push_back(stem + ".csv");
  rec.outputs.push_back(stem + "-deltas.csv");
  double drift = 0.0;
  for (const auto& q : run.q) drift = std::max(drift, hermiticity_defect(q));
  out << "converged at T " << format_double(run.T) << " after " << run.iterations << " iterations ("
      << run.halvings << " halvings)\n";
  return json{{"T", run.T},
              {"dt", run.dt},
              {"iterations", run.iterations},
              {"halvings", run.halvings},
              {"R", run.R},
              {"contraction", hartree::contraction_factor(run.deltas, 1e3 * opt.tol)},
              {"self_adjoint_drift", drift},
              {"scheme", hartree::to_string(opt.scheme)}};
}

json hartree_linearized(Config& cfg, RunRecord& rec, const std::string& stem, std::ostream& out, bool scatter) {
  const auto setup = hartree_from_config(cfg);
  auto opt = linearized_from_config(cfg, setup);
  std::vector<double> ladder;
  double alpha = 0.0;
  double decay = 0.9;
  if (scatter) {
    ladder = cfg.numbers("scatter.ladder", {});
    alpha = cfg.number("scatter.alpha", 0.0);
    decay = cfg.number("scatter.decay_limit", decay);
    if (!cfg.has("linearized.reconstruct")) opt.reconstruct = false;
    if (ladder.size() < 2) throw std::invalid_argument("config scatter.ladder: at least two times required");
  }
  cfg.reject_unused();
  const auto q0 = lab::make_initial_operator(setup.grid, setup.initial, setup.seed);
  const auto lin = hartree::linearized_solve(q0, setup.background, opt);
  const auto prov = grid_provenance(scatter ? "scatter" : "linearized", setup.seed, setup.grid.dim(), setup.grid.n(),
                                    setup.grid.length(), opt.dt, opt.T);
  json res{{"T", opt.T}, {"dt", opt.dt}, {"residual", lin.residual}, {"growth", lin.growth}};
  if (!scatter) {
    write_text(stem + ".csv", trajectory_csv(lin.run, prov));
    rec.outputs.push_back(stem + ".csv");
    out << "residual " << format_double(lin.residual) << ", growth " << format_double(lin.growth) << "\n";
    return res;
  }
  const auto rep = hartree::scattering_diagnostic(lin.run.rho, setup.background, opt.dt, ladder, alpha, decay);
  write_text(stem + ".csv", ladder_csv(rep, prov));
  rec.outputs.push_back(stem + ".csv");
  res["alpha"] = rep.alpha;
  res["worst_ratio"] = rep.worst_ratio;
  res["verdict"] = rep.verdict;
  out << rep.verdict << " (worst ratio " << format_double(rep.worst_ratio) << ")\n";
  return res;
}

json hartree_calibrate(Config& cfg, RunRecord& rec, const std::string& stem, std::ostream& out) {
  const auto setup = hartree_from_config(cfg);
  const auto steps = cfg.unsigned_integer("calibration.steps", 20);
  const auto probes = cfg.unsigned_integer("calibration.probes", 4);
  const double max_residual = cfg.number("calibration.max_residual", 1e-6);
  cfg.reject_unused();
  const auto cal = hartree::calibrate_l1_constant(setup.background, setup.dt, steps, probes, setup.seed, max_residual);
  std::ostringstream csv;
  const auto prov = grid_provenance("calibrate-l1", setup.seed, setup.grid.dim(), setup.grid.n(), setup.grid.length(),
                                    setup.dt, setup.dt * static_cast<double>(steps));
  csv << "c0,imag,residual,probes";
  for (const auto& [k, v] : prov) csv << "," << k;
  csv << "\n"
      << format_double(cal.c0) << "," << format_double(cal.imag) << "," << format_double(cal.residual) << ","
      << cal.probes;
  for (const auto& [k, v] : prov) csv << "," << v;
  csv << "\n";
  write_text(stem + ".csv", csv.str());
  rec.outputs.push_back(stem + ".csv");
  out << "c0 " << format_double(cal.c0) << " (residual " << format_double(cal.residual) << ")\n";
  return json{{"c0", cal.c0}, {"imag", cal.imag}, {"residual", cal.residual}, {"probes", cal.probes}, {"dt", setup.dt}};
}

json hartree_stationarity(Config& cfg, RunRecord&, const std::string&, std::ostream& out) {
  const auto setup = hartree_from_config(cfg);
  const auto probes = cfg.unsigned_integer("stationarity.probes", 256);
  cfg.reject_unused();
  const auto rep = hartree::stationarity_residual(setup.background, probes);
  out << "residual " << format_double(rep.residual) << " (scale " << format_double(rep.scale) << ", " << rep.probes
      << " probes)\n";
  return json{{"residual", rep.residual}, {"scale", rep.scale}, {"probes", rep.probes}};
}

json hartree_pipeline(Config& cfg, RunRecord& rec, const std::string& stem, std::ostream& out) {
  const auto setup = hartree_from_config(cfg);
  hartree::PipelineOptions opt;
  opt.picard = picard_from_config(cfg, setup);
  const std::string kind = cfg.text("random.kind", "singular");
  if (kind == "singular")
    opt.kind = RandomizationKind::singular;
  else if (kind == "full")
    opt.kind = RandomizationKind::full;
  else
    throw std::invalid_argument("config random.kind: expected singular or full, got '" + kind + "'");
  opt.family_g = SubgaussianFamily::parse(cfg.text("random.family_g", "gaussian"), derive_stream(setup.seed, 0));
  opt.family_l = SubgaussianFamily::parse(cfg.text("random.family_l", "gaussian"), derive_stream(setup.seed, 1));
  opt.epsilon = cfg.number("random.epsilon", opt.epsilon);
  const auto draws = cfg.unsigned_integer("random.draws", 20);
  cfg.reject_unused();
  if (draws == 0) throw std::invalid_argument("config random.draws: must be >= 1");
  const auto q0 = lab::make_initial_operator(setup.grid, setup.initial, setup.seed);
  const auto prov = grid_provenance("pipeline", setup.seed, setup.grid.dim(), setup.grid.n(), setup.grid.length(),
                                    setup.dt, setup.T);
  std::ostringstream csv;
  csv << "draw,status,data_norm,T,iterations,halvings";
  for (const auto& [k, v] : prov) csv << "," << k;
  csv << "\n";
  std::size_t completed = 0;
  std::string norm_name;
  for (std::uint64_t draw = 0; draw < draws; ++draw) {
    opt.draw = draw;
    std::string status = "converged";
    double norm = 0.0, T = 0.0;
    int iterations = 0, halvings = 0;
    try {
      const auto res = hartree::randomized_lwp_pipeline(q0, setup.background, opt);
      norm = res.data_norm;
      norm_name = res.data_norm_name;
      T = res.run.T;
      iterations = res.run.iterations;
      halvings = res.run.halvings;
      if (std::isfinite(norm)) ++completed;
      else status = "non-finite";
    } catch (const NumericFailure& e) {
      status = "no-contraction";
    }
    csv << draw << "," << status << "," << format_double(norm) << "," << format_double(T) << "," << iterations << ","
        << halvings;
    for (const auto& [k, v] : prov) csv << "," << v;
    csv << "\n";
  }
  write_text(stem + ".csv", csv.str());
  rec.outputs.push_back(stem + ".csv");
  if (completed != draws) rec.status = "numeric-failure";
  out << completed << "/" << draws << " draws completed (" << norm_name << ")\n";
  return json{{"draws", draws}, {"completed", completed}, {"data_norm_name", norm_name}, {"dt", setup.dt},
              {"T", setup.T}};
}

// ---- check -----------------------------------------------------------------------------

struct CheckArgs {
  int d = 1;
  std::string sigma = "0", p = "2", q = "2", q_hat = "4", alpha = "2", s = "1/2", mu = "4/3";
};

int run_check(const std::string& what, const CheckArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const Rational sigma = parse_rational(a.sigma);
    if (what == "region") {
      const RegionABCD region(a.d, sigma);
      const auto m = region.classify({parse_reciprocal(a.q), parse_reciprocal(a.p)});
      out << "region ABCD (d=" << a.d << ", sigma=" << to_string(sigma) << ") at (1/q, 1/p) = ("
          << to_string(parse_reciprocal(a.q)) << ", " << to_string(parse_reciprocal(a.p)) << "): " << to_string(m)
          << "\n";
    } else if (what == "singular") {
      const auto e = singular_regime_exponents(parse_rational(a.p), parse_rational(a.q), sigma, a.d);
      out << "alpha = " << to_string(e.alpha) << ", r >= " << to_string(e.r_min) << ", " << to_string(e.membership);
      if (e.sharp_defined) out << ", deterministic sharp alpha " << to_string(e.sharp_alpha);
      out << "\n";
    } else if (what == "full") {
      check_full_randomization_exponents(parse_rational(a.p), parse_rational(a.q), parse_rational(a.q_hat), a.d);
      out << "full-randomization exponents admissible\n";
    } else if (what == "function") {
      check_function_randomization_exponents(parse_rational(a.p), parse_rational(a.q), parse_rational(a.q_hat), a.d);
      out << "function-randomization exponents admissible\n";
    } else if (what == "sharp") {
      out << "deterministic sharp alpha = " << to_string(deterministic_sharp_alpha(parse_rational(a.q), a.d)) << "\n";
    } else if (what == "admissible") {
      const auto r = sobolev_schatten_admissible(parse_reciprocal(a.p), parse_reciprocal(a.q),
                                                 parse_reciprocal(a.alpha), parse_rational(a.s), a.d);
      out << "holder " << (r.holder ? "yes" : "no") << ", strict " << (r.strict ? "yes" : "no") << ", scaling "
          << (r.scaling ? "yes" : "no") << ": " << (r.admissible() ? "admissible" : "not admissible") << "\n";
    } else if (what == "key") {
      check_key_estimate_exponents(parse_rational(a.mu), to_double(parse_rational(a.alpha)), a.d);
      out << "key-estimate exponents admissible\n";
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    err << "check " << what << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomized Schatten-class Strichartz and Hartree experiments", "schatten_lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  Invocation inv;
  CheckArgs ca;
  std::vector<std::string> records;
  std::string report_out;

  auto* check = app.add_subcommand("check", "exact exponent arithmetic");
  check->require_subcommand(1);
  for (const char* what : {"region", "singular", "full", "function", "sharp", "admissible", "key"}) {
    auto* c = check->add_subcommand(what, std::string("check ") + what);
    c->add_option("--d", ca.d, "dimension")->check(CLI::Range(1, 3));
    c->add_option("--sigma", ca.sigma);
    c->add_option("--p", ca.p);
    c->add_option("--q", ca.q);
    c->add_option("--q_hat", ca.q_hat);
    c->add_option("--alpha", ca.alpha);
    c->add_option("--s", ca.s);
    c->add_option("--mu", ca.mu);
  }

  auto* strichartz = app.add_subcommand("strichartz", "Monte Carlo moment experiments");
  strichartz->require_subcommand(1);
  for (const auto& [what, help] : std::vector<std::pair<const char*, const char*>>{
           {"singular", "moments of the density norm under coefficient randomization"},
           {"full", "moments under coefficient and Wiener randomization"},
           {"function", "moments for a randomized single function"},
           {"key", "probe of the key estimate against its bound"}})
    add_common(strichartz->add_subcommand(what, help), inv);

  auto* hartree = app.add_subcommand("hartree", "Hartree dynamics around a translation-invariant state");
  hartree->require_subcommand(1);
  for (const auto& [what, help] : std::vector<std::pair<const char*, const char*>>{
           {"solve", "local Picard solve for the perturbation Q"},
           {"linearized", "linearized global solve by causal inversion of 1 + L1"},
           {"scatter", "Cauchy ladder of the wave-operator integrand"},
           {"calibrate-l1", "fit the Fourier-path constant of L1 against the direct path"},
           {"stationarity", "commutator residual of the background state"},
           {"pipeline", "randomized data, data norm and local solve per draw"}})
    add_common(hartree->add_subcommand(what, help), inv);

  auto* calibrate = app.add_subcommand("calibrate-l1", "same as hartree calibrate-l1");
  add_common(calibrate, inv);

  auto* report = app.add_subcommand("report", "aggregate run records");
  report->add_option("records", records, "run record files")->required();
  report->add_option("--out", report_out, "CSV output path (summary goes to stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << version_string() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return 1;
  }

  if (check->parsed()) {
    for (auto* sub : check->get_subcommands()) return run_check(sub->get_name(), ca, out, err);
  }
  if (strichartz->parsed()) {
    const std::string kind = strichartz->get_subcommands().front()->get_name();
    return execute("strichartz " + kind, inv, out, err, [&](Config& cfg, RunRecord& rec, const std::string& stem) {
      return strichartz_body(kind, cfg, rec, stem, out);
    });
  }
  const auto hartree_cmd = [&](const std::string& what) {
    return execute("hartree " + what, inv, out, err, [&](Config& cfg, RunRecord& rec, const std::string& stem) {
      if (what == "solve") return hartree_solve(cfg, rec, stem, out);
      if (what == "linearized") return hartree_linearized(cfg, rec, stem, out, false);
      if (what == "scatter") return hartree_linearized(cfg, rec, stem, out, true);
      if (what == "calibrate-l1") return hartree_calibrate(cfg, rec, stem, out);
      if (what == "stationarity") return hartree_stationarity(cfg, rec, stem, out);
      return hartree_pipeline(cfg, rec, stem, out);
    });
  };
  if (hartree->parsed()) return hartree_cmd(hartree->get_subcommands().front()->get_name());
  if (calibrate->parsed()) return hartree_cmd("calibrate-l1");
  if (report->parsed()) {
    try {
      std::vector<RunRecord> recs;
      for (const auto& path : records) recs.push_back(read_record(path));
      const auto rep = build_report(recs, records);
      if (!report_out.empty()) write_text(report_out, rep.csv);
      else out << rep.csv << "\n";
      out << rep.summary;
      return 0;
    } catch (const std::exception& e) {
      err << "report: " << e.what() << "\n";
      return 1;
    }
  }
  err << app.help();
  return 1;
}

}  // namespace schatten::cli
