#include "schatten/config.hpp"

#include <boost/property_tree/ini_parser.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace schatten {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "inf") return kInfinity;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("config " + key + ": expected a number, got '" + raw + "'");
  return v;
}

void collect(const pt::ptree& t, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  for (const auto& [k, child] : t) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (child.empty())
      out.emplace_back(key, child.data());
    else
      collect(child, key, out);
  }
}

lab::InitialData initial_from_config(const Config& cfg) {
  lab::InitialData init;
  init.shape = lab::parse_shape(cfg.text("initial.shape", "packets"));
  init.rank = static_cast<int>(cfg.integer("initial.rank", init.rank));
  init.width = cfg.number("initial.width", init.width);
  init.momentum = cfg.number("initial.momentum", init.momentum);
  init.spread = cfg.number("initial.spread", init.spread);
  const auto mode = cfg.numbers("initial.mode", {1, 0, 0});
  if (mode.empty() || mode.size() > 3) throw std::invalid_argument("config initial.mode: 1 to 3 integers expected");
  init.mode = {0, 0, 0};
  for (std::size_t i = 0; i < mode.size(); ++i) init.mode[i] = static_cast<int>(mode[i]);
  if (init.rank < 0) throw std::invalid_argument("config initial.rank: must be >= 0");
  return init;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  try {
    pt::read_ini(in, c.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const pt::ptree* Config::find(const std::string& key) const {
  used_.insert(key);
  const auto child = tree_.get_child_optional(key);
  return child ? &*child : nullptr;
}

bool Config::has(const std::string& key) const { return tree_.get_child_optional(key).has_value(); }

std::string Config::text(const std::string& key, const std::string& fallback) const {
  const auto* node = find(key);
  return node ? trim(node->data()) : fallback;
}

std::string Config::text(const std::string& key) const {
  const auto* node = find(key);
  if (!node) throw std::invalid_argument("config: missing required key " + key);
  return trim(node->data());
}

double Config::number(const std::string& key, double fallback) const {
  const auto* node = find(key);
  return node ? parse_number(key, node->data()) : fallback;
}

long long Config::integer(const std::string& key, long long fallback) const {
  const auto* node = find(key);
  if (!node) return fallback;
  const std::string s = trim(node->data());
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("config " + key + ": expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t Config::unsigned_integer(const std::string& key, std::uint64_t fallback) const {
  const long long v = integer(key, static_cast<long long>(fallback));
  if (v < 0) throw std::invalid_argument("config " + key + ": must be >= 0");
  return static_cast<std::uint64_t>(v);
}

bool Config::flag(const std::string& key, bool fallback) const {
  const auto* node = find(key);
  if (!node) return fallback;
  const std::string s = trim(node->data());
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("config " + key + ": expected true or false, got '" + s + "'");
}

Rational Config::rational(const std::string& key, const Rational& fallback) const {
  const auto* node = find(key);
  if (!node) return fallback;
  try {
    return parse_rational(node->data());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config " + key + ": " + e.what());
  }
}

std::vector<double> Config::numbers(const std::string& key, const std::vector<double>& fallback) const {
  const auto* node = find(key);
  if (!node) return fallback;
  std::vector<double> out;
  std::stringstream ss(node->data());
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
  return out;
}

void Config::set(const std::string& key, const std::string& value) { tree_.put(key, value); }

void Config::reject_unused() const {
  for (const auto& [key, value] : entries())
    if (!used_.count(key)) throw std::invalid_argument("config: unknown key " + key);
}

std::vector<std::pair<std::string, std::string>> Config::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  collect(tree_, "", out);
  std::sort(out.begin(), out.end());
  return out;
}

lab::ExperimentConfig experiment_from_config(const Config& cfg) {
  lab::ExperimentConfig e;
  e.d = static_cast<int>(cfg.integer("grid.d", e.d));
  e.n = static_cast<int>(cfg.integer("grid.n", e.n));
  e.L = cfg.number("grid.L", e.L);
  e.initial = initial_from_config(cfg);
  e.sigma = cfg.rational("exponents.sigma", e.sigma);
  e.p = cfg.rational("exponents.p", e.p);
  e.q = cfg.rational("exponents.q", e.q);
  e.q_hat = cfg.rational("exponents.q_hat", e.q_hat);
  e.seed = cfg.unsigned_integer("random.seed", e.seed);
  e.family_g = SubgaussianFamily::parse(cfg.text("random.family_g", "gaussian"), derive_stream(e.seed, 0));
  e.family_l = SubgaussianFamily::parse(cfg.text("random.family_l", "gaussian"), derive_stream(e.seed, 1));
  const long long m = cfg.integer("random.samples", static_cast<long long>(e.samples));
  if (m < 0) throw std::invalid_argument("config random.samples: must be >= 1");
  e.samples = static_cast<std::size_t>(m);
  e.r_list = cfg.numbers("random.r", e.r_list);
  e.resamples = cfg.unsigned_integer("random.resamples", e.resamples);
  e.T = cfg.number("time.T", e.T);
  e.steps = cfg.unsigned_integer("time.steps", e.steps);
  e.workers = cfg.unsigned_integer("run.workers", e.workers);
  return e;
}

lab::KeyEstimateConfig key_estimate_from_config(const Config& cfg) {
  lab::KeyEstimateConfig k;
  k.d = static_cast<int>(cfg.integer("grid.d", k.d));
  k.n = static_cast<int>(cfg.integer("grid.n", k.n));
  k.L = cfg.number("grid.L", k.L);
  k.rank = static_cast<int>(cfg.integer("initial.rank", k.rank));
  k.T = cfg.number("time.T", k.T);
  k.steps = cfg.unsigned_integer("time.steps", k.steps);
  k.mu = cfg.rational("key.mu", k.mu);
  k.alpha = cfg.number("key.alpha", k.alpha);
  k.instances = cfg.unsigned_integer("key.instances", k.instances);
  k.seed = cfg.unsigned_integer("random.seed", k.seed);
  k.workers = cfg.unsigned_integer("run.workers", k.workers);
  return k;
}

HartreeSetup hartree_from_config(const Config& cfg) {
  const Grid g = make_grid(static_cast<int>(cfg.integer("grid.d", 1)), static_cast<int>(cfg.integer("grid.n", 32)),
                           cfg.number("grid.L", 20.0));
  HartreeSetup s(g);
  s.background = hartree::make_background(g, cfg.text("background.f", "gaussian"), cfg.number("background.f_amplitude", 1.0),
                                          cfg.text("background.w", "delta"), cfg.number("background.w_strength", 1.0),
                                          cfg.number("background.f_width", 1.0));
  s.initial = initial_from_config(cfg);
  s.seed = cfg.unsigned_integer("random.seed", s.seed);
  s.T = cfg.number("time.T", s.T);
  s.dt = cfg.number("time.dt", s.T / 200.0);
  return s;
}

hartree::PicardOptions picard_from_config(const Config& cfg, const HartreeSetup& setup) {
  hartree::PicardOptions o;
  o.T = setup.T;
  o.dt = setup.dt;
  o.tol = cfg.number("picard.tol", o.tol);
  o.max_iterations = static_cast<int>(cfg.integer("picard.max_iterations", o.max_iterations));
  o.max_halvings = static_cast<int>(cfg.integer("picard.max_halvings", o.max_halvings));
  o.contraction_limit = cfg.number("picard.contraction_limit", o.contraction_limit);
  o.scheme = hartree::parse_scheme(
      cfg.text("picard.scheme", hartree::to_string(hartree::default_scheme(setup.grid.dim()))));
  return o;
}

hartree::LinearizedOptions linearized_from_config(const Config& cfg, const HartreeSetup& setup) {
  hartree::LinearizedOptions o;
  o.T = setup.T;
  o.dt = setup.dt;
  const std::string path = cfg.text("linearized.path", "direct");
  if (path == "direct")
    o.path = hartree::L1Path::direct;
  else if (path == "fourier")
    o.path = hartree::L1Path::fourier;
  else
    throw std::invalid_argument("config linearized.path: expected direct or fourier, got '" + path + "'");
  o.c0 = cfg.number("linearized.c0", o.c0);
  o.reconstruct = cfg.flag("linearized.reconstruct", o.reconstruct);
  o.divergence_limit = cfg.number("linearized.divergence_limit", o.divergence_limit);
  return o;
}

}  // namespace schatten
