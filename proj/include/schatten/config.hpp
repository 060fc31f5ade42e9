#pragma once

#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "schatten/exponents.hpp"
#include "schatten/hartree.hpp"
#include "schatten/strichartz.hpp"

namespace schatten {

/// Sectioned `key = value` configuration. Every key read is recorded so that
/// misspelled keys can be reported instead of silently ignored.
class Config {
 public:
  Config() = default;
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::string text(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  Rational rational(const std::string& key, const Rational& fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;

  /// Sets or replaces a value (command-line overrides).
  void set(const std::string& key, const std::string& value);
  /// Throws std::invalid_argument naming the first key that was never read.
  void reject_unused() const;
  /// section.key -> value, sorted.
  std::vector<std::pair<std::string, std::string>> entries() const;

 private:
  boost::property_tree::ptree tree_;
  mutable std::set<std::string> used_;

  const boost::property_tree::ptree* find(const std::string& key) const;
};

lab::ExperimentConfig experiment_from_config(const Config& cfg);
lab::KeyEstimateConfig key_estimate_from_config(const Config& cfg);

struct HartreeSetup {
  Grid grid;
  hartree::Background background;
  lab::InitialData initial;
  std::uint64_t seed = 1;
  double T = 0.1;
  double dt = 1e-3;

  explicit HartreeSetup(const Grid& g) : grid(g), background(hartree::make_background(g, "zero", 0.0, "zero", 0.0)) {}
};

HartreeSetup hartree_from_config(const Config& cfg);
hartree::PicardOptions picard_from_config(const Config& cfg, const HartreeSetup& setup);
hartree::LinearizedOptions linearized_from_config(const Config& cfg, const HartreeSetup& setup);

}  // namespace schatten
