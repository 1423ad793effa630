#include "sigsar/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace sigsar {

namespace {

using nlohmann::json;

const std::set<std::string> kKeys{"models", "ps",     "ks",          "rhos",    "N",     "grid",
                                  "n_times", "replicates", "master_seed", "split", "methods", "lambda_grid",
                                  "D_max",  "C_max",  "inertia_threshold", "augment_basepoint", "augment_time"};

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("config key '{}': {}", key, e.what()));
  }
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = get_as<T>(j, key);
}

}  // namespace

void GridConfig::make_full() {
  models = {1, 2, 3};
  ps = {2, 6, 10};
  ks = {4, 8};
  rhos = {0.0, 0.2, 0.4, 0.6, 0.8};
  replicates = 200;
}

void GridConfig::validate() const {
  if (models.empty() || ps.empty() || ks.empty() || rhos.empty())
    throw std::invalid_argument("models, ps, ks and rhos must be nonempty");
  if (methods.empty()) throw std::invalid_argument("methods must be nonempty");
  for (double l : lambda_grid)
    if (!(l >= 0.0)) throw std::invalid_argument("lambda_grid entries must be nonnegative");
  if (d_max < 1) throw std::invalid_argument("D_max must be at least 1");
  if (c_max < 1) throw std::invalid_argument("C_max must be at least 1");
  if (!(inertia_threshold > 0.0 && inertia_threshold <= 1.0))
    throw std::invalid_argument("inertia_threshold must lie in (0, 1]");
  for (const auto& c : cells()) c.validate();
}

std::vector<ExperimentConfig> GridConfig::cells() const {
  std::vector<ExperimentConfig> out;
  for (int model : models)
    for (int p : ps)
      for (int k : ks)
        for (double rho : rhos) {
          ExperimentConfig c;
          c.model = model;
          c.p = p;
          c.k = k;
          c.rho0 = rho;
          c.n = n;
          c.grid = grid;
          c.n_times = n_times;
          c.replicates = replicates;
          c.master_seed = master_seed;
          c.split = split;
          c.augment = {augment_basepoint, augment_time};
          c.validate();
          out.push_back(c);
        }
  return out;
}

TuningOptions GridConfig::tuning() const {
  TuningOptions t;
  t.lambda_grid = lambda_grid;
  t.d_max = d_max;
  t.c_max = c_max;
  t.inertia_threshold = inertia_threshold;
  t.augment = {augment_basepoint, augment_time};
  return t;
}

GridConfig parse_grid_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(fmt::format("malformed config JSON: {}", e.what()));
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& item : j.items())
    if (!kKeys.contains(item.key())) throw std::invalid_argument(fmt::format("unknown config key '{}'", item.key()));

  GridConfig c;
  read_opt(j, "models", c.models);
  read_opt(j, "ps", c.ps);
  read_opt(j, "ks", c.ks);
  read_opt(j, "rhos", c.rhos);
  read_opt(j, "N", c.n);
  read_opt(j, "grid", c.grid);
  read_opt(j, "n_times", c.n_times);
  read_opt(j, "replicates", c.replicates);
  read_opt(j, "master_seed", c.master_seed);
  read_opt(j, "lambda_grid", c.lambda_grid);
  read_opt(j, "D_max", c.d_max);
  read_opt(j, "C_max", c.c_max);
  read_opt(j, "inertia_threshold", c.inertia_threshold);
  read_opt(j, "augment_basepoint", c.augment_basepoint);
  read_opt(j, "augment_time", c.augment_time);
  if (j.contains("split")) {
    const auto s = get_as<std::vector<double>>(j, "split");
    if (s.size() != 3) throw std::invalid_argument("config key 'split' needs three fractions");
    c.split = {s[0], s[1], s[2]};
  }
  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto& name : get_as<std::vector<std::string>>(j, "methods")) c.methods.push_back(parse_method(name));
  }
  c.validate();
  return c;
}

GridConfig load_grid_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read config file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_grid_config(buf.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string to_json(const GridConfig& c) {
  json j;
  j["models"] = c.models;
  j["ps"] = c.ps;
  j["ks"] = c.ks;
  j["rhos"] = c.rhos;
  j["N"] = c.n;
  j["grid"] = c.grid;
  j["n_times"] = c.n_times;
  j["replicates"] = c.replicates;
  j["master_seed"] = c.master_seed;
  j["split"] = {c.split.train, c.split.validation, c.split.test};
  std::vector<std::string> names;
  for (Method m : c.methods) names.emplace_back(method_name(m));
  j["methods"] = names;
  j["lambda_grid"] = c.lambda_grid;
  j["D_max"] = c.d_max;
  j["C_max"] = c.c_max;
  j["inertia_threshold"] = c.inertia_threshold;
  j["augment_basepoint"] = c.augment_basepoint;
  j["augment_time"] = c.augment_time;
  return j.dump(2);
}

}  // namespace sigsar
