// sigsar: simulate datasets, run the estimator comparison, summarise results
// and print path signatures.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "sigsar/config.hpp"
#include "sigsar/csv_io.hpp"
#include "sigsar/experiment.hpp"
#include "sigsar/signature.hpp"
#include "sigsar/simgen.hpp"

namespace fs = std::filesystem;
using namespace sigsar;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

void error_line(const std::string& kind, const std::string& message) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  std::cerr << j.dump() << '\n';
}

// model=3,p=2,k=4,rho=0.4
void apply_cell(GridConfig& config, const std::string& spec) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError(fmt::format("--cell entry '{}' is not key=value", item));
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  for (const auto& [key, value] : kv) {
    try {
      if (key == "model")
        config.models = {std::stoi(value)};
      else if (key == "p")
        config.ps = {std::stoi(value)};
      else if (key == "k")
        config.ks = {std::stoi(value)};
      else if (key == "rho")
        config.rhos = {std::stod(value)};
      else
        throw UsageError(fmt::format("--cell key '{}' is not one of model, p, k, rho", key));
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const UsageError*>(&e)) throw;
      throw UsageError(fmt::format("--cell value '{}' for '{}' is not a number", value, key));
    }
  }
}

GridConfig resolve_config(const std::string& config_path, bool full, const std::string& cell,
                          std::optional<std::uint64_t> seed) {
  GridConfig config = config_path.empty() ? GridConfig{} : load_grid_config(config_path);
  if (full) config.make_full();
  if (!cell.empty()) apply_cell(config, cell);
  if (seed) config.master_seed = *seed;
  config.validate();
  return config;
}

int resolve_threads(int flag) {
  if (const char* env = std::getenv("SIGSAR_THREADS"); env && *env) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw UsageError(fmt::format("SIGSAR_THREADS='{}' is not an integer", env));
    }
  }
  return std::max(1, flag);
}

std::string dataset_name(const ExperimentConfig& c, int r) {
  return fmt::format("dataset_m{}_p{}_k{}_rho{}_r{}.csv", c.model, c.p, c.k, c.rho0, r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signature-based spatial autoregressive regression: simulation and benchmark runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string cell;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool full = false;
  bool timing = false;
  int count = 1;

  auto* simulate = app.add_subcommand("simulate", "write simulated datasets as CSV");
  simulate->add_option("--config", config_path, "grid configuration (JSON)")->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "master seed override");
  simulate->add_option("--out-dir", out_dir, "output directory")->required();
  simulate->add_option("--cell", cell, "one cell: model=..,p=..,k=..,rho=..");
  simulate->add_option("--count", count, "replicates per cell to write")->check(CLI::PositiveNumber);
  simulate->add_flag("--full", full, "large grid: p in {2,6,10}, k in {4,8}, 200 replicates");

  auto* run = app.add_subcommand("run", "run the estimator comparison");
  run->add_option("--config", config_path, "grid configuration (JSON)")->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "master seed override");
  run->add_option("--out-dir", out_dir, "output directory (results.csv is resumed if present)")->required();
  run->add_option("--threads", threads, "worker threads (SIGSAR_THREADS overrides)")->check(CLI::PositiveNumber);
  run->add_option("--cell", cell, "one cell: model=..,p=..,k=..,rho=..");
  run->add_flag("--full", full, "large grid: p in {2,6,10}, k in {4,8}, 200 replicates");
  run->add_flag("--timing", timing, "record wall_ms (output is then not reproducible)");

  std::string input;
  std::string output;
  auto* summarize_cmd = app.add_subcommand("summarize", "per cell and method quantiles of a results CSV");
  summarize_cmd->add_option("--input", input, "results.csv")->required()->check(CLI::ExistingFile);
  summarize_cmd->add_option("--out", output, "summary CSV (stdout if omitted)");

  int depth = 0;
  bool basepoint = false;
  bool time_channel = false;
  auto* sig = app.add_subcommand("sig", "print the truncated signature of one path");
  sig->add_option("--input", input, "path CSV (optional leading t column)")->required()->check(CLI::ExistingFile);
  sig->add_option("--depth", depth, "truncation order")->required()->check(CLI::PositiveNumber);
  sig->add_flag("--basepoint", basepoint, "prepend a zero observation");
  sig->add_flag("--time", time_channel, "append time as a channel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    error_line("usage", e.what());
    app.exit(e);
    return 2;
  }

  try {
    if (*simulate) {
      const GridConfig config = resolve_config(config_path, full, cell, seed);
      fs::create_directories(out_dir);
      for (const auto& c : config.cells()) {
        for (int r = 0; r < count; ++r) {
          const auto path = fs::path(out_dir) / dataset_name(c, r);
          std::ofstream out(path, std::ios::binary);
          if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
          write_dataset_csv(out, gen_dataset(c, r));
        }
      }
      return 0;
    }

    if (*run) {
      const GridConfig config = resolve_config(config_path, full, cell, seed);
      fs::create_directories(out_dir);
      const fs::path results_path = fs::path(out_dir) / "results.csv";
      std::vector<ResultRow> rows;
      RunOptions options;
      options.threads = resolve_threads(threads);
      options.timing = timing;
      options.on_error = [](const std::string& msg) { error_line("replicate_failed", msg); };
      if (fs::exists(results_path)) {
        rows = read_results_csv(results_path);
        for (const auto& r : rows) options.skip.insert(row_key(r));
      }
      const TuningOptions tuning = config.tuning();
      for (const auto& c : config.cells()) {
        auto fresh = run_cell(c, config.methods, tuning, options);
        rows.insert(rows.end(), std::make_move_iterator(fresh.begin()), std::make_move_iterator(fresh.end()));
        sort_rows(rows);
        // Checkpoint after every cell so an interrupted run can resume.
        const fs::path tmp = results_path.string() + ".tmp";
        write_results_csv(tmp, rows);
        fs::rename(tmp, results_path);
      }
      return 0;
    }

    if (*summarize_cmd) {
      const auto summary = summarize(read_results_csv(fs::path(input)));
      if (output.empty()) {
        write_summary_csv(std::cout, summary);
      } else {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", output));
        write_summary_csv(out, summary);
      }
      return 0;
    }

    if (*sig) {
      const DiscretePath path = augment_path(read_path_csv(fs::path(input)), {basepoint, time_channel});
      const auto s = path_signature(path, depth);
      const auto words = all_words(path.dim(), depth);
      const auto flat = s.flat();
      std::cout << "word,value\n";
      for (std::size_t i = 0; i < words.size(); ++i)
        std::cout << '"' << word_label(words[i]) << "\"," << format_double(flat[i]) << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    error_line("usage", e.what());
    std::cerr << app.help() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    error_line("invalid_argument", e.what());
    std::cerr << app.help() << '\n';
    return 2;
  } catch (const std::exception& e) {
    error_line("runtime", e.what());
    return 1;
  }
  return 0;
}
