#include "sigsar/csv_io.hpp"

#include <charconv>
#include <limits>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace sigsar {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  out.push_back(field);
  return out;
}

double parse_double(const std::string& s, const char* what) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error(fmt::format("cannot parse {} '{}'", what, s));
  return v;
}

int parse_int(const std::string& s, const char* what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error(fmt::format("cannot parse {} '{}'", what, s));
  return v;
}

bool parse_flag(const std::string& s, const char* what) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw std::runtime_error(fmt::format("{} must be 0 or 1, got '{}'", what, s));
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return {};
  return fmt::format("{}", v);
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.model, r.p, r.k, format_double(r.rho0),
                       r.replicate, r.method, format_double(r.rho_hat), format_double(r.sigma2_hat),
                       format_double(r.test_mse), r.tuning, r.converged ? 1 : 0, opt_double(r.wall_ms),
                       r.failed ? 1 : 0);
  }
}

void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  write_results_csv(out, rows);
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("results CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw std::runtime_error("results CSV has an unexpected header");
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_line(line);
    if (f.size() != 13) throw std::runtime_error(fmt::format("results CSV line {}: expected 13 fields", lineno));
    ResultRow r;
    r.model = parse_int(f[0], "model");
    r.p = parse_int(f[1], "p");
    r.k = parse_int(f[2], "k");
    r.rho0 = parse_double(f[3], "rho0");
    r.replicate = parse_int(f[4], "replicate");
    r.method = f[5];
    r.rho_hat = parse_double(f[6], "rho_hat");
    r.sigma2_hat = parse_double(f[7], "sigma2_hat");
    r.test_mse = parse_double(f[8], "test_mse");
    r.tuning = f[9];
    r.converged = parse_flag(f[10], "converged");
    if (!f[11].empty()) r.wall_ms = parse_double(f[11], "wall_ms");
    r.failed = parse_flag(f[12], "failed");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", path.string()));
  return read_results_csv(in);
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& s : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", s.model, s.p, s.k, format_double(s.rho0),
                       s.method, s.rows, s.failed, format_double(s.rho_median), format_double(s.rho_iqr),
                       format_double(s.mse_median), format_double(s.mse_iqr), format_double(s.mse_mean),
                       format_double(s.convergence_rate), opt_double(s.wall_ms_mean));
  }
}

void write_dataset_csv(std::ostream& out, const SimulatedDataset& data) {
  if (data.empty()) throw std::invalid_argument("write_dataset_csv: empty dataset");
  const int p = data.paths.front().dim();
  const auto n_times = data.paths.front().length();
  out << "unit_id,x,y,Y";
  for (int c = 0; c < p; ++c)
    for (Eigen::Index t = 0; t < n_times; ++t) out << fmt::format(",ch{}_t{}", c, t);
  out << '\n';
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const auto& path = data.paths[static_cast<std::size_t>(i)];
    const auto& pt = data.coords[static_cast<std::size_t>(i)];
    out << fmt::format("{},{},{},{}", data.unit_ids[static_cast<std::size_t>(i)], format_double(pt.x),
                       format_double(pt.y), format_double(data.y(i)));
    for (int c = 0; c < p; ++c)
      for (Eigen::Index t = 0; t < n_times; ++t) out << ',' << format_double(path.values()(t, c));
    out << '\n';
  }
}

DiscretePath read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("path CSV is empty");
  const auto header = split_line(line);
  const bool has_time = !header.empty() && (header[0] == "t" || header[0] == "time");
  const std::size_t first = has_time ? 1 : 0;
  if (header.size() <= first) throw std::runtime_error("path CSV has no value columns");
  const std::size_t p = header.size() - first;

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto f = split_line(line);
    if (f.size() != header.size())
      throw std::runtime_error(fmt::format("path CSV line {}: expected {} fields", lineno, header.size()));
    std::vector<double> row;
    for (const auto& s : f) {
      if (s.empty()) throw std::runtime_error(fmt::format("path CSV line {}: empty field", lineno));
      row.push_back(parse_double(s, "value"));
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p));
  Eigen::VectorXd times(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (has_time) times(static_cast<Eigen::Index>(i)) = rows[i][0];
    for (std::size_t c = 0; c < p; ++c)
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][first + c];
  }
  if (rows.size() < 2) throw std::invalid_argument("a path needs at least two samples");
  return has_time ? DiscretePath(std::move(values), std::move(times)) : DiscretePath::uniform(std::move(values));
}

DiscretePath read_path_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read path file '{}'", path.string()));
  return read_path_csv(in);
}

}  // namespace sigsar
