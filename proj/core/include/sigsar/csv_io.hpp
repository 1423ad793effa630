#pragma once

// CSV schemas for results, summaries, datasets and single paths.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sigsar/experiment.hpp"
#include "sigsar/signature.hpp"
#include "sigsar/simgen.hpp"

namespace sigsar {

inline constexpr const char* kResultsHeader =
    "model,p,k,rho0,replicate,method,rho_hat,sigma2_hat,test_mse,tuning,converged,wall_ms,failed";
inline constexpr const char* kSummaryHeader =
    "model,p,k,rho0,method,rows,failed,rho_median,rho_iqr,mse_median,mse_iqr,mse_mean,convergence_rate,wall_ms_mean";

/// Shortest round-trip representation; NaN is written as an empty field.
std::string format_double(double v);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
/// Throws std::runtime_error on a wrong header or malformed line.
std::vector<ResultRow> read_results_csv(std::istream& in);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// `unit_id,x,y,Y,ch0_t0..ch{p-1}_t{n-1}`, one row per unit, channel-major.
void write_dataset_csv(std::ostream& out, const SimulatedDataset& data);

/// A path table with a header line. A leading column named `t` or `time`
/// supplies the sample times; otherwise times are equally spaced on [0, 1].
DiscretePath read_path_csv(std::istream& in);
DiscretePath read_path_csv(const std::filesystem::path& path);

}  // namespace sigsar
