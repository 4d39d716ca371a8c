#pragma once

#include "curstat/band.hpp"
#include "curstat/sample.hpp"
#include "curstat/simulation.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace curstat {

/// Whole-string decimal parse; throws InvalidInput otherwise.
double parse_number(std::string_view text);
/// Shortest text that parses back to the same double.
std::string format_number(double value);

enum class DatasetFormat { automatic, raw, aggregated };
DatasetFormat parse_format(std::string_view name);

/// Reads comma- or whitespace-separated rows, either `time,indicator` (raw)
/// or `time,count,positives` (aggregated). Lines starting with '#' are
/// comments, except `# upper=<M>` which sets M. A leading non-numeric row is
/// a header. Malformed rows raise DataError naming the line.
/// `upper` overrides any M found in the file; otherwise M is the largest time.
CurrentStatusSample read_dataset(std::istream& in, DatasetFormat format = DatasetFormat::automatic,
                                 std::optional<double> upper = std::nullopt);
CurrentStatusSample load_dataset(const std::filesystem::path& path,
                                 DatasetFormat format = DatasetFormat::automatic,
                                 std::optional<double> upper = std::nullopt);
/// Aggregated format with an `# upper=` line, so that reading it back
/// reproduces the sample.
void write_dataset(std::ostream& out, const CurrentStatusSample& sample);

/// Columns t, estimate, lower, upper, method, level, fallback.
void write_band(std::ostream& out, const ConfidenceBand& band);
ConfidenceBand read_band(std::istream& in);

/// `# key=value` metadata lines, then t, misses, noncoverage, length rows.
void write_experiment_csv(std::ostream& out, const ExperimentResult& result);
ExperimentResult read_experiment_csv(std::istream& in);
void write_experiment_json(std::ostream& out, const ExperimentResult& result);
ExperimentResult read_experiment_json(std::istream& in);

/// Plain numeric table with a header row.
void write_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<Eigen::VectorXd>& columns);

/// "N" gives i M / N for i = 1..N; otherwise a comma-separated list of points.
/// Every point must lie in [0, M].
Eigen::VectorXd parse_grid(std::string_view spec, double upper);

}  // namespace curstat
