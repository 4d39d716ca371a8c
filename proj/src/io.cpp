#include "curstat/io.hpp"

#include "curstat/errors.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace curstat {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  const bool commas = line.find(',') != std::string_view::npos;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t end = commas ? line.find(',', pos) : line.find_first_of(" \t", pos);
    if (end == std::string_view::npos) end = line.size();
    const std::string_view field = trim(line.substr(pos, end - pos));
    if (commas || !field.empty()) out.push_back(field);
    pos = end + 1;
  }
  return out;
}

bool try_parse(std::string_view text, double& value) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(value);
}

[[noreturn]] void data_error(std::size_t line, const std::string& message) {
  throw DataError("line " + std::to_string(line) + ": " + message);
}

std::int64_t parse_count(std::string_view text, std::size_t line, const char* what) {
  double value = 0.0;
  if (!try_parse(text, value) || value != std::floor(value) || std::abs(value) > 9.0e15) {
    data_error(line, std::string(what) + " must be an integer, got '" + std::string(text) + "'");
  }
  return static_cast<std::int64_t>(value);
}

std::string metadata_line(std::string_view key, std::string_view value) {
  return "# " + std::string(key) + "=" + std::string(value) + "\n";
}

// Reads "# key=value" lines and the header row, then the data rows.
struct CsvDocument {
  std::map<std::string, std::string, std::less<>> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvDocument read_csv(std::istream& in) {
  CsvDocument doc;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      const std::string_view body = trim(view.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos) {
        doc.metadata[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
      }
      continue;
    }
    std::vector<std::string> fields;
    for (std::string_view f : split_fields(view)) fields.emplace_back(f);
    if (doc.header.empty()) {
      doc.header = std::move(fields);
    } else {
      if (fields.size() != doc.header.size()) {
        throw DataError("row has " + std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(doc.header.size()));
      }
      doc.rows.push_back(std::move(fields));
    }
  }
  return doc;
}

const std::string& metadata(const CsvDocument& doc, std::string_view key) {
  const auto it = doc.metadata.find(key);
  if (it == doc.metadata.end()) throw DataError("missing metadata '" + std::string(key) + "'");
  return it->second;
}

double parse_field(const std::string& text) {
  double value = 0.0;
  if (!try_parse(text, value)) throw DataError("not a number: '" + text + "'");
  return value;
}

void expect_header(const CsvDocument& doc, std::initializer_list<std::string_view> names) {
  std::vector<std::string> expected(names.begin(), names.end());
  if (doc.header != expected) throw DataError("unexpected column layout");
}

}  // namespace

double parse_number(std::string_view text) {
  double value = 0.0;
  if (!try_parse(text, value)) throw InvalidInput("not a number: '" + std::string(text) + "'");
  return value;
}

std::string format_number(double value) {
  std::array<char, 64> buffer{};
  const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), ptr);
}

DatasetFormat parse_format(std::string_view name) {
  if (name == "auto") return DatasetFormat::automatic;
  if (name == "raw") return DatasetFormat::raw;
  if (name == "aggregated") return DatasetFormat::aggregated;
  throw InvalidInput("unknown format '" + std::string(name) + "' (expected raw or aggregated)");
}

CurrentStatusSample read_dataset(std::istream& in, DatasetFormat format,
                                 std::optional<double> upper) {
  std::vector<double> times;
  std::vector<std::int64_t> weights, positives;
  std::optional<double> file_upper;
  std::size_t columns = format == DatasetFormat::raw ? 2 : format == DatasetFormat::aggregated ? 3 : 0;
  bool seen_row = false;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      const std::string_view body = trim(view.substr(1));
      if (body.starts_with("upper=")) {
        double value = 0.0;
        if (!try_parse(body.substr(6), value)) data_error(number, "malformed upper bound");
        file_upper = value;
      }
      continue;
    }
    const std::vector<std::string_view> fields = split_fields(view);
    double time = 0.0;
    if (!seen_row && !try_parse(fields.front(), time)) {
      seen_row = true;  // header
      if (columns == 0) columns = fields.size();
      continue;
    }
    seen_row = true;
    if (columns == 0) columns = fields.size();
    if (columns != 2 && columns != 3) data_error(number, "expected 2 or 3 columns");
    if (fields.size() != columns) {
      data_error(number, "expected " + std::to_string(columns) + " fields, got " +
                             std::to_string(fields.size()));
    }
    if (!try_parse(fields[0], time) || !(time > 0.0)) {
      data_error(number, "time must be a positive number");
    }
    std::int64_t count = 1;
    std::int64_t ones = 0;
    if (columns == 2) {
      double indicator = 0.0;
      if (!try_parse(fields[1], indicator) || (indicator != 0.0 && indicator != 1.0)) {
        data_error(number, "indicator must be 0 or 1, got '" + std::string(fields[1]) + "'");
      }
      ones = indicator == 1.0 ? 1 : 0;
    } else {
      count = parse_count(fields[1], number, "count");
      ones = parse_count(fields[2], number, "positives");
      if (count <= 0) data_error(number, "count must be positive");
      if (ones < 0 || ones > count) data_error(number, "positives must lie in [0, count]");
    }
    times.push_back(time);
    weights.push_back(count);
    positives.push_back(ones);
  }
  if (times.empty()) throw DataError("dataset has no observations");
  try {
    return CurrentStatusSample::from_counts(times, weights, positives, upper ? upper : file_upper);
  } catch (const InvalidInput& e) {
    throw DataError(e.what());
  }
}

CurrentStatusSample load_dataset(const std::filesystem::path& path, DatasetFormat format,
                                 std::optional<double> upper) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return read_dataset(in, format, upper);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_dataset(std::ostream& out, const CurrentStatusSample& sample) {
  out << metadata_line("upper", format_number(sample.upper()));
  out << "time,count,positives\n";
  for (Eigen::Index j = 0; j < sample.distinct(); ++j) {
    out << format_number(sample.times()(j)) << ',' << sample.weights()(j) << ','
        << sample.positives()(j) << '\n';
  }
}

void write_band(std::ostream& out, const ConfidenceBand& band) {
  out << "t,estimate,lower,upper,method,level,fallback\n";
  const std::string method(to_string(band.method));
  const std::string level = format_number(band.level);
  for (Eigen::Index i = 0; i < band.size(); ++i) {
    const bool flagged = static_cast<std::size_t>(i) < band.fallback.size() &&
                         band.fallback[static_cast<std::size_t>(i)] != 0;
    out << format_number(band.grid(i)) << ',' << format_number(band.estimate(i)) << ','
        << format_number(band.lower(i)) << ',' << format_number(band.upper(i)) << ',' << method
        << ',' << level << ',' << (flagged ? 1 : 0) << '\n';
  }
}

ConfidenceBand read_band(std::istream& in) {
  const CsvDocument doc = read_csv(in);
  expect_header(doc, {"t", "estimate", "lower", "upper", "method", "level", "fallback"});
  if (doc.rows.empty()) throw DataError("band file has no rows");
  const auto g = static_cast<Eigen::Index>(doc.rows.size());
  ConfidenceBand band;
  band.grid.resize(g);
  band.estimate.resize(g);
  band.lower.resize(g);
  band.upper.resize(g);
  band.method = parse_method(doc.rows.front()[4]);
  band.level = parse_field(doc.rows.front()[5]);
  for (Eigen::Index i = 0; i < g; ++i) {
    const auto& row = doc.rows[static_cast<std::size_t>(i)];
    band.grid(i) = parse_field(row[0]);
    band.estimate(i) = parse_field(row[1]);
    band.lower(i) = parse_field(row[2]);
    band.upper(i) = parse_field(row[3]);
    band.fallback.push_back(row[6] == "1" ? 1 : 0);
  }
  return band;
}

void write_experiment_csv(std::ostream& out, const ExperimentResult& result) {
  out << metadata_line("model", result.model) << metadata_line("method", result.method)
      << metadata_line("kernel", result.kernel) << metadata_line("bandwidth", result.bandwidth)
      << metadata_line("n", std::to_string(result.n))
      << metadata_line("simulations", std::to_string(result.simulations))
      << metadata_line("replicates", std::to_string(result.replicates))
      << metadata_line("alpha", format_number(result.alpha))
      << metadata_line("seed", std::to_string(result.seed));
  out << "t,misses,noncoverage,length\n";
  const Eigen::VectorXd rate = result.noncoverage();
  for (Eigen::Index i = 0; i < result.grid.size(); ++i) {
    out << format_number(result.grid(i)) << ',' << result.misses[static_cast<std::size_t>(i)]
        << ',' << format_number(rate(i)) << ',' << format_number(result.mean_length(i)) << '\n';
  }
}

ExperimentResult read_experiment_csv(std::istream& in) {
  const CsvDocument doc = read_csv(in);
  expect_header(doc, {"t", "misses", "noncoverage", "length"});
  ExperimentResult result;
  result.model = metadata(doc, "model");
  result.method = metadata(doc, "method");
  result.kernel = metadata(doc, "kernel");
  result.bandwidth = metadata(doc, "bandwidth");
  result.n = std::stoll(metadata(doc, "n"));
  result.simulations = std::stoi(metadata(doc, "simulations"));
  result.replicates = std::stoi(metadata(doc, "replicates"));
  result.alpha = parse_field(metadata(doc, "alpha"));
  result.seed = std::stoull(metadata(doc, "seed"));
  const auto g = static_cast<Eigen::Index>(doc.rows.size());
  result.grid.resize(g);
  result.mean_length.resize(g);
  for (Eigen::Index i = 0; i < g; ++i) {
    const auto& row = doc.rows[static_cast<std::size_t>(i)];
    result.grid(i) = parse_field(row[0]);
    result.misses.push_back(std::stoll(row[1]));
    result.mean_length(i) = parse_field(row[3]);
  }
  return result;
}

void write_experiment_json(std::ostream& out, const ExperimentResult& result) {
  nlohmann::ordered_json j;
  j["model"] = result.model;
  j["method"] = result.method;
  j["kernel"] = result.kernel;
  j["bandwidth"] = result.bandwidth;
  j["n"] = result.n;
  j["simulations"] = result.simulations;
  j["replicates"] = result.replicates;
  j["alpha"] = result.alpha;
  j["seed"] = result.seed;
  const Eigen::VectorXd rate = result.noncoverage();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < result.grid.size(); ++i) {
    rows.push_back({{"t", result.grid(i)},
                    {"misses", result.misses[static_cast<std::size_t>(i)]},
                    {"noncoverage", rate(i)},
                    {"length", result.mean_length(i)}});
  }
  j["points"] = std::move(rows);
  out << j.dump(2) << '\n';
}

ExperimentResult read_experiment_json(std::istream& in) {
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    ExperimentResult result;
    result.model = j.at("model").get<std::string>();
    result.method = j.at("method").get<std::string>();
    result.kernel = j.at("kernel").get<std::string>();
    result.bandwidth = j.at("bandwidth").get<std::string>();
    result.n = j.at("n").get<std::int64_t>();
    result.simulations = j.at("simulations").get<int>();
    result.replicates = j.at("replicates").get<int>();
    result.alpha = j.at("alpha").get<double>();
    result.seed = j.at("seed").get<std::uint64_t>();
    const auto& rows = j.at("points");
    const auto g = static_cast<Eigen::Index>(rows.size());
    result.grid.resize(g);
    result.mean_length.resize(g);
    for (Eigen::Index i = 0; i < g; ++i) {
      const auto& row = rows.at(static_cast<std::size_t>(i));
      result.grid(i) = row.at("t").get<double>();
      result.misses.push_back(row.at("misses").get<std::int64_t>());
      result.mean_length(i) = row.at("length").get<double>();
    }
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed experiment JSON: ") + e.what());
  }
}

void write_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<Eigen::VectorXd>& columns) {
  if (header.size() != columns.size()) throw InvalidInput("one header per column expected");
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  const Eigen::Index rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& column : columns) {
    if (column.size() != rows) throw InvalidInput("columns differ in length");
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      out << (k ? "," : "") << format_number(columns[k](i));
    }
    out << '\n';
  }
}

Eigen::VectorXd parse_grid(std::string_view spec, double upper) {
  spec = trim(spec);
  if (spec.empty()) throw InvalidInput("grid specification is empty");
  std::vector<double> points;
  if (spec.find_first_of(",.eE") == std::string_view::npos) {
    const double count = parse_number(spec);
    if (count < 1 || count != std::floor(count) || count > 1e7) {
      throw InvalidInput("grid count must be a positive integer");
    }
    const auto n = static_cast<int>(count);
    for (int i = 1; i <= n; ++i) points.push_back(static_cast<double>(i) * upper / count);
  } else {
    for (std::string_view field : split_fields(spec)) points.push_back(parse_number(field));
  }
  for (double t : points) {
    if (!(t >= 0.0 && t <= upper)) {
      throw InvalidInput("grid point " + format_number(t) + " lies outside [0, M]");
    }
  }
  return Eigen::Map<const Eigen::VectorXd>(points.data(), static_cast<Eigen::Index>(points.size()));
}

}  // namespace curstat
