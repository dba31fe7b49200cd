#include "mbgp/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mbgp/error.hpp"
#include "mbgp/format.hpp"

namespace mbgp {

namespace fs = std::filesystem;

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ostream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

bool numbered(const std::string& name, char prefix) {
  if (name.size() < 2 || name[0] != prefix) return false;
  return name.find_first_not_of("0123456789", 1) == std::string::npos;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Reads data rows of a CSV with a known column count.
std::vector<std::vector<std::string>> read_rows(std::istream& in, std::size_t columns, std::string_view what) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != columns)
      throw IoError(std::string(what) + " line " + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                    " fields, found " + std::to_string(cells.size()));
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::string header_line(std::istream& in, std::string_view what) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(std::string(what) + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

} // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

void write_dataset(std::ostream& out, const SpatialDataset& data) {
  const std::size_t d = data.dims();
  const std::size_t p = data.num_coefficients() - 1;
  for (std::size_t k = 0; k < d; ++k) out << 's' << k + 1 << ',';
  out << 'y';
  for (std::size_t k = 0; k < p; ++k) out << ",x" << k + 1;
  out << ",split\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t k = 0; k < d; ++k) out << format_double(data.locations(ii, static_cast<Eigen::Index>(k))) << ',';
    out << format_double(data.y(ii));
    for (std::size_t k = 0; k < p; ++k) out << ',' << format_double(data.X(ii, static_cast<Eigen::Index>(k + 1)));
    const bool test = !data.split.empty() && data.split[i] == Split::test;
    out << ',' << (test ? "test" : "train") << '\n';
  }
}

SpatialDataset read_dataset(std::istream& in) {
  const auto header = split_csv_line(header_line(in, "dataset"));
  std::size_t d = 0;
  while (d < header.size() && header[d] == "s" + std::to_string(d + 1)) ++d;
  if (d == 0) throw IoError("dataset header must start with s1");
  if (d >= header.size() || header[d] != "y") throw IoError("dataset header: expected y after the coordinates");
  std::size_t p = 0;
  while (d + 1 + p < header.size() && header[d + 1 + p] == "x" + std::to_string(p + 1)) ++p;
  const bool has_split = d + 1 + p < header.size() && header[d + 1 + p] == "split";
  const std::size_t columns = d + 1 + p + (has_split ? 1 : 0);
  if (columns != header.size()) {
    const std::string& bad = header[columns];
    throw IoError("dataset header: unexpected column '" + bad + "'" +
                  (numbered(bad, 'x') ? " (covariates must be numbered from x1 in order)" : ""));
  }

  const auto rows = read_rows(in, columns, "dataset");
  if (rows.empty()) throw IoError("dataset has no rows");
  SpatialDataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  data.locations.resize(n, static_cast<Eigen::Index>(d));
  data.y.resize(n);
  data.X.resize(n, static_cast<Eigen::Index>(p + 1));
  if (has_split) data.split.resize(rows.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < d; ++k) data.locations(i, static_cast<Eigen::Index>(k)) = parse_double(r[k], header[k]);
    data.y(i) = parse_double(r[d], "y");
    data.X(i, 0) = 1.0;
    for (std::size_t k = 0; k < p; ++k) data.X(i, static_cast<Eigen::Index>(k + 1)) = parse_double(r[d + 1 + k], header[d + 1 + k]);
    if (has_split) {
      const auto& s = r[d + 1 + p];
      if (s == "train")
        data.split[static_cast<std::size_t>(i)] = Split::train;
      else if (s == "test")
        data.split[static_cast<std::size_t>(i)] = Split::test;
      else
        throw IoError("dataset row " + std::to_string(i + 1) + ": split must be train or test, got '" + s + "'");
    }
  }
  return data;
}

void write_dataset_csv(const fs::path& path, const SpatialDataset& data) {
  auto out = open_out(path);
  write_dataset(out, data);
  finish(out, path);
}

SpatialDataset read_dataset_csv(const fs::path& path) {
  auto in = open_in(path);
  return read_dataset(in);
}

void write_chain(std::ostream& out, const ChainOutput& chain) {
  const std::size_t ncoef = chain.num_coefficients;
  out << "iter";
  for (std::size_t k = 0; k < ncoef; ++k) out << ",beta" << k;
  out << ",sigma2,omega,phi,accepted,batch_size,wall_ms\n";
  for (std::size_t r = 0; r < chain.rows(); ++r) {
    out << r + 1;
    const auto row = chain.draws.row(static_cast<Eigen::Index>(r));
    for (Eigen::Index k = 0; k < row.size(); ++k) out << ',' << format_double(row(k));
    out << ',' << int{chain.accepted[r]} << ',' << chain.batch_size[r] << ',' << format_double(chain.wall_ms[r]) << '\n';
  }
}

ChainTable read_chain(std::istream& in) {
  const auto header = split_csv_line(header_line(in, "chain file"));
  if (header.size() < 8 || header[0] != "iter") throw IoError("chain file header must start with iter");
  std::size_t ncoef = 0;
  while (1 + ncoef < header.size() && header[1 + ncoef] == "beta" + std::to_string(ncoef)) ++ncoef;
  const std::vector<std::string> tail{"sigma2", "omega", "phi", "accepted", "batch_size", "wall_ms"};
  if (ncoef == 0 || header.size() != 1 + ncoef + tail.size()) throw IoError("chain file header has unexpected columns");
  for (std::size_t k = 0; k < tail.size(); ++k)
    if (header[1 + ncoef + k] != tail[k]) throw IoError("chain file header: expected " + tail[k]);

  const auto rows = read_rows(in, header.size(), "chain file");
  if (rows.empty()) throw IoError("chain file has no draws");
  ChainTable t;
  const auto n = static_cast<Eigen::Index>(rows.size());
  t.draws.resize(n, static_cast<Eigen::Index>(ncoef + 3));
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& cells = rows[static_cast<std::size_t>(r)];
    for (std::size_t k = 0; k < ncoef + 3; ++k) t.draws(r, static_cast<Eigen::Index>(k)) = parse_double(cells[1 + k], header[1 + k]);
    t.accepted.push_back(static_cast<int>(parse_integer(cells[ncoef + 4], "accepted")));
    t.batch_size.push_back(parse_double(cells[ncoef + 5], "batch_size"));
    t.wall_ms.push_back(parse_double(cells[ncoef + 6], "wall_ms"));
  }
  return t;
}

void write_chain_csv(const fs::path& path, const ChainOutput& chain) {
  auto out = open_out(path);
  write_chain(out, chain);
  finish(out, path);
}

ChainTable read_chain_csv(const fs::path& path) {
  auto in = open_in(path);
  return read_chain(in);
}

void write_metadata(std::ostream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << k << " = " << v << '\n';
}

Metadata read_metadata(std::istream& in) {
  Metadata meta;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError("metadata line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw IoError("metadata line " + std::to_string(lineno) + ": empty key");
    if (!meta.emplace(key, trim(line.substr(eq + 1))).second)
      throw IoError("metadata line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return meta;
}

void write_metadata_file(const fs::path& path, const Metadata& meta) {
  auto out = open_out(path);
  write_metadata(out, meta);
  finish(out, path);
}

Metadata read_metadata_file(const fs::path& path) {
  auto in = open_in(path);
  return read_metadata(in);
}

void write_predictions(std::ostream& out, const Eigen::MatrixXd& locations, const Eigen::VectorXd& truth,
                       const PredictiveSummary& summary) {
  require(static_cast<std::size_t>(locations.rows()) == summary.size() && truth.size() == locations.rows(),
          "prediction table columns differ in length");
  const auto d = locations.cols();
  for (Eigen::Index k = 0; k < d; ++k) out << 's' << k + 1 << ',';
  out << "truth,mean,sd,lo95,hi95\n";
  for (Eigen::Index i = 0; i < locations.rows(); ++i) {
    for (Eigen::Index k = 0; k < d; ++k) out << format_double(locations(i, k)) << ',';
    out << format_double(truth(i)) << ',' << format_double(summary.mean(i)) << ',' << format_double(summary.sd(i))
        << ',' << format_double(summary.lower(i)) << ',' << format_double(summary.upper(i)) << '\n';
  }
}

void write_predictions_csv(const fs::path& path, const Eigen::MatrixXd& locations, const Eigen::VectorXd& truth,
                           const PredictiveSummary& summary) {
  auto out = open_out(path);
  write_predictions(out, locations, truth, summary);
  finish(out, path);
}

PredictionTable read_predictions(std::istream& in) {
  const auto header = split_csv_line(header_line(in, "predictions file"));
  std::size_t d = 0;
  while (d < header.size() && header[d] == "s" + std::to_string(d + 1)) ++d;
  const std::vector<std::string> tail{"truth", "mean", "sd", "lo95", "hi95"};
  if (header.size() != d + tail.size()) throw IoError("predictions header has unexpected columns");
  for (std::size_t k = 0; k < tail.size(); ++k)
    if (header[d + k] != tail[k]) throw IoError("predictions header: expected " + tail[k]);
  const auto rows = read_rows(in, header.size(), "predictions file");
  if (rows.empty()) throw IoError("predictions file has no rows");
  PredictionTable t;
  const auto n = static_cast<Eigen::Index>(rows.size());
  t.locations.resize(n, static_cast<Eigen::Index>(d));
  t.truth.resize(n);
  t.summary.mean.resize(n);
  t.summary.sd.resize(n);
  t.summary.lower.resize(n);
  t.summary.upper.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = rows[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < d; ++k) t.locations(i, static_cast<Eigen::Index>(k)) = parse_double(c[k], header[k]);
    t.truth(i) = parse_double(c[d], "truth");
    t.summary.mean(i) = parse_double(c[d + 1], "mean");
    t.summary.sd(i) = parse_double(c[d + 2], "sd");
    t.summary.lower(i) = parse_double(c[d + 3], "lo95");
    t.summary.upper(i) = parse_double(c[d + 4], "hi95");
  }
  return t;
}

PredictionTable read_predictions_csv(const fs::path& path) {
  auto in = open_in(path);
  return read_predictions(in);
}

void write_metrics(std::ostream& out, const std::string& label, const PredictionMetrics& m) {
  out << "label,MAE,RPMSE,CRPS,INT,WID,CVG,count\n"
      << label << ',' << format_double(m.mae) << ',' << format_double(m.rpmse) << ',' << format_double(m.crps) << ','
      << format_double(m.interval) << ',' << format_double(m.width) << ',' << format_double(m.coverage) << ','
      << m.count << '\n';
}

} // namespace mbgp
