#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mbgp/model.hpp"
#include "mbgp/predict.hpp"
#include "mbgp/sampler.hpp"
#include "mbgp/scoring.hpp"

namespace mbgp {

/// Dataset CSV: s1..sd, y, x1..xP, split. The intercept column is implied.
void write_dataset(std::ostream& out, const SpatialDataset& data);
SpatialDataset read_dataset(std::istream& in);
void write_dataset_csv(const std::filesystem::path& path, const SpatialDataset& data);
SpatialDataset read_dataset_csv(const std::filesystem::path& path);

/// Posterior draws as stored on disk.
struct ChainTable {
  Eigen::MatrixXd draws; // beta..., sigma2, omega, phi
  std::vector<int> accepted;
  std::vector<double> batch_size;
  std::vector<double> wall_ms;
};

void write_chain(std::ostream& out, const ChainOutput& chain);
ChainTable read_chain(std::istream& in);
void write_chain_csv(const std::filesystem::path& path, const ChainOutput& chain);
ChainTable read_chain_csv(const std::filesystem::path& path);

using Metadata = std::map<std::string, std::string>;

/// key = value lines; '#' starts a comment line.
void write_metadata(std::ostream& out, const Metadata& meta);
Metadata read_metadata(std::istream& in);
void write_metadata_file(const std::filesystem::path& path, const Metadata& meta);
Metadata read_metadata_file(const std::filesystem::path& path);

/// Per-location predictions: s1..sd, truth, mean, sd, lo95, hi95.
void write_predictions(std::ostream& out, const Eigen::MatrixXd& locations, const Eigen::VectorXd& truth,
                       const PredictiveSummary& summary);
void write_predictions_csv(const std::filesystem::path& path, const Eigen::MatrixXd& locations,
                           const Eigen::VectorXd& truth, const PredictiveSummary& summary);

struct PredictionTable {
  Eigen::MatrixXd locations;
  Eigen::VectorXd truth;
  PredictiveSummary summary;
};

PredictionTable read_predictions(std::istream& in);
PredictionTable read_predictions_csv(const std::filesystem::path& path);

/// One header line and one row: label, MAE, RPMSE, CRPS, INT, WID, CVG.
void write_metrics(std::ostream& out, const std::string& label, const PredictionMetrics& m);

/// Splits a CSV line on commas (no quoting; none of the files need it).
std::vector<std::string> split_csv_line(const std::string& line);

} // namespace mbgp
