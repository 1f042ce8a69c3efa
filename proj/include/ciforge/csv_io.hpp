#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ciforge/core.hpp"

namespace ciforge {

// Prediction file: header `sample_id,fold,label,c0,c1,...`, LF line endings,
// scores written with 17 significant digits.
// Truth sidecar: header `config_index,true_auc`.

/// Parses a prediction file into raw rows. Throws InputError with the line
/// number on malformed content.
std::vector<RawRow> parse_prediction_csv(std::istream& in);

/// parse_prediction_csv followed by validate_matrix.
PredictionMatrix read_prediction_csv(const std::filesystem::path& path);

void write_prediction_csv(std::ostream& out, const PredictionMatrix& pm);
void write_prediction_csv(const std::filesystem::path& path,
                          const PredictionMatrix& pm);

std::vector<double> parse_truth_csv(std::istream& in);
std::vector<double> read_truth_csv(const std::filesystem::path& path);

void write_truth_csv(std::ostream& out, std::span<const double> true_auc);
void write_truth_csv(const std::filesystem::path& path,
                     std::span<const double> true_auc);

/// %.17g formatting; round-trips every finite double.
std::string format_double(double value);

}  // namespace ciforge
