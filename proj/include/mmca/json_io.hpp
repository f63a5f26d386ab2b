#ifndef MMCA_JSON_IO_HPP
#define MMCA_JSON_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "mmca/dataset.hpp"
#include "mmca/mmca.hpp"
#include "mmca/selection.hpp"

namespace mmca {

// JSON field names below are part of the CLI contract (format_version 1).

nlohmann::json fit_result_to_json(const FitResult& result, double lambda,
                                  const std::vector<Variable>* variables = nullptr);

/// Rebuild a FitResult from its JSON form (used by the biplot command).
FitResult fit_result_from_json(const nlohmann::json& j);

nlohmann::json qut_result_to_json(const QutResult& result, const QutConfig& config);

nlohmann::json cv_result_to_json(const CvResult& result, int rank, int folds);

/// Write via a temporary file and rename, so failures leave no partial file.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace mmca

#endif  // MMCA_JSON_IO_HPP
