#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>

#include "hofd/hogs.hpp"
#include "hofd/indices.hpp"
#include "hofd/pipeline.hpp"
#include "hofd/regression.hpp"

namespace hofd {

// FNV-1a over raw bytes; used to fingerprint samples and basis bundles so a
// persisted basis is only reused against the data it was built from.
std::uint64_t fnv1a(const void* data, std::size_t len);
std::uint64_t matrix_checksum(const Eigen::MatrixXd& M);

nlohmann::json basis_to_json(const HofdBasis& basis);
HofdBasis basis_from_json(const nlohmann::json& j);

nlohmann::json fit_to_json(const CoefficientVector& coef, const DesignMatrix& design);
nlohmann::json report_to_json(const SensitivityReport& report);
std::string report_to_csv(const SensitivityReport& report);
std::string replicate_summary_to_csv(const ReplicateSummary& summary);
nlohmann::json replicate_summary_to_json(const ReplicateSummary& summary);

// Long-format per-replicate index draws (label,replicate,seed,value), one row
// per index per replicate — ready for box plots.
std::string boxplot_csv(const ReplicateSummary& summary);

// Write-then-rename so partially written files never appear under the final
// name. Creates parent directories.
void write_text_atomic(const std::string& path, const std::string& content);

// Serialize a JSON document deterministically (sorted keys, fixed indent).
std::string to_stable_string(const nlohmann::json& j);

}  // namespace hofd
