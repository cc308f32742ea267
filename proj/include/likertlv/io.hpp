#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "likertlv/model.hpp"
#include "likertlv/reconstruction.hpp"
#include "likertlv/stem.hpp"

namespace likertlv {

/// Long-format responses with header `subject,item,time,response` and 1-based
/// indices. The panel must be complete: every (subject, item, time) exactly
/// once. The category count defaults to the largest observed response.
/// Throws InputError naming the offending line or the missing cells.
LikertDataset read_likert_csv(std::istream& in, std::optional<int> num_categories = std::nullopt);
LikertDataset read_likert_csv(const std::string& path, std::optional<int> num_categories = std::nullopt);

/// Rows ordered by subject, then item, then time; LF line endings.
void write_likert_csv(std::ostream& out, const LikertDataset& data);

/// {"sigma": [...], "tau": [...], "cuts": [[...], ...], "num_categories": K}
nlohmann::json model_to_json(const ModelParams& params, const CutPointSet& cuts);
ModelParams params_from_json(const nlohmann::json& doc);
CutPointSet cuts_from_json(const nlohmann::json& doc);

/// Squared-scale report: sigma_sq, tau_sq_signed (tau^2 carrying the sign of
/// tau), gamma_sq, objective, plus the raw loadings.
nlohmann::json fit_to_json(const FitResult& fit);
nlohmann::json stem_to_json(const StemChain& chain);
nlohmann::json cuts_to_json(const CutPointSet& cuts);

/// Parameter names used in trace files: sigma_j, tau_j, z_j_k (1-based).
std::vector<std::string> trace_parameter_names(int items, int num_cuts);

/// Trace CSV `iteration,parameter,value`, iterations 1-based.
void write_trace_csv(std::ostream& out, const StemChain& chain);

/// Named series read back from a trace CSV, in order of first appearance.
using TraceSeries = std::vector<std::pair<std::string, std::vector<double>>>;
TraceSeries read_trace_csv(std::istream& in);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace likertlv
