#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "alebo/embedding.hpp"
#include "alebo/gp.hpp"
#include "alebo/model_fit.hpp"
#include "alebo/popt.hpp"
#include "alebo/runner.hpp"

namespace alebo {

using Json = nlohmann::json;

/// Matrices are stored as {"rows", "cols", "data"} with data in row-major order.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json to_json(const EmbeddingSpec& spec);
EmbeddingSpec embedding_from_json(const Json& j);

Json to_json(const GPFit& fit);
/// Rebuilds the fit, refactorizing every mixture component from the stored data.
GPFit gpfit_from_json(const Json& j);

/// Config files carry "schema": 1; unknown fields raise ConfigError.
Json to_json(const RunConfig& config);
RunConfig run_config_from_json(const Json& j);
RunConfig load_run_config(const std::filesystem::path& path);

Json to_json(const TraceRecord& record);
TraceRecord trace_record_from_json(const Json& j);

/// One JSON object per line, one line per evaluation.
void write_trace_jsonl(std::ostream& out, const OptimizationTrace& trace);
std::vector<TraceRecord> read_trace_jsonl(std::istream& in);

void write_summary_csv(std::ostream& out, const TraceSummary& summary);
void write_popt_csv_header(std::ostream& out);
void write_popt_csv_row(std::ostream& out, Strategy strategy, int ambient_dim, int dim, int embed_dim,
                        const PoptEstimate& estimate);
void write_model_fit_csv(std::ostream& out, const ModelFitResult& result, bool header = true);

}  // namespace alebo
