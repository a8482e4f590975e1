#include "alebo/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>

namespace alebo {

namespace {

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_or_inf(const Json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& what) {
    if (!j.is_object()) throw ConfigError(what + ": expected a JSON object");
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ConfigError(what + ": unknown field '" + key + "'");
}

template <typename T>
void read_field(const Json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from_json(const Json& j) {
    const auto rows = j.at("rows").get<Index>();
    const auto cols = j.at("cols").get<Index>();
    const auto& data = j.at("data");
    if (static_cast<Index>(data.size()) != rows * cols) throw DimensionError("matrix_from_json: data length mismatch");
    Matrix m(rows, cols);
    std::size_t k = 0;
    for (Index i = 0; i < rows; ++i)
        for (Index c = 0; c < cols; ++c) m(i, c) = data[k++].get<double>();
    return m;
}

Json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from_json(const Json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

Json to_json(const EmbeddingSpec& spec) {
    Json j{{"strategy", std::string(to_string(spec.strategy))},
           {"D", spec.ambient_dim},
           {"d_e", spec.embed_dim},
           {"seed", spec.seed},
           {"up_matrix", matrix_to_json(spec.up_matrix)},
           {"down_matrix", matrix_to_json(spec.down_matrix)}};
    if (const auto* box = std::get_if<Box>(&spec.feasible_region))
        j["box"] = {{"lower", vector_to_json(box->lower)}, {"upper", vector_to_json(box->upper)}};
    return j;
}

EmbeddingSpec embedding_from_json(const Json& j) {
    EmbeddingSpec spec;
    spec.strategy = strategy_from_string(j.at("strategy").get<std::string>());
    spec.ambient_dim = j.at("D").get<int>();
    spec.embed_dim = j.at("d_e").get<int>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.up_matrix = matrix_from_json(j.at("up_matrix"));
    spec.down_matrix = matrix_from_json(j.at("down_matrix"));
    if (spec.up_matrix.rows() != spec.ambient_dim || spec.up_matrix.cols() != spec.embed_dim ||
        spec.down_matrix.rows() != spec.embed_dim || spec.down_matrix.cols() != spec.ambient_dim)
        throw DimensionError("embedding_from_json: matrix shapes disagree with D and d_e");
    if (j.contains("box")) {
        spec.feasible_region = Box{vector_from_json(j["box"].at("lower")), vector_from_json(j["box"].at("upper"))};
    } else {
        Polytope p;
        p.a.resize(2 * spec.ambient_dim, spec.embed_dim);
        p.a.topRows(spec.ambient_dim) = spec.up_matrix;
        p.a.bottomRows(spec.ambient_dim) = -spec.up_matrix;
        p.b = Vector::Ones(2 * spec.ambient_dim);
        spec.feasible_region = std::move(p);
    }
    return spec;
}

Json to_json(const GPFit& fit) {
    Json components = Json::array();
    for (const auto& c : fit.components) components.push_back(vector_to_json(c.metric));
    return Json{{"kernel", std::string(to_string(fit.kernel))},
                {"dim", fit.dim},
                {"input_scale", fit.input_scale},
                {"output_shift", fit.output_shift},
                {"output_scale", fit.output_scale},
                {"noise_floor", fit.codec.noise_floor},
                {"theta", vector_to_json(fit.theta)},
                {"log_posterior", fit.log_posterior},
                {"inputs", matrix_to_json(fit.raw_inputs)},
                {"targets", vector_to_json(fit.raw_targets)},
                {"laplace_variances", vector_to_json(fit.laplace_variances)},
                {"component_metrics", components}};
}

GPFit gpfit_from_json(const Json& j) {
    GPFit fit;
    fit.kernel = kernel_from_string(j.at("kernel").get<std::string>());
    fit.dim = j.at("dim").get<Index>();
    fit.input_scale = j.at("input_scale").get<double>();
    fit.output_shift = j.at("output_shift").get<double>();
    fit.output_scale = j.at("output_scale").get<double>();
    fit.codec = HyperCodec{fit.kernel, fit.dim, j.at("noise_floor").get<double>()};
    fit.theta = vector_from_json(j.at("theta"));
    fit.params = fit.codec.decode(fit.theta);
    fit.log_posterior = j.at("log_posterior").get<double>();
    fit.raw_inputs = matrix_from_json(j.at("inputs"));
    fit.raw_targets = vector_from_json(j.at("targets"));
    if (fit.raw_inputs.cols() != fit.dim || fit.raw_inputs.rows() != fit.raw_targets.size())
        throw DimensionError("gpfit_from_json: training data shape mismatch");
    fit.inputs = fit.raw_inputs / fit.input_scale;
    fit.targets = (fit.raw_targets.array() - fit.output_shift).matrix() / fit.output_scale;
    fit.laplace_variances = vector_from_json(j.at("laplace_variances"));
    for (const auto& m : j.at("component_metrics")) fit.components.push_back(build_component(fit, vector_from_json(m)));
    if (fit.components.empty()) throw DimensionError("gpfit_from_json: no components");
    return fit;
}

Json to_json(const RunConfig& c) {
    return Json{{"schema", 1},
                {"problem", c.problem_id},
                {"method", std::string(to_string(c.method))},
                {"embed_dim", c.embed_dim},
                {"n_init", c.n_init},
                {"n_bo", c.n_bo},
                {"seed", c.seed},
                {"problem_seed", c.problem_seed},
                {"replicates", c.replicates},
                {"laplace_samples", c.laplace_samples},
                {"fit_restarts", c.fit_restarts},
                {"acquisition_restarts", c.acquisition_restarts},
                {"acquisition_probes", c.acquisition_probes},
                {"rembo_projections", c.rembo_projections},
                {"kernel", std::string(to_string(c.alebo_kernel))},
                {"strategy", std::string(to_string(c.alebo_strategy))}};
}

RunConfig run_config_from_json(const Json& j) {
    static const std::set<std::string> known = {
        "schema",          "problem",      "method",           "embed_dim",          "n_init",
        "n_bo",            "seed",         "problem_seed",     "replicates",         "laplace_samples",
        "fit_restarts",    "acquisition_restarts",             "acquisition_probes", "rembo_projections",
        "kernel",          "strategy"};
    reject_unknown(j, known, "run config");
    if (!j.contains("schema") || !j["schema"].is_number_integer() || j["schema"].get<int>() != 1)
        throw ConfigError("run config: \"schema\" must be 1");
    RunConfig c;
    read_field(j, "problem", c.problem_id);
    std::string method = std::string(to_string(c.method));
    read_field(j, "method", method);
    c.method = method_from_string(method);
    read_field(j, "embed_dim", c.embed_dim);
    read_field(j, "n_init", c.n_init);
    read_field(j, "n_bo", c.n_bo);
    read_field(j, "seed", c.seed);
    read_field(j, "problem_seed", c.problem_seed);
    read_field(j, "replicates", c.replicates);
    read_field(j, "laplace_samples", c.laplace_samples);
    read_field(j, "fit_restarts", c.fit_restarts);
    read_field(j, "acquisition_restarts", c.acquisition_restarts);
    read_field(j, "acquisition_probes", c.acquisition_probes);
    read_field(j, "rembo_projections", c.rembo_projections);
    std::string kernel = std::string(to_string(c.alebo_kernel));
    read_field(j, "kernel", kernel);
    std::string strategy = std::string(to_string(c.alebo_strategy));
    read_field(j, "strategy", strategy);
    try {
        c.alebo_kernel = kernel_from_string(kernel);
        c.alebo_strategy = strategy_from_string(strategy);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (c.replicates < 1) throw ConfigError("run config: replicates must be >= 1");
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    return run_config_from_json(j);
}

Json to_json(const TraceRecord& r) {
    Json j{{"iteration", r.iteration},
           {"ambient", vector_to_json(r.ambient)},
           {"objective", r.objective},
           {"constraints", r.constraints},
           {"feasible", r.feasible},
           {"best_feasible", finite_or_null(r.best_feasible)},
           {"wall_ms", r.wall_ms}};
    if (r.embedded) j["embedded"] = vector_to_json(*r.embedded);
    if (r.projection >= 0) j["projection"] = r.projection;
    return j;
}

TraceRecord trace_record_from_json(const Json& j) {
    TraceRecord r;
    r.iteration = j.at("iteration").get<int>();
    r.ambient = vector_from_json(j.at("ambient"));
    r.objective = j.at("objective").get<double>();
    r.constraints = j.at("constraints").get<std::vector<double>>();
    r.feasible = j.at("feasible").get<bool>();
    r.best_feasible = number_or_inf(j.at("best_feasible"));
    r.wall_ms = j.at("wall_ms").get<double>();
    if (j.contains("embedded")) r.embedded = vector_from_json(j["embedded"]);
    if (j.contains("projection")) r.projection = j["projection"].get<int>();
    return r;
}

void write_trace_jsonl(std::ostream& out, const OptimizationTrace& trace) {
    for (const auto& r : trace.records) out << to_json(r).dump() << '\n';
}

std::vector<TraceRecord> read_trace_jsonl(std::istream& in) {
    std::vector<TraceRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(trace_record_from_json(Json::parse(line)));
    }
    return records;
}

void write_summary_csv(std::ostream& out, const TraceSummary& s) {
    out << "iteration,mean_best,se_best,mean_log_regret\n";
    out << std::setprecision(10);
    for (std::size_t t = 0; t < s.mean_best.size(); ++t)
        out << t << ',' << s.mean_best[t] << ',' << s.se_best[t] << ',' << s.mean_log_regret[t] << '\n';
}

void write_popt_csv_header(std::ostream& out) { out << "strategy,D,d,d_e,n_mc,estimate,standard_error\n"; }

void write_popt_csv_row(std::ostream& out, Strategy strategy, int ambient_dim, int dim, int embed_dim,
                        const PoptEstimate& e) {
    out << to_string(strategy) << ',' << ambient_dim << ',' << dim << ',' << embed_dim << ',' << e.n_mc << ','
        << std::setprecision(10) << e.estimate << ',' << e.standard_error << '\n';
}

void write_model_fit_csv(std::ostream& out, const ModelFitResult& result, bool header) {
    if (header) out << "n_train,model,test_index,target,mean,variance,noise_variance\n";
    out << std::setprecision(12);
    for (const auto& m : result.models)
        for (Index i = 0; i < result.test_targets.size(); ++i)
            out << result.n_train << ',' << m.model << ',' << i << ',' << result.test_targets(i) << ',' << m.mean(i)
                << ',' << m.variance(i) << ',' << m.noise_variance << '\n';
}

}  // namespace alebo
