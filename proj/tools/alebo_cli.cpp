#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "alebo/benchmarks.hpp"
#include "alebo/io.hpp"
#include "alebo/model_fit.hpp"
#include "alebo/popt.hpp"
#include "alebo/runner.hpp"

namespace fs = std::filesystem;
using namespace alebo;

namespace {

/// Opens `path` for writing, or returns std::cout for "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (path != "-") {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    const RunConfig config = load_run_config(config_path);
    fs::create_directories(out_dir);
    const AmbientProblem problem = make_problem(config.problem_id, config.problem_seed);
    std::vector<OptimizationTrace> traces;
    for (int i = 0; i < config.replicates; ++i) {
        RunConfig c = config;
        c.seed = config.seed + static_cast<std::uint64_t>(i);
        c.replicates = 1;
        traces.push_back(run(c));
        std::ofstream out(fs::path(out_dir) / ("trace_" + std::to_string(i) + ".jsonl"));
        write_trace_jsonl(out, traces.back());
        std::cerr << "replicate " << i << ": best " << traces.back().best_value << '\n';
    }
    Json meta = {{"config", to_json(config)}, {"f_star", problem.optimum_value()}};
    std::ofstream(fs::path(out_dir) / "run.json") << meta.dump(2) << '\n';
    std::ofstream summary(fs::path(out_dir) / "summary.csv");
    write_summary_csv(summary, aggregate(traces, problem.optimum_value()));
    return 0;
}

int cmd_popt(const std::string& strategy_name, int big_d, int true_d, const std::vector<int>& embed_dims, long long n_mc,
             std::uint64_t seed, const std::string& out_path, bool interior) {
    Output out(out_path);
    write_popt_csv_header(out.stream());
    if (interior) {
        for (const int de : embed_dims)
            write_popt_csv_row(out.stream(), Strategy::Rembo, big_d, 0, de, interior_probability(big_d, de, n_mc, seed));
        return 0;
    }
    const Strategy strategy = strategy_from_string(strategy_name);
    for (const int de : embed_dims)
        write_popt_csv_row(out.stream(), strategy, big_d, true_d, de,
                           estimate_popt(strategy, big_d, true_d, de, n_mc, seed));
    return 0;
}

int cmd_modelfit(ModelFitConfig config, const std::vector<int>& train_sizes, const std::string& out_path) {
    Output out(out_path);
    std::vector<int> sizes = train_sizes.empty() ? std::vector<int>{config.n_train} : train_sizes;
    bool header = true;
    for (const int n : sizes) {
        config.n_train = n;
        const ModelFitResult result = run_model_fit(config);
        write_model_fit_csv(out.stream(), result, header);
        header = false;
        for (const auto& m : result.models) {
            const FitMetrics s = score_predictions(result.test_targets, m);
            std::cerr << "n=" << n << ' ' << m.model << ": R2 " << s.r_squared << ", mean log density "
                      << s.mean_log_density << ", mean variance " << s.mean_variance << '\n';
        }
    }
    return 0;
}

void write_svg(std::ostream& out, const TraceSummary& s) {
    const double width = 640.0;
    const double height = 400.0;
    const double margin = 50.0;
    const std::size_t n = s.mean_best.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t t = 0; t < n; ++t) {
        if (!std::isfinite(s.mean_best[t])) continue;
        lo = std::min(lo, s.mean_best[t] - 2.0 * s.se_best[t]);
        hi = std::max(hi, s.mean_best[t] + 2.0 * s.se_best[t]);
    }
    if (!(hi > lo)) hi = lo + 1.0;
    auto px = [&](std::size_t t) { return margin + (width - 2 * margin) * static_cast<double>(t) / std::max<double>(1, n - 1); };
    auto py = [&](double v) { return height - margin - (height - 2 * margin) * (v - lo) / (hi - lo); };
    std::ostringstream band_upper;
    std::ostringstream band_lower;
    std::ostringstream line;
    for (std::size_t t = 0; t < n; ++t) {
        if (!std::isfinite(s.mean_best[t])) continue;
        band_upper << px(t) << ',' << py(s.mean_best[t] + 2.0 * s.se_best[t]) << ' ';
        line << px(t) << ',' << py(s.mean_best[t]) << ' ';
    }
    for (std::size_t k = n; k-- > 0;) {
        if (!std::isfinite(s.mean_best[k])) continue;
        band_lower << px(k) << ',' << py(s.mean_best[k] - 2.0 * s.se_best[k]) << ' ';
    }
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<polygon points=\"" << band_upper.str() << band_lower.str() << "\" fill=\"#9ecae1\" opacity=\"0.6\"/>\n"
        << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"#08519c\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << margin << "\" y=\"" << margin / 2 << "\" font-size=\"12\">best value, mean and 2 SE (range "
        << lo << " to " << hi << ")</text>\n"
        << "</svg>\n";
}

int cmd_report(const std::string& in_dir, const std::string& out_path) {
    std::vector<std::vector<double>> curves;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(in_dir))
        if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no .jsonl traces in " + in_dir);
    for (const auto& f : files) {
        std::ifstream in(f);
        std::vector<double> curve;
        for (const auto& r : read_trace_jsonl(in)) curve.push_back(r.best_feasible);
        curves.push_back(std::move(curve));
    }
    double f_star = 0.0;
    if (std::ifstream meta(fs::path(in_dir) / "run.json"); meta) {
        Json j;
        meta >> j;
        f_star = j.at("f_star").get<double>();
    }
    const TraceSummary summary = aggregate(curves, f_star);
    Output out(out_path);
    if (fs::path(out_path).extension() == ".svg") {
        write_svg(out.stream(), summary);
    } else {
        write_summary_csv(out.stream(), summary);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian optimization in random linear embeddings"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run replicates of an optimization method from a JSON config");
    std::string config_path;
    std::string out_dir = "runs";
    run->add_option("--config", config_path, "Config file (JSON, \"schema\": 1)")->required()->check(CLI::ExistingFile);
    run->add_option("--out-dir", out_dir, "Directory for traces and summary");

    auto* popt = app.add_subcommand("popt", "Probability that a random embedding contains an optimum");
    std::string strategy = "hypersphere";
    int big_d = 100;
    int true_d = 6;
    std::vector<int> embed_dims = {6, 8, 10, 12, 14, 16, 18, 20};
    long long n_mc = 1000;
    std::uint64_t popt_seed = 0;
    std::string popt_out = "-";
    bool interior = false;
    popt->add_option("--strategy", strategy, "gaussian, hypersphere, hesbo or rembo");
    popt->add_option("--big-d", big_d, "Ambient dimension D");
    popt->add_option("--true-d", true_d, "True subspace dimension d");
    popt->add_option("--embed-d-list", embed_dims, "Embedding dimensions")->delimiter(',');
    popt->add_option("--n-mc", n_mc, "Monte Carlo draws per cell");
    popt->add_option("--seed", popt_seed);
    popt->add_option("--out", popt_out, "CSV path or - for stdout");
    popt->add_flag("--interior", interior, "Estimate the REMBO interior-point probability instead");

    auto* modelfit = app.add_subcommand("modelfit", "Compare surrogate fits on one embedding");
    ModelFitConfig mf;
    std::vector<int> train_sizes;
    std::string mf_out = "-";
    modelfit->add_option("--problem", mf.problem_id);
    modelfit->add_option("--embed-d", mf.embed_dim);
    modelfit->add_option("--n-train", mf.n_train);
    modelfit->add_option("--n-test", mf.n_test);
    modelfit->add_option("--seed", mf.seed);
    modelfit->add_option("--laplace-samples", mf.laplace_samples);
    modelfit->add_option("--train-sizes", train_sizes, "Sweep over these training set sizes")->delimiter(',');
    modelfit->add_option("--out", mf_out, "CSV path or - for stdout");

    auto* report = app.add_subcommand("report", "Aggregate a directory of traces");
    std::string in_dir;
    std::string report_out = "-";
    report->add_option("--in", in_dir)->required()->check(CLI::ExistingDirectory);
    report->add_option("--out", report_out, "CSV path, SVG path (by extension) or -");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, out_dir);
        if (*popt) return cmd_popt(strategy, big_d, true_d, embed_dims, n_mc, popt_seed, popt_out, interior);
        if (*modelfit) return cmd_modelfit(mf, train_sizes, mf_out);
        if (*report) return cmd_report(in_dir, report_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
