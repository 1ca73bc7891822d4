#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "survnet/baselines.hpp"
#include "survnet/datasets.hpp"
#include "survnet/errors.hpp"
#include "survnet/io.hpp"
#include "survnet/selection.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace survnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitAborted = 4;
constexpr int kExitDiverged = 5;

Scheme parse_scheme(const std::string& name) {
    if (name == "indep-mean-shift") return Scheme::IndepMeanShift;
    if (name == "correlated-mean-shift") return Scheme::CorrelatedMeanShift;
    if (name == "variance-inflation") return Scheme::VarianceInflation;
    if (name == "nonlinear-regression") return Scheme::NonlinearRegression;
    throw ConfigError("unknown scheme '" + name + "'");
}

struct DatasetArgs {
    std::string data_csv;
    std::string meta_json;
    std::string target = "target";
    std::string scheme;
    int n = 10000;
    int p = 784;
    int p_prime = 64;
    std::string mnist_dir;
    std::vector<int> digits;
    bool standardize_flag = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--data", data_csv, "Dataset CSV (with a header and a target column)");
        cmd->add_option("--meta", meta_json, "Sidecar JSON with truth/split/grid metadata");
        cmd->add_option("--target", target, "Target column name, or #index")
            ->capture_default_str();
        cmd->add_option("--scheme", scheme,
                        "Simulation scheme: indep-mean-shift, correlated-mean-shift, "
                        "variance-inflation, nonlinear-regression");
        cmd->add_option("--n", n, "Simulated sample count")->capture_default_str();
        cmd->add_option("--p", p, "Simulated variable count")->capture_default_str();
        cmd->add_option("--p-prime", p_prime, "Significant variable count")
            ->capture_default_str();
        cmd->add_option("--mnist-dir", mnist_dir,
                        "Directory with the four MNIST IDX files (train/t10k images+labels)");
        cmd->add_option("--digits", digits, "Digits to classify from --mnist-dir, e.g. 4,9")
            ->delimiter(',');
        cmd->add_flag("--standardize", standardize_flag,
                      "Standardize columns with train-split statistics");
    }

    LabeledDataset mnist_official() const {
        return load_idx_with_official_split(
            (fs::path(mnist_dir) / "train-images-idx3-ubyte").string(),
            (fs::path(mnist_dir) / "train-labels-idx1-ubyte").string(),
            (fs::path(mnist_dir) / "t10k-images-idx3-ubyte").string(),
            (fs::path(mnist_dir) / "t10k-labels-idx1-ubyte").string());
    }

    /// Build the dataset for one run. Scheme-based sources are regenerated per
    /// seed; file-based sources are loaded once by the caller and reused.
    LabeledDataset build(std::uint64_t seed) const {
        LabeledDataset data;
        if (!data_csv.empty()) {
            data = read_dataset_csv(data_csv, meta_json);
        } else if (!scheme.empty()) {
            SimSpec spec;
            spec.scheme = parse_scheme(scheme);
            spec.n = n;
            spec.p = p;
            spec.p_prime = p_prime;
            spec.seed = seed;
            if (spec.scheme == Scheme::CorrelatedMeanShift && !mnist_dir.empty()) {
                LabeledDataset zeros = filter_classes(mnist_official(), {0, 1});
                // keep only actual zeros; filter_classes relabeled digit 0 -> 0
                std::vector<int> keep;
                for (int i = 0; i < zeros.n(); ++i)
                    if (zeros.labels[static_cast<std::size_t>(i)] == 0) keep.push_back(i);
                LabeledDataset only_zeros;
                only_zeros.x = select_rows(zeros.x, keep);
                only_zeros.labels.assign(keep.size(), 0);
                only_zeros.n_classes = 2;
                only_zeros.grid = zeros.grid;
                data = gen_dataset2(only_zeros, spec);
            } else {
                data = generate(spec);
            }
        } else if (!mnist_dir.empty()) {
            if (digits.size() < 2)
                throw ConfigError("--mnist-dir needs --digits (e.g. --digits 4,9)");
            data = filter_classes(mnist_official(), digits);
        } else {
            throw ConfigError("no dataset source: give --data, --scheme or --mnist-dir");
        }
        if (data.split.empty()) assign_split(data, mix_seed(seed, 0x5b17));
        if (standardize_flag) {
            const std::vector<int> constant = standardize(data);
            if (!constant.empty())
                std::cerr << "warning: " << constant.size()
                          << " constant training columns left centered at 0\n";
        }
        return data;
    }

    json provenance(std::uint64_t seed) const {
        json j;
        if (!data_csv.empty()) j["data"] = data_csv;
        if (!meta_json.empty()) j["meta"] = meta_json;
        if (!scheme.empty()) {
            j["scheme"] = scheme;
            j["n"] = n;
            j["p"] = p;
            j["p_prime"] = p_prime;
        }
        if (!mnist_dir.empty()) j["mnist_dir"] = mnist_dir;
        if (!digits.empty()) j["digits"] = digits;
        j["standardize"] = standardize_flag;
        j["seed"] = seed;
        return j;
    }
};

struct SelectArgs {
    DatasetArgs dataset;
    std::string out_dir = "runs";
    double eta_star = 0.1;
    double epsilon = 1.0;
    int q = 0;
    std::vector<int> hidden{40, 20};
    int batch_size = 50;
    double learning_rate = 0.0;  // 0 = pick by task (0.05 classification, 0.01 regression)
    int max_epochs = 200;
    int patience = 5;
    std::uint64_t seed = 1;
    int replicates = 1;
    int jobs = 1;
    std::string score_kind = "square-mean";
    bool scale_scores = false;

    void attach(CLI::App* cmd) {
        dataset.attach(cmd);
        cmd->add_option("--out", out_dir, "Output directory (one run_<seed> dir per replicate)")
            ->capture_default_str();
        cmd->add_option("--eta-star", eta_star, "FDR cutoff")->capture_default_str();
        cmd->add_option("--epsilon", epsilon, "Elimination rate in (0,1]")->capture_default_str();
        cmd->add_option("--q", q, "Surrogate count (0 = same as p)")->capture_default_str();
        cmd->add_option("--hidden", hidden, "Hidden layer sizes")
            ->delimiter(',')
            ->capture_default_str();
        cmd->add_option("--batch-size", batch_size, "SGD minibatch size")->capture_default_str();
        cmd->add_option("--learning-rate", learning_rate,
                        "SGD learning rate (0 = 0.05 classification / 0.01 regression)")
            ->capture_default_str();
        cmd->add_option("--max-epochs", max_epochs, "Epoch cap per training")
            ->capture_default_str();
        cmd->add_option("--patience", patience, "Early-stopping patience (epochs)")
            ->capture_default_str();
        cmd->add_option("--seed", seed, "Base seed; replicate i uses seed+i")
            ->envname("SURVNET_SEED")
            ->capture_default_str();
        cmd->add_option("--replicates", replicates, "Number of independent runs")
            ->capture_default_str();
        cmd->add_option("--jobs", jobs, "Replicates to run concurrently")->capture_default_str();
        cmd->add_option("--score", score_kind, "Importance score: square-mean or abs-mean")
            ->check(CLI::IsMember({"square-mean", "abs-mean"}))
            ->capture_default_str();
        cmd->add_flag("--scale-scores", scale_scores,
                      "Multiply scores by the column sd (abs-mean) or variance (square-mean)");
    }

    SelectionConfig selection_config(std::uint64_t run_seed, bool classification) const {
        SelectionConfig cfg;
        cfg.hidden_dims = hidden;
        cfg.eta_star = eta_star;
        cfg.epsilon = epsilon;
        cfg.q = q;
        cfg.score_kind = score_kind == "abs-mean" ? ScoreKind::AbsMean : ScoreKind::SquareMean;
        cfg.scale_scores = scale_scores;
        cfg.seed = run_seed;
        cfg.train.batch_size = batch_size;
        cfg.train.learning_rate =
            learning_rate > 0.0 ? learning_rate : (classification ? 0.05 : 0.01);
        cfg.train.max_epochs = max_epochs;
        cfg.train.patience = patience;
        return cfg;
    }
};

void write_run_outputs(const fs::path& dir, const SelectionReport& report,
                       const LabeledDataset& data, const json& config) {
    fs::create_directories(dir);
    std::ofstream(dir / "config.json") << config.dump(2) << "\n";
    write_history_csv(report.history, (dir / "history.csv").string());
    write_report_json(report, (dir / "report.json").string());
    save_model(report.final_model, (dir / "model.json").string());
    write_scores_csv(report.selected, report.final_scores, (dir / "scores.csv").string());
    if (data.grid)
        write_heatmap_csv(report.selected, report.final_scores, (*data.grid)[0], (*data.grid)[1],
                          (dir / "heatmap.csv").string());
}

int cmd_simulate(const DatasetArgs& args, const std::string& out_dir, std::uint64_t seed) {
    if (args.scheme.empty()) throw ConfigError("simulate needs --scheme");
    SimSpec spec;
    spec.scheme = parse_scheme(args.scheme);
    spec.n = args.n;
    spec.p = args.p;
    spec.p_prime = args.p_prime;
    spec.seed = seed;
    LabeledDataset data = args.build(seed);
    fs::create_directories(out_dir);
    write_dataset_csv(data, (fs::path(out_dir) / "data.csv").string());
    write_dataset_meta(data, &spec, (fs::path(out_dir) / "meta.json").string());
    std::cout << "wrote " << (fs::path(out_dir) / "data.csv").string() << " (" << data.n() << " x "
              << data.p() << ")\n";
    return kExitOk;
}

int cmd_select(const SelectArgs& args) {
    if (args.replicates < 1) throw ConfigError("--replicates must be at least 1");
    if (args.jobs < 1) throw ConfigError("--jobs must be at least 1");

    // File-based sources are loaded once and shared read-only across replicates;
    // scheme-based sources are regenerated per replicate seed.
    const bool regenerate = !args.dataset.scheme.empty();
    std::optional<LabeledDataset> shared;
    if (!regenerate) shared = args.dataset.build(args.seed);

    std::atomic<int> next{0};
    std::mutex log_mutex;
    std::vector<std::string> failures;

    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < args.replicates; i = next.fetch_add(1)) {
            const std::uint64_t run_seed = args.seed + static_cast<std::uint64_t>(i);
            try {
                const LabeledDataset data = regenerate ? args.dataset.build(run_seed) : *shared;
                SelectionConfig cfg = args.selection_config(run_seed, data.is_classification());
                SelectionReport report = run_selection(data, cfg);
                json provenance = args.dataset.provenance(run_seed);
                provenance["eta_star"] = args.eta_star;
                provenance["epsilon"] = args.epsilon;
                provenance["q"] = cfg.q == 0 ? data.p() : cfg.q;
                provenance["hidden"] = args.hidden;
                provenance["batch_size"] = cfg.train.batch_size;
                provenance["learning_rate"] = cfg.train.learning_rate;
                provenance["max_epochs"] = cfg.train.max_epochs;
                provenance["patience"] = cfg.train.patience;
                provenance["score"] = args.score_kind;
                provenance["scale_scores"] = args.scale_scores;
                const fs::path dir = fs::path(args.out_dir) / ("run_" + std::to_string(run_seed));
                write_run_outputs(dir, report, data, provenance);
                std::lock_guard<std::mutex> lock(log_mutex);
                std::cout << "run_" << run_seed << ": selected " << report.selected.size()
                          << " variables, estimated FDR "
                          << format_double(report.eta_hat_final) << "\n";
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(log_mutex);
                failures.push_back(e.what());
            }
        }
    };

    if (args.jobs == 1 || args.replicates == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min(args.jobs, args.replicates); ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    if (!failures.empty()) {
        for (const std::string& f : failures) std::cerr << "error: " << f << "\n";
        // Propagate the most specific failure class through the exit code.
        for (const std::string& f : failures)
            if (f.find("diverged") != std::string::npos) throw TrainingError(f);
        for (const std::string& f : failures)
            if (f.find("eliminated") != std::string::npos) throw AbortedRunError(f);
        throw Error(failures.front());
    }
    return kExitOk;
}

int cmd_evaluate(const std::string& model_path, const DatasetArgs& args,
                 const std::string& report_path, const std::string& split) {
    NetworkModel model = load_model(model_path);
    LabeledDataset data = args.build(1);
    std::vector<int> rows;
    if (split == "all") {
        rows.resize(static_cast<std::size_t>(data.n()));
        std::iota(rows.begin(), rows.end(), 0);
    } else {
        SplitTag tag = split == "train"        ? SplitTag::Train
                       : split == "validation" ? SplitTag::Validation
                                               : SplitTag::Test;
        rows = data.rows_in(tag);
    }
    if (rows.empty()) throw ConfigError("no rows in the requested split");

    Matrix x = select_rows(data.x, rows);
    if (!report_path.empty()) {
        const json report = json::parse(std::ifstream(report_path));
        const std::vector<int> selected = report.at("selected").get<std::vector<int>>();
        x = select_rows(select_cols(data.x, selected), rows);
    }
    if (x.cols() != model.input_dim())
        throw ConfigError("data width does not match the model; pass --report to subset columns");

    const auto [test_loss, test_error] = evaluate(model, x, select_rows(data.targets(), rows));
    json j;
    j["loss"] = test_loss;
    if (test_error) j["error"] = *test_error;
    j["rows"] = rows.size();
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_report(std::vector<std::string> run_dirs, const std::string& out_csv) {
    std::vector<std::string> report_files;
    for (const std::string& dir : run_dirs) {
        const fs::path p(dir);
        if (fs::exists(p / "report.json")) {
            report_files.push_back((p / "report.json").string());
            continue;
        }
        if (fs::is_directory(p)) {
            std::vector<fs::path> subdirs;
            for (const auto& entry : fs::directory_iterator(p))
                if (entry.is_directory() && fs::exists(entry.path() / "report.json"))
                    subdirs.push_back(entry.path() / "report.json");
            std::sort(subdirs.begin(), subdirs.end());
            for (const auto& f : subdirs) report_files.push_back(f.string());
            if (!subdirs.empty()) continue;
        }
        std::cerr << "warning: skipping " << dir << " (no report.json)\n";
    }
    if (report_files.empty()) throw ConfigError("no completed runs found");

    std::vector<RunSummary> runs;
    for (const std::string& f : report_files) {
        try {
            runs.push_back(read_run_summary(f));
        } catch (const DataError& e) {
            std::cerr << "warning: skipping " << f << " (" << e.what() << ")\n";
        }
    }
    if (runs.empty()) throw ConfigError("no readable runs found");

    const std::vector<Aggregate> rows = aggregate_runs(runs);
    for (const Aggregate& a : rows) {
        std::cout << a.metric << ": " << format_double(a.mean) << " (sd "
                  << format_double(a.sd) << ", n=" << a.n << ")\n";
    }
    if (!out_csv.empty()) write_aggregate_csv(rows, out_csv);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SurvNet: backward elimination of input variables with FDR control"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Generate a simulation dataset as CSV + sidecar");
    DatasetArgs sim_dataset;
    std::string sim_out = "dataset";
    std::uint64_t sim_seed = 1;
    sim_dataset.attach(sim);
    sim->add_option("--out", sim_out, "Output directory")->capture_default_str();
    sim->add_option("--seed", sim_seed, "Generator seed")
        ->envname("SURVNET_SEED")
        ->capture_default_str();
    sim->set_config("--config");

    auto* sel = app.add_subcommand("select", "Run the variable-selection procedure");
    SelectArgs sel_args;
    sel_args.attach(sel);
    sel->set_config("--config");

    auto* eva = app.add_subcommand("evaluate", "Evaluate a saved model on a dataset");
    DatasetArgs eva_dataset;
    std::string eva_model, eva_report, eva_split = "test";
    eva_dataset.attach(eva);
    eva->add_option("--model", eva_model, "model.json path")->required();
    eva->add_option("--report", eva_report, "report.json whose selected columns the model uses");
    eva->add_option("--split", eva_split, "Rows to evaluate: test, train, validation, all")
        ->check(CLI::IsMember({"test", "train", "validation", "all"}))
        ->capture_default_str();
    eva->set_config("--config");

    auto* rep = app.add_subcommand("report", "Aggregate mean/sd statistics over run directories");
    std::vector<std::string> rep_dirs;
    std::string rep_out;
    rep->add_option("--runs", rep_dirs, "Run directories (or parents of run_* directories)")
        ->required();
    rep->add_option("--out", rep_out, "Write the aggregate table to this CSV");
    rep->set_config("--config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_dataset, sim_out, sim_seed);
        if (sel->parsed()) return cmd_select(sel_args);
        if (eva->parsed()) return cmd_evaluate(eva_model, eva_dataset, eva_report, eva_split);
        if (rep->parsed()) return cmd_report(rep_dirs, rep_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const TrainingError& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const AbortedRunError& e) {
        std::cerr << "aborted run: " << e.what() << "\n";
        return kExitAborted;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const ShapeError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
