#include "survnet/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "survnet/errors.hpp"

namespace survnet {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    return out;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw DataError(path + ": " + e.what());
    }
    return j;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& rows) {
    if (!rows.is_array() || rows.empty()) throw DataError("expected a nonempty matrix");
    Matrix m(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != static_cast<std::size_t>(m.cols()))
            throw DataError("ragged matrix rows");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
    }
    return m;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Trim to the shortest representation that round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char probe[32];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
        if (std::strtod(probe, nullptr) == v) return probe;
    }
    return buf;
}

void write_dataset_csv(const LabeledDataset& data, const std::string& path) {
    std::ofstream out = open_out(path);
    for (int j = 0; j < data.p(); ++j) out << "var_" << j << ",";
    out << "target\n";
    for (int i = 0; i < data.n(); ++i) {
        for (int j = 0; j < data.p(); ++j) out << format_double(data.x(i, j)) << ",";
        if (data.is_classification())
            out << data.labels[static_cast<std::size_t>(i)];
        else
            out << format_double(data.y[i]);
        out << "\n";
    }
}

void write_dataset_meta(const LabeledDataset& data, const SimSpec* spec, const std::string& path) {
    json j;
    if (spec) {
        j["scheme"] = static_cast<int>(spec->scheme);
        j["n"] = spec->n;
        j["p"] = spec->p;
        j["p_prime"] = spec->p_prime;
        j["seed"] = spec->seed;
    }
    j["n_classes"] = data.n_classes;
    if (data.truth) j["truth"] = *data.truth;
    if (!data.split.empty()) {
        std::vector<int> s;
        s.reserve(data.split.size());
        for (SplitTag t : data.split) s.push_back(static_cast<int>(t));
        j["split"] = s;
    }
    if (data.grid) j["grid"] = {(*data.grid)[0], (*data.grid)[1]};
    open_out(path) << j.dump(2) << "\n";
}

LabeledDataset read_dataset_csv(const std::string& csv_path, const std::string& meta_path) {
    json meta;
    if (!meta_path.empty()) meta = read_json_file(meta_path);
    const bool classes = meta.value("n_classes", 0) > 0;
    LabeledDataset data = load_csv(csv_path, "target", true,
                                   meta.is_null() ? TargetKind::Auto
                                   : classes      ? TargetKind::Classes
                                                  : TargetKind::Real);
    if (meta.contains("truth")) data.truth = meta["truth"].get<std::vector<int>>();
    if (meta.contains("split")) {
        const auto s = meta["split"].get<std::vector<int>>();
        if (static_cast<int>(s.size()) != data.n())
            throw DataError(meta_path + ": split length does not match row count");
        data.split.clear();
        for (int t : s) data.split.push_back(static_cast<SplitTag>(t));
    }
    if (meta.contains("grid"))
        data.grid = {{meta["grid"][0].get<int>(), meta["grid"][1].get<int>()}};
    return data;
}

void write_history_csv(const std::vector<StepRecord>& history, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "step,r_minus_r0,r0,eta_hat,m,r_prime\n";
    for (const StepRecord& rec : history) {
        out << rec.step << "," << (rec.r - rec.r0) << "," << rec.r0 << ","
            << format_double(rec.eta_hat) << "," << rec.m << ",";
        if (rec.r_prime >= 0) out << rec.r_prime;
        out << "\n";
    }
}

void write_scores_csv(const std::vector<int>& ids, const Vector& scores, const std::string& path) {
    if (static_cast<Eigen::Index>(ids.size()) != scores.size())
        throw ShapeError("one id per score required");
    std::ofstream out = open_out(path);
    out << "variable_id,score\n";
    for (std::size_t i = 0; i < ids.size(); ++i)
        out << ids[i] << "," << format_double(scores[static_cast<Eigen::Index>(i)]) << "\n";
}

void write_heatmap_csv(const std::vector<int>& ids, const Vector& scores, int height, int width,
                       const std::string& path) {
    if (static_cast<Eigen::Index>(ids.size()) != scores.size())
        throw ShapeError("one id per score required");
    Vector grid = Vector::Zero(static_cast<Eigen::Index>(height) * width);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || ids[i] >= grid.size()) throw ShapeError("variable id outside the grid");
        grid[ids[i]] = scores[static_cast<Eigen::Index>(i)];
    }
    std::ofstream out = open_out(path);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            if (c) out << ",";
            out << format_double(grid[static_cast<Eigen::Index>(r) * width + c]);
        }
        out << "\n";
    }
}

void write_report_json(const SelectionReport& report, const std::string& path) {
    json j;
    j["selected"] = report.selected;
    j["eta_hat_final"] = report.eta_hat_final;
    j["initial_test_loss"] = report.initial_test_loss;
    j["final_test_loss"] = report.final_test_loss;
    if (report.initial_test_error) j["initial_test_error"] = *report.initial_test_error;
    if (report.final_test_error) j["final_test_error"] = *report.final_test_error;
    if (report.confusion) {
        j["confusion"] = {{"tp", report.confusion->tp},
                          {"fp", report.confusion->fp},
                          {"fn", report.confusion->fn},
                          {"actual_fdr", report.confusion->actual_fdr}};
    }
    json hist = json::array();
    for (const StepRecord& rec : report.history) {
        json h = {{"step", rec.step}, {"r", rec.r},         {"r0", rec.r0},
                  {"eta_hat", rec.eta_hat}, {"m", rec.m}};
        if (rec.r_prime >= 0) h["r_prime"] = rec.r_prime;
        if (!rec.eliminated.empty()) h["eliminated"] = rec.eliminated;
        hist.push_back(std::move(h));
    }
    j["history"] = std::move(hist);
    open_out(path) << j.dump(2) << "\n";
}

void save_model(const NetworkModel& model, const std::string& path) {
    json j;
    j["layer_dims"] = model.layer_dims;
    j["output_head"] =
        model.output_head == OutputHead::SoftmaxCrossEntropy ? "softmax_cross_entropy"
                                                             : "identity_squared_error";
    j["hidden_activation"] = "relu";
    j["rng_seed"] = model.rng_seed;
    json weights = json::array();
    for (const Matrix& w : model.weights) weights.push_back(matrix_to_json(w));
    j["weights"] = std::move(weights);
    json biases = json::array();
    for (const Vector& b : model.biases) {
        json row = json::array();
        for (Eigen::Index i = 0; i < b.size(); ++i) row.push_back(b[i]);
        biases.push_back(std::move(row));
    }
    j["biases"] = std::move(biases);
    open_out(path) << j.dump() << "\n";
}

NetworkModel load_model(const std::string& path) {
    const json j = read_json_file(path);
    NetworkModel model;
    try {
        model.layer_dims = j.at("layer_dims").get<std::vector<int>>();
        const std::string head = j.at("output_head").get<std::string>();
        if (head == "softmax_cross_entropy")
            model.output_head = OutputHead::SoftmaxCrossEntropy;
        else if (head == "identity_squared_error")
            model.output_head = OutputHead::IdentitySquaredError;
        else
            throw DataError(path + ": unknown output head '" + head + "'");
        model.rng_seed = j.value("rng_seed", 0ULL);
        for (const json& w : j.at("weights")) model.weights.push_back(matrix_from_json(w));
        for (const json& b : j.at("biases")) {
            Vector v(static_cast<Eigen::Index>(b.size()));
            for (std::size_t i = 0; i < b.size(); ++i) v[static_cast<Eigen::Index>(i)] = b[i];
            model.biases.push_back(std::move(v));
        }
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    if (model.weights.size() + 1 != model.layer_dims.size())
        throw DataError(path + ": layer count mismatch");
    for (std::size_t k = 0; k < model.weights.size(); ++k) {
        if (model.weights[k].rows() != model.layer_dims[k] ||
            model.weights[k].cols() != model.layer_dims[k + 1] ||
            model.biases[k].size() != model.layer_dims[k + 1])
            throw DataError(path + ": weight shapes do not chain");
    }
    return model;
}

RunSummary read_run_summary(const std::string& report_json_path) {
    const json j = read_json_file(report_json_path);
    RunSummary s;
    try {
        s.initial_test_loss = j.at("initial_test_loss").get<double>();
        s.final_test_loss = j.at("final_test_loss").get<double>();
        if (j.contains("initial_test_error"))
            s.initial_test_error = j["initial_test_error"].get<double>();
        if (j.contains("final_test_error")) s.final_test_error = j["final_test_error"].get<double>();
        s.n_selected = static_cast<int>(j.at("selected").size());
        s.estimated_fdr = j.at("eta_hat_final").get<double>();
        if (j.contains("confusion")) {
            s.true_positives = j["confusion"].at("tp").get<int>();
            s.actual_fdr = j["confusion"].at("actual_fdr").get<double>();
        }
    } catch (const json::exception& e) {
        throw DataError(report_json_path + ": " + e.what());
    }
    return s;
}

std::vector<Aggregate> aggregate_runs(const std::vector<RunSummary>& runs) {
    if (runs.empty()) throw ConfigError("no runs to aggregate");
    auto stat = [&](const std::string& name, auto getter) -> std::optional<Aggregate> {
        std::vector<double> values;
        for (const RunSummary& r : runs) {
            const std::optional<double> v = getter(r);
            if (v) values.push_back(*v);
        }
        if (values.empty()) return std::nullopt;
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        const double sd =
            values.size() > 1 ? std::sqrt(ss / (static_cast<double>(values.size()) - 1.0)) : 0.0;
        return Aggregate{name, mean, sd, static_cast<int>(values.size())};
    };

    std::vector<Aggregate> rows;
    auto push = [&](std::optional<Aggregate> a) {
        if (a) rows.push_back(*a);
    };
    push(stat("initial_test_loss", [](const RunSummary& r) -> std::optional<double> {
        return r.initial_test_loss;
    }));
    push(stat("final_test_loss", [](const RunSummary& r) -> std::optional<double> {
        return r.final_test_loss;
    }));
    push(stat("initial_test_error",
              [](const RunSummary& r) -> std::optional<double> { return r.initial_test_error; }));
    push(stat("final_test_error",
              [](const RunSummary& r) -> std::optional<double> { return r.final_test_error; }));
    push(stat("n_selected", [](const RunSummary& r) -> std::optional<double> {
        return static_cast<double>(r.n_selected);
    }));
    push(stat("true_positives", [](const RunSummary& r) -> std::optional<double> {
        if (r.true_positives < 0) return std::nullopt;
        return static_cast<double>(r.true_positives);
    }));
    push(stat("estimated_fdr",
              [](const RunSummary& r) -> std::optional<double> { return r.estimated_fdr; }));
    push(stat("actual_fdr", [](const RunSummary& r) -> std::optional<double> {
        if (r.actual_fdr < 0) return std::nullopt;
        return r.actual_fdr;
    }));
    return rows;
}

void write_aggregate_csv(const std::vector<Aggregate>& rows, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "metric,mean,sd,n\n";
    for (const Aggregate& a : rows)
        out << a.metric << "," << format_double(a.mean) << "," << format_double(a.sd) << "," << a.n
            << "\n";
}

}  // namespace survnet
