#include "survnet/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "survnet/errors.hpp"
#include "survnet/net.hpp"

namespace survnet {

namespace {

std::vector<int> random_class_halves(int n, std::mt19937_64& rng) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<int> labels(n, 0);
    for (int i = 0; i < n / 2; ++i) labels[idx[i]] = 1;  // class 1 is the shifted class C1
    return labels;
}

/// p_prime distinct column ids in draw order (not sorted); the caller decides
/// whether order matters.
std::vector<int> pick_significant(int p, int p_prime, std::mt19937_64& rng) {
    std::vector<int> cols(p);
    std::iota(cols.begin(), cols.end(), 0);
    std::shuffle(cols.begin(), cols.end(), rng);
    cols.resize(p_prime);
    return cols;
}

Matrix uniform_matrix(int n, int p, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Matrix x(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) x(i, j) = dist(rng);
    return x;
}

void check_sim_spec(const SimSpec& spec) {
    if (spec.n < 2) throw ConfigError("simulation needs n >= 2");
    if (spec.p < 1) throw ConfigError("simulation needs p >= 1");
    if (spec.p_prime < 0 || spec.p_prime > spec.p)
        throw ConfigError("p_prime must be in [0, p]");
}

std::vector<int> sorted_truth(std::vector<int> cols) {
    std::sort(cols.begin(), cols.end());
    return cols;
}

/// Shift the mean of each chosen column in class 1 by a per-column signed delta.
void apply_mean_shift(Matrix& x, const std::vector<int>& labels, const std::vector<int>& cols,
                      std::mt19937_64& rng) {
    std::uniform_real_distribution<double> delta_dist(0.1, 0.3);
    std::bernoulli_distribution sign_dist(0.5);
    for (int j : cols) {
        const double delta = delta_dist(rng);
        const double sign = sign_dist(rng) ? 1.0 : -1.0;
        for (int i = 0; i < static_cast<int>(labels.size()); ++i)
            if (labels[i] == 1) x(i, j) += sign * delta;
    }
}

std::uint32_t read_be32(std::istream& in, const std::string& path, std::size_t offset) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in) {
        std::ostringstream msg;
        msg << path << ": truncated at byte " << offset;
        throw DataError(msg.str());
    }
    return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
           (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

}  // namespace

std::vector<int> LabeledDataset::rows_in(SplitTag tag) const {
    std::vector<int> rows;
    for (std::size_t i = 0; i < split.size(); ++i)
        if (split[i] == tag) rows.push_back(static_cast<int>(i));
    return rows;
}

Matrix LabeledDataset::targets() const {
    if (is_classification()) return one_hot(labels, n_classes);
    Matrix t(y.size(), 1);
    t.col(0) = y;
    return t;
}

LabeledDataset gen_dataset1(const SimSpec& spec) {
    check_sim_spec(spec);
    std::mt19937_64 rng(spec.seed);
    LabeledDataset out;
    out.x = uniform_matrix(spec.n, spec.p, 0.0, 1.0, rng);
    out.labels = random_class_halves(spec.n, rng);
    out.n_classes = 2;
    std::vector<int> cols = pick_significant(spec.p, spec.p_prime, rng);
    std::sort(cols.begin(), cols.end());
    apply_mean_shift(out.x, out.labels, cols, rng);
    out.truth = cols;
    return out;
}

LabeledDataset gen_dataset2(const LabeledDataset& images, const SimSpec& spec) {
    if (spec.p_prime < 0 || spec.p_prime > images.p())
        throw ConfigError("p_prime must be in [0, p]");
    // A useful run needs both pseudo-classes populated and room for a split.
    if (images.n() < 100) throw ConfigError("need at least 100 images for the pseudo-class scheme");
    std::mt19937_64 rng(spec.seed);
    LabeledDataset out;
    out.x = images.x;
    out.grid = images.grid;
    out.labels = random_class_halves(out.n(), rng);
    out.n_classes = 2;
    std::vector<int> cols = pick_significant(out.p(), spec.p_prime, rng);
    std::sort(cols.begin(), cols.end());
    apply_mean_shift(out.x, out.labels, cols, rng);
    out.truth = cols;
    return out;
}

LabeledDataset gen_dataset3(const SimSpec& spec) {
    check_sim_spec(spec);
    std::mt19937_64 rng(spec.seed);
    LabeledDataset out;
    out.x = uniform_matrix(spec.n, spec.p, 0.0, 1.0, rng);
    out.labels = random_class_halves(spec.n, rng);
    out.n_classes = 2;
    std::vector<int> cols = pick_significant(spec.p, spec.p_prime, rng);
    std::sort(cols.begin(), cols.end());
    // Per-entry signed deltas: class means stay equal, the variance inflates.
    std::uniform_real_distribution<double> delta_dist(0.8, 1.0);
    std::bernoulli_distribution sign_dist(0.5);
    for (int j : cols) {
        for (int i = 0; i < spec.n; ++i) {
            if (out.labels[i] != 1) continue;
            const double delta = delta_dist(rng);
            const double sign = sign_dist(rng) ? 1.0 : -1.0;
            out.x(i, j) += sign * delta;
        }
    }
    out.truth = cols;
    return out;
}

LabeledDataset gen_dataset4(const SimSpec& spec, double signal_scale) {
    check_sim_spec(spec);
    if (spec.p_prime % 4 != 0 || spec.p_prime == 0)
        throw ConfigError("the regression scheme needs p_prime divisible by 4");
    std::mt19937_64 rng(spec.seed);
    LabeledDataset out;
    out.x = uniform_matrix(spec.n, spec.p, -1.0, 1.0, rng);

    // Group structure over the chosen columns, in draw order: linear terms,
    // sin terms, exp terms, relu terms; each group contributes one interaction
    // between its last two columns.
    const std::vector<int> chosen = pick_significant(spec.p, spec.p_prime, rng);
    const int g = spec.p_prime / 4;

    std::uniform_real_distribution<double> b_dist(1.0, 3.0);
    std::bernoulli_distribution sign_dist(0.5);
    std::normal_distribution<double> noise(0.0, 1.0);

    std::vector<double> beta(spec.p_prime);
    for (int j = 0; j < spec.p_prime; ++j) {
        const double b = b_dist(rng);
        beta[j] = (sign_dist(rng) ? 1.0 : -1.0) * b * signal_scale;
    }
    std::vector<double> beta_int(4);
    for (int t = 0; t < 4; ++t) {
        const double b = b_dist(rng);
        beta_int[t] = (sign_dist(rng) ? 1.0 : -1.0) * b * signal_scale;
    }

    out.y.resize(spec.n);
    for (int i = 0; i < spec.n; ++i) {
        double v = 0.0;
        for (int j = 0; j < spec.p_prime; ++j) {
            const double xv = out.x(i, chosen[j]);
            if (j < g)
                v += beta[j] * xv;
            else if (j < 2 * g)
                v += beta[j] * std::sin(xv);
            else if (j < 3 * g)
                v += beta[j] * std::exp(xv);
            else
                v += beta[j] * std::max(0.0, xv);
        }
        for (int t = 0; t < 4; ++t) {
            const int a = chosen[(t + 1) * g - 2];
            const int b = chosen[(t + 1) * g - 1];
            v += beta_int[t] * out.x(i, a) * out.x(i, b);
        }
        out.y[i] = v + noise(rng);
    }
    out.truth = sorted_truth(chosen);
    return out;
}

LabeledDataset generate(const SimSpec& spec) {
    switch (spec.scheme) {
        case Scheme::IndepMeanShift:
            return gen_dataset1(spec);
        case Scheme::CorrelatedMeanShift: {
            // Offline stand-in; real image data goes through gen_dataset2 directly.
            LabeledDataset images =
                correlated_grid_images(spec.n, 28, 28, mix_seed(spec.seed, 0x1a6e5));
            return gen_dataset2(images, spec);
        }
        case Scheme::VarianceInflation:
            return gen_dataset3(spec);
        case Scheme::NonlinearRegression:
            return gen_dataset4(spec);
    }
    throw ConfigError("unknown simulation scheme");
}

LabeledDataset correlated_grid_images(int n, int h, int w, std::uint64_t seed) {
    if (n < 1 || h < 1 || w < 1) throw ConfigError("grid image generation needs n, h, w >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int p = h * w;
    // Kernel: center 1, orthogonal neighbors 1/2. Interior neighbor correlation
    // is 2c/(1+4c^2) = 0.5 at c = 1/2; interior variance is 1 + 4c^2 = 2.
    const double kTargetSd = std::sqrt(1.0 / 12.0);  // match U(0,1) scale
    LabeledDataset out;
    out.x.resize(n, p);
    out.grid = {{h, w}};
    out.labels.assign(n, 0);
    out.n_classes = 2;
    std::vector<double> z(static_cast<std::size_t>(p));
    for (int i = 0; i < n; ++i) {
        for (auto& v : z) v = gauss(rng);
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                double v = z[static_cast<std::size_t>(r) * w + c];
                if (r > 0) v += 0.5 * z[static_cast<std::size_t>(r - 1) * w + c];
                if (r + 1 < h) v += 0.5 * z[static_cast<std::size_t>(r + 1) * w + c];
                if (c > 0) v += 0.5 * z[static_cast<std::size_t>(r) * w + c - 1];
                if (c + 1 < w) v += 0.5 * z[static_cast<std::size_t>(r) * w + c + 1];
                out.x(i, r * w + c) = 0.5 + kTargetSd * v / std::sqrt(2.0);
            }
        }
    }
    return out;
}

LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw DataError(images_path + ": cannot open");
    const std::uint32_t img_magic = read_be32(img, images_path, 0);
    if (img_magic != 0x00000803) {
        std::ostringstream msg;
        msg << images_path << ": bad magic 0x" << std::hex << img_magic << " at byte 0";
        throw DataError(msg.str());
    }
    const std::uint32_t count = read_be32(img, images_path, 4);
    const std::uint32_t rows = read_be32(img, images_path, 8);
    const std::uint32_t cols = read_be32(img, images_path, 12);

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw DataError(labels_path + ": cannot open");
    const std::uint32_t lab_magic = read_be32(lab, labels_path, 0);
    if (lab_magic != 0x00000801) {
        std::ostringstream msg;
        msg << labels_path << ": bad magic 0x" << std::hex << lab_magic << " at byte 0";
        throw DataError(msg.str());
    }
    const std::uint32_t lab_count = read_be32(lab, labels_path, 4);
    if (lab_count != count) throw DataError(labels_path + ": label count does not match image count");

    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    LabeledDataset out;
    out.x.resize(count, static_cast<Eigen::Index>(pixels));
    out.grid = {{static_cast<int>(rows), static_cast<int>(cols)}};
    std::vector<unsigned char> buf(pixels);
    for (std::uint32_t i = 0; i < count; ++i) {
        img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels));
        if (!img) {
            std::ostringstream msg;
            msg << images_path << ": truncated at byte " << (16 + static_cast<std::size_t>(i) * pixels);
            throw DataError(msg.str());
        }
        for (std::size_t j = 0; j < pixels; ++j)
            out.x(i, static_cast<Eigen::Index>(j)) = buf[j] / 255.0;
    }
    out.labels.resize(count);
    int max_label = 0;
    for (std::uint32_t i = 0; i < count; ++i) {
        char c;
        lab.read(&c, 1);
        if (!lab) {
            std::ostringstream msg;
            msg << labels_path << ": truncated at byte " << (8 + i);
            throw DataError(msg.str());
        }
        out.labels[i] = static_cast<unsigned char>(c);
        max_label = std::max(max_label, out.labels[i]);
    }
    out.n_classes = max_label + 1;
    return out;
}

LabeledDataset load_idx_with_official_split(const std::string& train_images,
                                            const std::string& train_labels,
                                            const std::string& test_images,
                                            const std::string& test_labels,
                                            int validation_count) {
    LabeledDataset tr = load_idx(train_images, train_labels);
    LabeledDataset te = load_idx(test_images, test_labels);
    if (tr.p() != te.p()) throw DataError("train and test image shapes differ");
    if (validation_count < 0 || validation_count >= tr.n())
        throw ConfigError("validation_count must be in [0, train size)");
    LabeledDataset out;
    out.x.resize(tr.n() + te.n(), tr.p());
    out.x.topRows(tr.n()) = tr.x;
    out.x.bottomRows(te.n()) = te.x;
    out.labels = tr.labels;
    out.labels.insert(out.labels.end(), te.labels.begin(), te.labels.end());
    out.n_classes = std::max(tr.n_classes, te.n_classes);
    out.grid = tr.grid;
    out.split.assign(static_cast<std::size_t>(out.n()), SplitTag::Train);
    for (int i = 0; i < validation_count; ++i) out.split[i] = SplitTag::Validation;
    for (int i = 0; i < te.n(); ++i) out.split[static_cast<std::size_t>(tr.n() + i)] = SplitTag::Test;
    return out;
}

LabeledDataset filter_classes(const LabeledDataset& data, const std::vector<int>& digits) {
    if (digits.size() < 2) throw ConfigError("need at least two classes to keep");
    LabeledDataset out;
    std::vector<int> keep;
    std::vector<int> new_label;
    for (int i = 0; i < data.n(); ++i) {
        auto it = std::find(digits.begin(), digits.end(), data.labels[i]);
        if (it == digits.end()) continue;
        keep.push_back(i);
        new_label.push_back(static_cast<int>(it - digits.begin()));
    }
    if (keep.empty()) throw DataError("no rows match the requested classes");
    out.x = select_rows(data.x, keep);
    out.labels = std::move(new_label);
    out.n_classes = static_cast<int>(digits.size());
    out.grid = data.grid;
    if (!data.split.empty()) {
        out.split.reserve(keep.size());
        for (int i : keep) out.split.push_back(data.split[static_cast<std::size_t>(i)]);
    }
    return out;
}

LabeledDataset load_csv(const std::string& path, const std::string& target, bool has_header,
                        TargetKind kind) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open");

    std::string line;
    std::vector<std::string> header;
    if (has_header) {
        if (!std::getline(in, line)) throw DataError(path + ": empty file");
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }

    std::vector<std::vector<double>> rows;
    int n_cols = -1;
    int row_no = has_header ? 1 : 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        int col_no = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(cell, &pos));
                if (pos != cell.size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                std::ostringstream msg;
                msg << path << ": non-numeric cell at row " << row_no << ", col " << col_no;
                throw DataError(msg.str());
            }
            ++col_no;
        }
        if (n_cols < 0) n_cols = col_no;
        if (col_no != n_cols) {
            std::ostringstream msg;
            msg << path << ": row " << row_no << " has " << col_no << " cells, expected " << n_cols;
            throw DataError(msg.str());
        }
        rows.push_back(std::move(row));
        ++row_no;
    }
    if (rows.empty()) throw DataError(path + ": no data rows");

    int target_col = -1;
    if (!target.empty() && target[0] == '#') {
        target_col = std::stoi(target.substr(1));
    } else {
        auto it = std::find(header.begin(), header.end(), target);
        if (it != header.end()) target_col = static_cast<int>(it - header.begin());
    }
    if (target_col < 0 || target_col >= n_cols)
        throw ConfigError("target column '" + target + "' not found");

    LabeledDataset out;
    out.x.resize(static_cast<Eigen::Index>(rows.size()), n_cols - 1);
    Vector raw_target(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        int k = 0;
        for (int j = 0; j < n_cols; ++j) {
            if (j == target_col)
                raw_target[static_cast<Eigen::Index>(i)] = rows[i][static_cast<std::size_t>(j)];
            else
                out.x(static_cast<Eigen::Index>(i), k++) = rows[i][static_cast<std::size_t>(j)];
        }
    }

    bool classes = kind == TargetKind::Classes;
    if (kind == TargetKind::Auto) {
        std::set<double> distinct;
        bool integral = true;
        for (Eigen::Index i = 0; i < raw_target.size(); ++i) {
            const double v = raw_target[i];
            if (v < 0.0 || v != std::floor(v)) {
                integral = false;
                break;
            }
            distinct.insert(v);
        }
        classes = integral && distinct.size() >= 2 && distinct.size() <= 20;
    }
    if (classes) {
        out.labels.resize(static_cast<std::size_t>(raw_target.size()));
        int max_label = 0;
        for (Eigen::Index i = 0; i < raw_target.size(); ++i) {
            const double v = raw_target[i];
            if (v < 0.0 || v != std::floor(v))
                throw DataError(path + ": class targets must be nonnegative integers");
            out.labels[static_cast<std::size_t>(i)] = static_cast<int>(v);
            max_label = std::max(max_label, static_cast<int>(v));
        }
        out.n_classes = max_label + 1;
    } else {
        out.y = raw_target;
    }
    return out;
}

void assign_split(LabeledDataset& data, std::uint64_t seed) {
    const int n = data.n();
    if (n < 5) throw ConfigError("dataset too small to split");
    const int n_trainval = static_cast<int>(std::lround(0.8 * n));
    const int n_val = static_cast<int>(std::lround(0.3 * n_trainval));
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    data.split.assign(static_cast<std::size_t>(n), SplitTag::Test);
    for (int i = 0; i < n_val; ++i) data.split[static_cast<std::size_t>(idx[i])] = SplitTag::Validation;
    for (int i = n_val; i < n_trainval; ++i)
        data.split[static_cast<std::size_t>(idx[i])] = SplitTag::Train;
}

std::vector<int> standardize(LabeledDataset& data) {
    if (data.split.empty()) throw ConfigError("standardize needs split labels (train stats)");
    const std::vector<int> train_rows = data.rows_in(SplitTag::Train);
    if (train_rows.size() < 2) throw ConfigError("standardize needs at least two training rows");
    std::vector<int> constant_cols;
    const double n = static_cast<double>(train_rows.size());
    for (int j = 0; j < data.p(); ++j) {
        double mean = 0.0;
        for (int i : train_rows) mean += data.x(i, j);
        mean /= n;
        double ss = 0.0;
        for (int i : train_rows) ss += (data.x(i, j) - mean) * (data.x(i, j) - mean);
        const double sd = std::sqrt(ss / (n - 1.0));
        data.x.col(j).array() -= mean;
        if (sd > 0.0)
            data.x.col(j) /= sd;
        else
            constant_cols.push_back(j);
    }
    return constant_cols;
}

}  // namespace survnet
