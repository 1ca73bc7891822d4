#include "survnet/surrogate.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "survnet/errors.hpp"

namespace survnet {

int AugmentedDataset::n_active() const {
    return static_cast<int>(std::count(active.begin(), active.end(), true));
}

std::vector<int> AugmentedDataset::active_columns() const {
    std::vector<int> cols;
    cols.reserve(active.size());
    for (std::size_t c = 0; c < active.size(); ++c)
        if (active[c]) cols.push_back(static_cast<int>(c));
    return cols;
}

Matrix AugmentedDataset::active_matrix() const {
    return select_cols(x, active_columns());
}

AugmentedDataset augment(const Matrix& x, int q, std::uint64_t seed) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    if (q < 1) throw ConfigError("surrogate count q must be at least 1");
    if (p < 1) throw ConfigError("need at least one original variable");
    if (n < 2) throw ConfigError("need at least two samples to build surrogates");

    // Flattened entry pool of X, row-major, so the permutation is over all n*p
    // entries rather than per column.
    std::vector<double> pool;
    pool.reserve(static_cast<std::size_t>(n) * p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) pool.push_back(x(i, j));

    std::mt19937_64 rng(seed);
    AugmentedDataset out;
    out.p = p;
    out.q = q;
    out.rng_seed = seed;
    out.x.resize(n, p + q);
    out.x.leftCols(p) = x;
    out.active.assign(static_cast<std::size_t>(p) + q, true);

    const std::size_t needed = static_cast<std::size_t>(n) * q;
    if (q <= p) {
        // q == p: the surrogate block is a permutation of every entry of X.
        // q < p: the shuffle prefix is a without-replacement sample.
        std::shuffle(pool.begin(), pool.end(), rng);
        for (std::size_t s = 0; s < needed; ++s)
            out.x(static_cast<Eigen::Index>(s / q), p + static_cast<Eigen::Index>(s % q)) = pool[s];
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        for (std::size_t s = 0; s < needed; ++s)
            out.x(static_cast<Eigen::Index>(s / q), p + static_cast<Eigen::Index>(s % q)) =
                pool[pick(rng)];
    }
    return out;
}

Counts counts(const AugmentedDataset& state) {
    Counts c;
    for (std::size_t col = 0; col < state.active.size(); ++col) {
        if (!state.active[col]) continue;
        ++c.r;
        if (state.is_surrogate(static_cast<int>(col))) ++c.r0;
    }
    return c;
}

void deactivate(AugmentedDataset& state, const std::vector<int>& column_ids) {
    for (int id : column_ids) {
        if (id < 0 || id >= static_cast<int>(state.active.size())) {
            std::ostringstream msg;
            msg << "column id " << id << " out of range";
            throw LogicError(msg.str());
        }
        if (!state.active[static_cast<std::size_t>(id)]) {
            std::ostringstream msg;
            msg << "column " << id << " is already inactive";
            throw LogicError(msg.str());
        }
        state.active[static_cast<std::size_t>(id)] = false;
    }
}

}  // namespace survnet
