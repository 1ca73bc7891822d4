#pragma once

#include <cstdint>
#include <vector>

#include "survnet/util.hpp"

namespace survnet {

/// Original data matrix bound together with generated surrogate null columns.
/// Columns 0..p-1 are the originals, p..p+q-1 the surrogates; downstream code
/// addresses columns by these stable global ids.
struct AugmentedDataset {
    Matrix x;  // n x (p+q)
    int p = 0;
    int q = 0;
    std::vector<bool> active;  // per column, all true at construction
    std::uint64_t rng_seed = 0;

    bool is_surrogate(int col) const { return col >= p; }
    int n_active() const;
    /// Active global column ids, ascending.
    std::vector<int> active_columns() const;
    /// Active matrix view (active columns in ascending global order).
    Matrix active_matrix() const;
};

/// Bind q surrogate columns to x. Surrogate entries are drawn from the entries of x:
/// a full permutation when q == p, sampling without replacement when q < p, with
/// replacement when q > p. Targets are never consulted, so surrogates are null by
/// construction.
AugmentedDataset augment(const Matrix& x, int q, std::uint64_t seed);

struct Counts {
    int r = 0;   // active columns
    int r0 = 0;  // active surrogate columns
};

Counts counts(const AugmentedDataset& state);

/// Mark the given active columns inactive. Deactivating an already-inactive column
/// throws LogicError: the selection loop never eliminates a column twice.
void deactivate(AugmentedDataset& state, const std::vector<int>& column_ids);

}  // namespace survnet
