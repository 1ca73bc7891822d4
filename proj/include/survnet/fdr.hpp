#pragma once

#include <optional>

namespace survnet {

/// Estimated FDR of the retained original variables when r columns are active,
/// r0 of them surrogates, out of p originals and q surrogates:
///
///     eta_hat = (r0 / (r - r0)) * (p / q)
///
/// The count of truly null originals is unknown, so p stands in as its upper
/// bound; controlling eta_hat therefore also controls the idealized estimate.
/// Returns 0 when r0 == 0, and nullopt when r == r0 > 0 (no originals left; the
/// estimate is undefined and the caller must abort).
std::optional<double> estimate_fdr(int r, int r0, int p, int q);

/// Smallest estimated FDR reachable by eliminating m more variables:
/// (1 - m/r0) * eta_hat. The minimum is attained when all m eliminated
/// variables are surrogates.
double min_next_fdr(int m, int r0, double eta_hat);

/// Number of variables to eliminate in the next step:
///
///     m = ceil(epsilon * (1 - eta_star/eta_hat) * r0),   epsilon in (0, 1]
///
/// Requires eta_hat > eta_star (otherwise the loop should have stopped), which
/// makes m >= 1; m never exceeds r0.
int step_size(double eta_hat, double eta_star, int r0, double epsilon);

/// Exhaustively check the minimum-FDR claim for one (r, r0, p, q, m) cell:
/// over every admissible split m0 (surrogates among the m eliminated), the
/// post-elimination estimate (r0-m0)/(r-r0-(m-m0)) * (p/q) is smallest at
/// m0 = m and equals min_next_fdr within 1e-12. Used by tests as an
/// independent oracle for the formula layer.
bool verify_theorem1(int r, int r0, int p, int q, int m);

}  // namespace survnet
