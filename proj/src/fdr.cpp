#include "survnet/fdr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "survnet/errors.hpp"

namespace survnet {

std::optional<double> estimate_fdr(int r, int r0, int p, int q) {
    if (p < 1 || q < 1) throw ConfigError("p and q must be positive");
    if (r0 < 0 || r < r0) {
        std::ostringstream msg;
        msg << "invalid counts r=" << r << ", r0=" << r0;
        throw LogicError(msg.str());
    }
    if (r0 == 0) return 0.0;
    if (r == r0) return std::nullopt;
    return (static_cast<double>(r0) / (r - r0)) * (static_cast<double>(p) / q);
}

double min_next_fdr(int m, int r0, double eta_hat) {
    if (m < 0 || m > r0) throw std::domain_error("m must be in [0, r0]");
    if (!std::isfinite(eta_hat)) throw std::domain_error("eta_hat must be finite");
    if (m == 0) return eta_hat;
    return (1.0 - static_cast<double>(m) / r0) * eta_hat;
}

int step_size(double eta_hat, double eta_star, int r0, double epsilon) {
    if (!(eta_hat > eta_star))
        throw LogicError("step_size called although the stop condition holds");
    if (r0 < 1) throw LogicError("step_size needs at least one surrogate in the model");
    if (!(epsilon > 0.0) || epsilon > 1.0) throw ConfigError("elimination rate must be in (0, 1]");
    const double raw = epsilon * (1.0 - eta_star / eta_hat) * static_cast<double>(r0);
    int m = static_cast<int>(std::ceil(raw));
    m = std::max(m, 1);
    m = std::min(m, r0);
    return m;
}

bool verify_theorem1(int r, int r0, int p, int q, int m) {
    if (m < 1 || m > r0 || r0 > r) throw std::domain_error("need 1 <= m <= r0 <= r");
    if (r == r0) throw std::domain_error("estimate undefined when no originals remain");
    const double eta_hat = *estimate_fdr(r, r0, p, q);
    const double claimed_min = min_next_fdr(m, r0, eta_hat);

    double best = std::numeric_limits<double>::infinity();
    int best_m0 = -1;
    const int lo = std::max(0, m - (r - r0));
    const int hi = std::min(m, r0);
    for (int m0 = lo; m0 <= hi; ++m0) {
        const int denom = r - r0 - (m - m0);
        // denom == 0 means this split removes every remaining original; the
        // estimate is undefined there, which we treat as +infinity.
        const double value = denom == 0
                                 ? std::numeric_limits<double>::infinity()
                                 : (static_cast<double>(r0 - m0) / denom) *
                                       (static_cast<double>(p) / q);
        if (value < best) {
            best = value;
            best_m0 = m0;
        }
    }
    return best_m0 == m && std::abs(best - claimed_min) <= 1e-12;
}

}  // namespace survnet
