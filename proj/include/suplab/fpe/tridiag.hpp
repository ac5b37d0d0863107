#pragma once

#include <vector>

#include "suplab/core/errors.hpp"

namespace suplab::fpe {

/// Thomas solve of a tridiagonal system. lower[0] and upper[n-1] are ignored.
/// Overwrites rhs with the solution; scratch must have size n.
inline void solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                              const std::vector<double>& upper, std::vector<double>& rhs,
                              std::vector<double>& scratch) {
    const size_t n = diag.size();
    scratch[0] = upper[0] / diag[0];
    rhs[0] = rhs[0] / diag[0];
    for (size_t i = 1; i < n; ++i) {
        double m = 1.0 / (diag[i] - lower[i] * scratch[i - 1]);
        scratch[i] = upper[i] * m;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) * m;
    }
    for (size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

} // namespace suplab::fpe
