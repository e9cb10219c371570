#pragma once

#include <string>
#include <vector>

namespace looplab {

// Least squares on (log x, log y).
struct FitResult {
    bool fitted = false;
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // sum of squared log residuals
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string status;  // "fitted", "budget-dominated-by-roundoff", "too-few-points"
};

// Fails (fitted = false) unless every x, y is strictly positive and there are at least
// three points. pass means |slope - expected| <= tolerance.
FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double expected = 0.0,
                     double tolerance = 0.3);

}  // namespace looplab
