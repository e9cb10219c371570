#include "looplab/fit.hpp"

#include <gsl/gsl_fit.h>

#include <cmath>

namespace looplab {

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double expected, double tolerance) {
    FitResult f;
    f.expected = expected;
    f.tolerance = tolerance;
    if (x.size() != y.size() || x.size() < 3) {
        f.status = "too-few-points";
        return f;
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) {
            f.status = "budget-dominated-by-roundoff";
            return f;
        }
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    double c0, c1, cov00, cov01, cov11, sumsq;
    gsl_fit_linear(lx.data(), 1, ly.data(), 1, lx.size(), &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
    f.fitted = true;
    f.slope = c1;
    f.intercept = c0;
    f.residual = sumsq;
    f.pass = std::abs(c1 - expected) <= tolerance;
    f.status = "fitted";
    return f;
}

}  // namespace looplab
