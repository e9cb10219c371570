#pragma once

#include <vector>

namespace looplab {

// Richardson extrapolation of a difference quotient D(h) whose error is even in h:
// D(h), D(h/2), ..., D(h/2^levels) combined with factors 4^m.
template <class T, class F>
T richardson(F&& D, double h, int levels) {
    std::vector<T> row;
    row.reserve(levels + 1);
    double step = h;
    for (int j = 0; j <= levels; ++j, step *= 0.5) row.push_back(D(step));
    double f = 1.0;
    for (int m = 1; m <= levels; ++m) {
        f *= 4.0;
        for (int j = levels; j >= m; --j) row[j] = (1.0 / (f - 1.0)) * (f * row[j] - row[j - 1]);
    }
    return row[levels];
}

// Central first derivative of g at 0 along a scalar parameter.
template <class T, class G>
T central_derivative(G&& g, double h, int levels) {
    return richardson<T>([&](double s) { return (0.5 / s) * (g(s) - g(-s)); }, h, levels);
}

// Mixed second derivative d^2 g / (dx dy) at (0,0).
template <class T, class G>
T mixed_derivative(G&& g, double h, int levels) {
    return richardson<T>(
        [&](double s) { return (0.25 / (s * s)) * ((g(s, s) - g(s, -s)) - (g(-s, s) - g(-s, -s))); }, h, levels);
}

}  // namespace looplab
