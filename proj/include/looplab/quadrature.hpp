#pragma once

#include <vector>

namespace looplab {

// Gauss-Legendre rule mapped to [0,1]. Tables are cached per node count.
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
    int size() const { return static_cast<int>(x.size()); }
};

const GaussRule& gauss01(int n);

// Composite rule on [a,b]: `panels` equal panels of `n` Gauss nodes each.
GaussRule composite(double a, double b, int panels, int n);

}  // namespace looplab
