#include "looplab/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace looplab {

const GaussRule& gauss01(int n) {
    if (n < 1) throw std::invalid_argument("gauss01: node count must be positive");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return *it->second;

    auto rule = std::make_unique<GaussRule>();
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
    if (!t) throw std::runtime_error("gauss01: table allocation failed");
    rule->x.resize(n);
    rule->w.resize(n);
    for (int i = 0; i < n; ++i) {
        double xi = 0, wi = 0;
        gsl_integration_glfixed_point(0.0, 1.0, static_cast<size_t>(i), &xi, &wi, t);
        rule->x[i] = xi;
        rule->w[i] = wi;
    }
    gsl_integration_glfixed_table_free(t);
    const GaussRule& ref = *rule;
    cache.emplace(n, std::move(rule));
    return ref;
}

GaussRule composite(double a, double b, int panels, int n) {
    const GaussRule& g = gauss01(n);
    GaussRule out;
    out.x.reserve(static_cast<size_t>(panels) * n);
    out.w.reserve(static_cast<size_t>(panels) * n);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (int i = 0; i < n; ++i) {
            out.x.push_back(lo + h * g.x[i]);
            out.w.push_back(h * g.w[i]);
        }
    }
    return out;
}

}  // namespace looplab
