#include "agepde/quadrature.hpp"

#include <cmath>

#include "agepde/parallel.hpp"

namespace agepde {

namespace {
constexpr std::size_t kExpBlock = 1024;
}

double integrate(const AgeGrid& grid, std::span<const double> values) {
    if (values.size() != grid.n_nodes())
        throw StructuralError("integrate: values length does not match grid nodes");
    const double s = block_sum(values);
    return grid.da() * (s - 0.5 * (values.front() + values.back()));
}

double integrate(const AgeFunction& f) { return integrate(f.grid(), f.values()); }

double integrate_product(const AgeFunction& f, const AgeFunction& g) {
    require_same_grid(f.grid(), g.grid(), "integrate_product");
    const std::size_t n = f.size();
    std::vector<double> prod(n);
    for_each_index(n, [&](std::size_t i) { prod[i] = f[i] * g[i]; });
    return integrate(f.grid(), prod);
}

std::vector<double> exp_decay_nodes(const AgeGrid& grid, double lambda) {
    const std::size_t n = grid.n_nodes();
    std::vector<double> w(n);
    const double da = grid.da();
    const double r = std::exp(-lambda * da);
    const std::size_t nblocks = (n + kExpBlock - 1) / kExpBlock;
    for_each_index(nblocks, [&](std::size_t bi) {
        const std::size_t lo = bi * kExpBlock;
        const std::size_t hi = lo + kExpBlock < n ? lo + kExpBlock : n;
        double cur = std::exp(-lambda * grid.node(lo));
        for (std::size_t j = lo; j < hi; ++j) {
            w[j] = cur;
            cur *= r;
        }
    });
    return w;
}

double integrate_decayed(const AgeGrid& grid, std::span<const double> values, double lambda) {
    if (values.size() != grid.n_nodes())
        throw StructuralError("integrate_decayed: values length does not match grid nodes");
    const std::size_t n = values.size();
    const double da = grid.da();
    const double r = std::exp(-lambda * da);
    const std::size_t nblocks = (n + kExpBlock - 1) / kExpBlock;
    std::vector<double> partial(nblocks);
    for_each_index(nblocks, [&](std::size_t bi) {
        const std::size_t lo = bi * kExpBlock;
        const std::size_t hi = lo + kExpBlock < n ? lo + kExpBlock : n;
        double cur = std::exp(-lambda * grid.node(lo));
        double s = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            s += values[j] * cur;
            cur *= r;
        }
        partial[bi] = s;
    });
    double s = 0.0;
    for (double p : partial) s += p;
    const double first = values.front();
    const double last = values.back() * std::exp(-lambda * grid.a_max);
    return da * (s - 0.5 * (first + last));
}

AgeFunction cumulative_hazard(const AgeFunction& k) {
    return AgeFunction(k.grid(), cumulative_trapezoid(k.grid(), k.values()));
}

std::vector<double> cumulative_trapezoid(const AgeGrid& grid, std::span<const double> values) {
    if (values.size() != grid.n_nodes())
        throw StructuralError("cumulative_trapezoid: values length does not match grid nodes");
    const double h = 0.5 * grid.da();
    std::vector<double> out(values.size());
    out[0] = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i)
        out[i] = out[i - 1] + h * (values[i - 1] + values[i]);
    return out;
}

std::vector<double> suffix_decayed_integral(const AgeGrid& grid, std::span<const double> values,
                                            double lambda, double extra_rate_at_amax) {
    if (values.size() != grid.n_nodes())
        throw StructuralError("suffix_decayed_integral: values length does not match grid nodes");
    const std::size_t n = values.size();
    const std::vector<double> w = exp_decay_nodes(grid, lambda);
    std::vector<double> out(n);
    const double rate = extra_rate_at_amax + lambda;
    double tail = rate > 0.0 ? values.back() * w.back() / rate : 0.0;
    out[n - 1] = tail;
    const double h = 0.5 * grid.da();
    for (std::size_t i = n - 1; i-- > 0;)
        out[i] = out[i + 1] + h * (values[i] * w[i] + values[i + 1] * w[i + 1]);
    return out;
}

}  // namespace agepde
