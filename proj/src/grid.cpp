#include "agepde/grid.hpp"

#include <algorithm>

namespace agepde {

AgeFunction AgeFunction::from_table(AgeGrid grid, std::span<const std::pair<double, double>> table) {
    if (table.empty()) throw ConfigError("rate table: empty");
    for (std::size_t i = 1; i < table.size(); ++i)
        if (!(table[i].first > table[i - 1].first))
            throw ConfigError("rate table: ages must be strictly increasing");
    std::vector<double> v(grid.n_nodes());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = grid.node(i);
        if (a <= table.front().first) {
            v[i] = table.front().second;
        } else if (a >= table.back().first) {
            v[i] = table.back().second;
        } else {
            std::size_t j = 1;
            while (table[j].first < a) ++j;
            const auto [a0, v0] = table[j - 1];
            const auto [a1, v1] = table[j];
            const double w = (a - a0) / (a1 - a0);
            v[i] = v0 + w * (v1 - v0);
        }
    }
    return AgeFunction(grid, std::move(v));
}

double AgeFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }
double AgeFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }

}  // namespace agepde
