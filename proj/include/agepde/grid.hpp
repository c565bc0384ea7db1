// Uniform age grids and per-node tabulated rate functions.
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace agepde {

struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Nodes 0, da, ..., a_max with da = a_max / n_cells.
struct AgeGrid {
    double a_max = 0.0;
    std::size_t n_cells = 0;

    AgeGrid() = default;
    AgeGrid(double a_max_, std::size_t n_cells_) : a_max(a_max_), n_cells(n_cells_) {
        if (!(a_max > 0.0) || n_cells < 2)
            throw ConfigError("AgeGrid: need a_max > 0 and n_cells >= 2");
    }

    double da() const { return a_max / static_cast<double>(n_cells); }
    std::size_t n_nodes() const { return n_cells + 1; }
    double node(std::size_t i) const { return static_cast<double>(i) * da(); }

    friend bool operator==(const AgeGrid& a, const AgeGrid& b) {
        return a.a_max == b.a_max && a.n_cells == b.n_cells;
    }
};

// Nonnegative rate or kernel sampled at the grid nodes.
class AgeFunction {
  public:
    AgeFunction() = default;
    AgeFunction(AgeGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.n_nodes())
            throw StructuralError("AgeFunction: values length does not match grid nodes");
        for (double v : values_)
            if (!(v >= 0.0)) throw DomainError("AgeFunction: negative or NaN value");
    }

    static AgeFunction constant(AgeGrid grid, double v) {
        return AgeFunction(grid, std::vector<double>(grid.n_nodes(), v));
    }

    // Piecewise-linear interpolation of (age, value) pairs onto the grid,
    // constant extrapolation outside the table range.
    static AgeFunction from_table(AgeGrid grid, std::span<const std::pair<double, double>> table);

    template <class F>
    static AgeFunction sample(AgeGrid grid, F&& f) {
        std::vector<double> v(grid.n_nodes());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.node(i));
        return AgeFunction(grid, std::move(v));
    }

    const AgeGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }

    double max() const;
    double min() const;

  private:
    AgeGrid grid_;
    std::vector<double> values_;
};

inline void require_same_grid(const AgeGrid& a, const AgeGrid& b, const char* where) {
    if (!(a == b)) throw StructuralError(std::string(where) + ": grid mismatch");
}

}  // namespace agepde
