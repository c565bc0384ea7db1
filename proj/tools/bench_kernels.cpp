// Compares the OpenMP kernels against their serial references: reduction,
// decayed quadrature, and the transport step.
#include <chrono>
#include <cstdio>
#include <random>

#include "agepde/model.hpp"
#include "agepde/parallel.hpp"
#include "agepde/pde.hpp"
#include "agepde/quadrature.hpp"

using namespace agepde;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

double g_sink = 0.0;

template <class F>
double time_ms(int reps, F&& f) {
    const double t0 = now_ms();
    for (int r = 0; r < reps; ++r) g_sink += f();
    return (now_ms() - t0) / reps;
}

}  // namespace

int main() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    for (std::size_t n : {100000ul, 1000000ul, 4000000ul}) {
        std::vector<double> x(n);
        for (auto& v : x) v = u(rng);
        const double t_serial = time_ms(20, [&] { return serial_sum(x); });
        const double t_block = time_ms(20, [&] { return block_sum(x); });
        const double gap = std::abs(serial_sum(x) - block_sum(x));
        std::printf("sum        n=%8zu  serial %8.3f ms  blocked %8.3f ms  speedup %5.2fx  |diff| %.3e\n",
                    n, t_serial, t_block, t_serial / t_block, gap);
    }

    const AgeGrid grid(24.0, 960000);
    std::vector<double> f(grid.n_nodes());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(-0.1 * grid.node(i));
    const double t_naive = time_ms(5, [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * std::exp(-0.7 * grid.node(i));
        return grid.da() * s;
    });
    const double t_fast = time_ms(5, [&] { return integrate_decayed(grid, f, 0.7); });
    std::printf("decayed    n=%8zu  per-node-exp %6.3f ms  blocked-power %6.3f ms  speedup %5.2fx\n",
                grid.n_nodes(), t_naive, t_fast, t_naive / t_fast);

    const AgeGrid sg(24.0, 9600);
    ModelParams params(AgeFunction::constant(sg, 2.0), AgeFunction::constant(sg, 0.1),
                       AgeFunction::constant(sg, 1.0), AgeFunction::constant(sg, 1.0), 0.0, 0.0,
                       1.0, 0.0, 0.0, 1.0);
    PopulationState state(0.0, AgeFunction::sample(sg, [](double a) { return std::exp(-a); }),
                          AgeFunction::constant(sg, 0.0), params);
    const double t_step = time_ms(50, [&] {
        const auto next = pde::step(state, params, sg.da());
        return next.N1;
    });
    std::printf("pde step   n=%8zu  %8.3f ms per step\n", sg.n_nodes(), t_step);
    return 0;
}
