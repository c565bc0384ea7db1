#include "agepde/polyroots.hpp"

#include <algorithm>
#include <cmath>

namespace agepde {

namespace {

double eval_poly(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (double ci : c) v = v * x + ci;
    return v;
}

double eval_dpoly(const std::vector<double>& c, double x) {
    const int deg = static_cast<int>(c.size()) - 1;
    double v = 0.0;
    for (int i = 0; i < deg; ++i) v = v * x + c[static_cast<std::size_t>(i)] * (deg - i);
    return v;
}

}  // namespace

double polish_root(const std::vector<double>& coeffs, double x, int iterations) {
    for (int it = 0; it < iterations; ++it) {
        const double f = eval_poly(coeffs, x);
        const double df = eval_dpoly(coeffs, x);
        if (std::abs(df) < 1e-300) break;
        const double step = f / df;
        if (!std::isfinite(step)) break;
        x -= step;
    }
    return x;
}

std::vector<double> real_roots_quadratic(double a, double b, double c) {
    if (a == 0.0) {
        if (b == 0.0) return {};
        return {-c / b};
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return {};
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sq, b));
    std::vector<double> roots;
    if (q != 0.0) {
        roots.push_back(q / a);
        roots.push_back(c / q);
    } else {
        // b == 0 and disc >= 0
        roots.push_back(sq / (2.0 * a));
        roots.push_back(-sq / (2.0 * a));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<double> real_roots_cubic(double a3, double a2, double a1, double a0) {
    const double scale = std::max({std::abs(a3), std::abs(a2), std::abs(a1), std::abs(a0)});
    if (scale == 0.0) return {};
    if (std::abs(a3) <= 1e-14 * scale) return real_roots_quadratic(a2, a1, a0);

    // Depressed form x = t - p/3 for t^3 + q t + r.
    const double p = a2 / a3;
    const double q = a1 / a3;
    const double r = a0 / a3;
    const double Q = (p * p - 3.0 * q) / 9.0;
    const double R = (p * (2.0 * p * p - 9.0 * q) + 27.0 * r) / 54.0;
    const double R2 = R * R;
    const double Q3 = Q * Q * Q;

    std::vector<double> roots;
    if (R2 < Q3) {
        // three real roots
        double t = R / std::sqrt(Q3);
        t = std::clamp(t, -1.0, 1.0);
        const double theta = std::acos(t);
        const double m = -2.0 * std::sqrt(Q);
        const double shift = p / 3.0;
        roots = {m * std::cos(theta / 3.0) - shift,
                 m * std::cos((theta + 2.0 * M_PI) / 3.0) - shift,
                 m * std::cos((theta - 2.0 * M_PI) / 3.0) - shift};
    } else {
        const double u3 = -R - std::copysign(std::sqrt(R2 - Q3), R);
        const double u = std::cbrt(u3);
        const double v = (u == 0.0) ? 0.0 : Q / u;
        roots = {u + v - p / 3.0};
        // near-double complex pair collapsing onto the real axis
        const double t_imag = 0.5 * std::sqrt(3.0) * (u - v);
        if (std::abs(t_imag) < 1e-12 * (1.0 + std::abs(u + v))) {
            roots.push_back(-0.5 * (u + v) - p / 3.0);
        }
    }
    const std::vector<double> coeffs = {a3, a2, a1, a0};
    for (double& x : roots) x = polish_root(coeffs, x);
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace agepde
