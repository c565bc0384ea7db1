// Real roots of quadratics and cubics: closed-form discriminant method
// followed by one Newton polish, so near-double roots are not missed.
#pragma once

#include <vector>

namespace agepde {

// Roots of a x^2 + b x + c = 0, stable form (no subtractive cancellation).
// Degenerates to the linear root when a == 0. Complex pairs yield no roots.
std::vector<double> real_roots_quadratic(double a, double b, double c);

// Real roots of a3 x^3 + a2 x^2 + a1 x + a0 = 0, with degeneration to the
// quadratic/linear cases when leading coefficients vanish (relative to the
// largest coefficient magnitude).
std::vector<double> real_roots_cubic(double a3, double a2, double a1, double a0);

// One-dimensional Newton polish of x for the polynomial with the given
// coefficients (highest degree first); falls back to the input when the
// derivative is tiny.
double polish_root(const std::vector<double>& coeffs_high_to_low, double x, int iterations = 2);

}  // namespace agepde
