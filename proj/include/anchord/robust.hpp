#pragma once

#include <cmath>

namespace anchord {

/// Huber thresholds shared by all factor types: delta1 for the metric
/// residuals (MDE alignment, sensor consistency), delta2 for the
/// log-slope residuals.
struct HuberParams {
    double delta1 = 0.002;
    double delta2 = 0.01;
};

/// Huber cost: r^2 / 2 inside the threshold, delta * (|r| - delta / 2)
/// outside. Continuous with continuous first derivative.
inline double huber_cost(double r, double delta) {
    const double a = std::abs(r);
    if (a <= delta) return 0.5 * r * r;
    return delta * (a - 0.5 * delta);
}

/// IRLS weight of the Huber cost: w(r) * r^2 / 2 equals the quadratic
/// majorizer tangent to huber_cost at r. Always in (0, 1] for finite r.
inline double huber_irls_weight(double r, double delta) {
    const double a = std::abs(r);
    if (a <= delta) return 1.0;
    return delta / a;
}

}  // namespace anchord
