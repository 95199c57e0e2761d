#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "anchord/depth_map.hpp"
#include "anchord/errors.hpp"
#include "anchord/factor_graph.hpp"
#include "anchord/patch_grid.hpp"
#include "anchord/rng.hpp"
#include "anchord/robust.hpp"

namespace anchord {

struct SolverConfig {
    int patch_size = 64;
    FactorWeights weights;
    HuberParams huber;
    int k = 64;                  // pixel sample count for the global affine fit
    std::uint64_t seed = 1;
    int max_iterations = 100;
    double rel_tol = 1e-6;       // relative cost decrease for convergence
    double depth_floor = 1e-4;   // meters; keeps log-slope factors defined
    int cg_max_iterations = 500;
    double cg_tol = 1e-8;        // relative residual target for CG
    double damping_init = 1e-4;  // initial additive diagonal damping
};

struct SolveStats {
    int iterations = 0;
    double initial_cost = 0.0;
    double final_cost = 0.0;
    std::vector<double> cost_trace;  // initial cost, then one entry per accepted step
    bool converged = false;
    bool degenerate_init = false;    // global affine fit fell back to slope 1
};

struct AffineFit {
    double slope = 1.0;
    double bias = 0.0;
    bool degenerate = false;
};

/// Closed-form ordinary least-squares fit sensor ~ slope * mde + bias over
/// min(k, #valid) valid sensor pixels sampled uniformly without
/// replacement with the seeded generator. Deterministic given inputs,
/// k, and seed.
inline AffineFit global_affine_fit(const DepthMap& sensor, const DepthMap& mde, int k,
                                   std::uint64_t seed) {
    if (!sensor.same_shape(mde)) {
        throw InputError("input-invalid", "sensor and prior dimensions differ");
    }
    std::vector<std::size_t> valid_indices;
    valid_indices.reserve(sensor.size());
    for (std::size_t i = 0; i < sensor.size(); ++i) {
        if (sensor.valid[i]) valid_indices.push_back(i);
    }
    if (valid_indices.size() < 2) {
        throw InputError("insufficient-sensor-support", "insufficient sensor support");
    }

    std::vector<std::size_t> sample;
    if (valid_indices.size() <= static_cast<std::size_t>(k)) {
        sample = valid_indices;
    } else {
        Rng rng(seed);
        const auto chosen = rng.sample_without_replacement(static_cast<int>(valid_indices.size()), k);
        sample.reserve(chosen.size());
        for (const int j : chosen) sample.push_back(valid_indices[static_cast<std::size_t>(j)]);
    }

    const auto count = static_cast<double>(sample.size());
    double mean_m = 0.0;
    double mean_y = 0.0;
    for (const auto i : sample) {
        mean_m += mde.values[i];
        mean_y += sensor.values[i];
    }
    mean_m /= count;
    mean_y /= count;

    double cov = 0.0;
    double var = 0.0;
    double scale = 0.0;
    for (const auto i : sample) {
        const double dm = mde.values[i] - mean_m;
        cov += dm * (sensor.values[i] - mean_y);
        var += dm * dm;
        scale += mde.values[i] * mde.values[i];
    }

    AffineFit fit;
    if (var <= 1e-14 * std::max(1.0, scale)) {
        // All sampled prior values (numerically) equal; the slope is
        // unidentifiable. Fall back to unit slope with a mean offset.
        fit.slope = 1.0;
        fit.bias = mean_y - mean_m;
        fit.degenerate = true;
    } else {
        fit.slope = cov / var;
        fit.bias = mean_y - fit.slope * mean_m;
    }
    return fit;
}

/// Initial state: every patch gets the global affine fit and the depth
/// variables start from the scaled prior, clamped at the depth floor.
inline SolveState initialize(const DepthMap& sensor, const DepthMap& mde, const PatchGrid& grid,
                             const SolverConfig& config, AffineFit* fit_out = nullptr) {
    if (sensor.height != grid.height || sensor.width != grid.width || !sensor.same_shape(mde)) {
        throw InputError("input-invalid", "initialize inputs do not match patch grid");
    }
    const AffineFit fit = global_affine_fit(sensor, mde, config.k, config.seed);
    if (fit_out != nullptr) *fit_out = fit;

    SolveState state;
    state.height = grid.height;
    state.width = grid.width;
    state.depth.resize(sensor.size());
    for (std::size_t i = 0; i < sensor.size(); ++i) {
        state.depth[i] = std::max(fit.slope * mde.values[i] + fit.bias, config.depth_floor);
    }
    state.slope.assign(static_cast<std::size_t>(grid.n()), fit.slope);
    state.bias.assign(static_cast<std::size_t>(grid.n()), fit.bias);
    return state;
}

namespace detail {

/// One IRLS linearization of the factor graph around the current state.
/// MDE and sensor residuals are linear in the variables already; the
/// log-slope residual is expanded to first order in depth:
/// log d ~ log d0 + (d - d0) / d0.
struct Linearization {
    int pixel_count = 0;
    int patch_count = 0;
    // Per-pixel factor data.
    std::vector<double> w_mde;   // lambda_mde * huber weight
    std::vector<double> r_mde;
    std::vector<double> w_sen;   // lambda_sen * huber weight, 0 where invalid
    std::vector<double> r_sen;
    std::vector<double> inv_d;   // 1 / depth at the linearization point
    // Per-pair factor data, aligned with FactorSet::slope_pairs.
    std::vector<double> w_slp;
    std::vector<double> r_slp;

    int total_variables() const { return pixel_count + 2 * patch_count; }
};

inline void linearize(const SolveState& state, const FactorSet& factors, const DepthMap& sensor,
                      const DepthMap& mde, const PatchGrid& grid, const FactorWeights& weights,
                      const HuberParams& huber, Linearization& lin) {
    const auto pixels = state.pixel_count();
    lin.pixel_count = static_cast<int>(pixels);
    lin.patch_count = grid.n();
    lin.w_mde.resize(pixels);
    lin.r_mde.resize(pixels);
    lin.w_sen.resize(pixels);
    lin.r_sen.resize(pixels);
    lin.inv_d.resize(pixels);
    lin.w_slp.resize(factors.slope_count());
    lin.r_slp.resize(factors.slope_count());

    for (std::size_t p = 0; p < pixels; ++p) {
        const auto i = static_cast<std::size_t>(factors.patch_of[p]);
        const double rm = mde_residual(state.depth[p], state.slope[i], state.bias[i], mde.values[p]);
        lin.r_mde[p] = rm;
        lin.w_mde[p] = weights.lambda_mde * huber_irls_weight(rm, huber.delta1);
        if (factors.sensor_valid[p]) {
            const double rs = state.depth[p] - sensor.values[p];
            lin.r_sen[p] = rs;
            lin.w_sen[p] = weights.lambda_sen * huber_irls_weight(rs, huber.delta1);
        } else {
            lin.r_sen[p] = 0.0;
            lin.w_sen[p] = 0.0;
        }
        lin.inv_d[p] = 1.0 / state.depth[p];
    }
    for (std::size_t f = 0; f < factors.slope_count(); ++f) {
        const auto [p, q] = factors.slope_pairs[f];
        const auto up = static_cast<std::size_t>(p);
        const auto uq = static_cast<std::size_t>(q);
        const double rs =
            slope_residual(state.depth[up], state.depth[uq], mde.values[up], mde.values[uq]);
        lin.r_slp[f] = rs;
        lin.w_slp[f] = weights.lambda_slp * huber_irls_weight(rs, huber.delta2);
    }
}

/// Gradient of the IRLS majorizer at the linearization point, J^T W r.
/// For the Huber cost this equals the gradient of the robust total cost
/// itself.
inline void majorizer_gradient(const Linearization& lin, const FactorSet& factors,
                               const DepthMap& mde, Eigen::VectorXd& grad) {
    const int pixels = lin.pixel_count;
    const int patches = lin.patch_count;
    grad.setZero(lin.total_variables());
    for (int p = 0; p < pixels; ++p) {
        const auto up = static_cast<std::size_t>(p);
        const int i = factors.patch_of[up];
        const double tm = lin.w_mde[up] * lin.r_mde[up];
        grad[p] += tm;
        grad[pixels + i] -= mde.values[up] * tm;
        grad[pixels + patches + i] -= tm;
        grad[p] += lin.w_sen[up] * lin.r_sen[up];
    }
    for (std::size_t f = 0; f < factors.slope_count(); ++f) {
        const auto [p, q] = factors.slope_pairs[f];
        const double t = lin.w_slp[f] * lin.r_slp[f];
        grad[p] += lin.inv_d[static_cast<std::size_t>(p)] * t;
        grad[q] -= lin.inv_d[static_cast<std::size_t>(q)] * t;
    }
}

/// Diagonal of J^T W J (without damping), for the Jacobi preconditioner.
inline void normal_diagonal(const Linearization& lin, const FactorSet& factors,
                            const DepthMap& mde, Eigen::VectorXd& diag) {
    const int pixels = lin.pixel_count;
    const int patches = lin.patch_count;
    diag.setZero(lin.total_variables());
    for (int p = 0; p < pixels; ++p) {
        const auto up = static_cast<std::size_t>(p);
        const int i = factors.patch_of[up];
        const double m = mde.values[up];
        diag[p] += lin.w_mde[up] + lin.w_sen[up];
        diag[pixels + i] += lin.w_mde[up] * m * m;
        diag[pixels + patches + i] += lin.w_mde[up];
    }
    for (std::size_t f = 0; f < factors.slope_count(); ++f) {
        const auto [p, q] = factors.slope_pairs[f];
        const double ap = lin.inv_d[static_cast<std::size_t>(p)];
        const double aq = lin.inv_d[static_cast<std::size_t>(q)];
        diag[p] += lin.w_slp[f] * ap * ap;
        diag[q] += lin.w_slp[f] * aq * aq;
    }
}

/// out = (J^T W J + damping * I) * v, matrix-free.
inline void apply_normal_matrix(const Linearization& lin, const FactorSet& factors,
                                const DepthMap& mde, double damping, const Eigen::VectorXd& v,
                                Eigen::VectorXd& out) {
    const int pixels = lin.pixel_count;
    const int patches = lin.patch_count;
    out = damping * v;
    for (int p = 0; p < pixels; ++p) {
        const auto up = static_cast<std::size_t>(p);
        const int i = factors.patch_of[up];
        const double m = mde.values[up];
        double t = v[p] - m * v[pixels + i] - v[pixels + patches + i];
        t *= lin.w_mde[up];
        out[p] += t;
        out[pixels + i] -= m * t;
        out[pixels + patches + i] -= t;
        out[p] += lin.w_sen[up] * v[p];
    }
    for (std::size_t f = 0; f < factors.slope_count(); ++f) {
        const auto [p, q] = factors.slope_pairs[f];
        const double ap = lin.inv_d[static_cast<std::size_t>(p)];
        const double aq = lin.inv_d[static_cast<std::size_t>(q)];
        double t = ap * v[p] - aq * v[q];
        t *= lin.w_slp[f];
        out[p] += ap * t;
        out[q] -= aq * t;
    }
}

/// Jacobi-preconditioned conjugate gradients on the damped normal
/// equations. Runs to a relative residual of cg_tol or cg_max_iterations,
/// whichever first; the caller treats the result as a step proposal either
/// way. Fully sequential, hence deterministic.
inline void solve_normal_equations_cg(const Linearization& lin, const FactorSet& factors,
                                      const DepthMap& mde, double damping,
                                      const Eigen::VectorXd& rhs, const Eigen::VectorXd& diag,
                                      const SolverConfig& config, Eigen::VectorXd& x) {
    const auto size = rhs.size();
    x.setZero(size);
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) return;

    Eigen::VectorXd precond = (diag.array() + damping).inverse();
    Eigen::VectorXd residual = rhs;  // r = b - A * 0
    Eigen::VectorXd z = precond.asDiagonal() * residual;
    Eigen::VectorXd direction = z;
    Eigen::VectorXd a_dir(size);
    double rz = residual.dot(z);

    for (int iter = 0; iter < config.cg_max_iterations; ++iter) {
        apply_normal_matrix(lin, factors, mde, damping, direction, a_dir);
        const double curvature = direction.dot(a_dir);
        if (!(curvature > 0.0)) break;  // numerically exhausted direction
        const double alpha = rz / curvature;
        x += alpha * direction;
        residual -= alpha * a_dir;
        if (residual.norm() <= config.cg_tol * rhs_norm) break;
        z = precond.asDiagonal() * residual;
        const double rz_next = residual.dot(z);
        direction = z + (rz_next / rz) * direction;
        rz = rz_next;
    }
}

}  // namespace detail

/// Gradient of the robust total cost at `state` (equals the IRLS
/// majorizer gradient at its linearization point). Variable order:
/// depth (row-major), then slopes, then biases.
inline std::vector<double> cost_gradient(const SolveState& state, const FactorSet& factors,
                                         const DepthMap& sensor, const DepthMap& mde,
                                         const PatchGrid& grid, const FactorWeights& weights,
                                         const HuberParams& huber) {
    detail::Linearization lin;
    detail::linearize(state, factors, sensor, mde, grid, weights, huber, lin);
    Eigen::VectorXd grad;
    detail::majorizer_gradient(lin, factors, mde, grad);
    return std::vector<double>(grad.data(), grad.data() + grad.size());
}

/// Minimizes the total robust cost by iteratively reweighted least
/// squares: each outer iteration refreshes the Huber weights, linearizes
/// the log-slope residuals around the current depth, and solves the
/// damped weighted normal equations over all pixel and patch variables
/// with matrix-free preconditioned CG. Steps are accepted only if the
/// true cost decreases, with the damping raised tenfold per rejection
/// (up to 8 retries) and halved after acceptance, so the cost trace is
/// non-increasing by construction. Depth is clamped at the floor after
/// every step.
inline std::pair<SolveState, SolveStats> irls_solve(SolveState state, const FactorSet& factors,
                                                    const DepthMap& sensor, const DepthMap& mde,
                                                    const PatchGrid& grid,
                                                    const SolverConfig& config) {
    detail::check_cost_inputs(state, sensor, mde, grid);
    if (factors.height != grid.height || factors.width != grid.width) {
        throw InputError("input-invalid", "factor set does not match patch grid");
    }

    const int pixels = static_cast<int>(state.pixel_count());
    const int patches = grid.n();

    SolveStats stats;
    double cost = total_cost(state, sensor, mde, grid, config.weights, config.huber);
    stats.initial_cost = cost;
    stats.cost_trace.push_back(cost);

    detail::Linearization lin;
    Eigen::VectorXd rhs;
    Eigen::VectorXd diag;
    Eigen::VectorXd step;
    SolveState candidate = state;

    double damping = config.damping_init;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        stats.iterations = iter + 1;
        detail::linearize(state, factors, sensor, mde, grid, config.weights, config.huber, lin);
        detail::majorizer_gradient(lin, factors, mde, rhs);
        rhs = -rhs;
        detail::normal_diagonal(lin, factors, mde, diag);

        bool accepted = false;
        double accepted_cost = cost;
        for (int attempt = 0; attempt <= 8; ++attempt) {
            detail::solve_normal_equations_cg(lin, factors, mde, damping, rhs, diag, config, step);

            for (int p = 0; p < pixels; ++p) {
                candidate.depth[static_cast<std::size_t>(p)] =
                    std::max(state.depth[static_cast<std::size_t>(p)] + step[p], config.depth_floor);
            }
            for (int i = 0; i < patches; ++i) {
                candidate.slope[static_cast<std::size_t>(i)] =
                    state.slope[static_cast<std::size_t>(i)] + step[pixels + i];
                candidate.bias[static_cast<std::size_t>(i)] =
                    state.bias[static_cast<std::size_t>(i)] + step[pixels + patches + i];
            }

            const double candidate_cost =
                total_cost(candidate, sensor, mde, grid, config.weights, config.huber);
            if (candidate_cost < cost) {
                state = candidate;
                accepted_cost = candidate_cost;
                accepted = true;
                damping *= 0.5;
                if (damping < 1e-12) damping = 0.0;
                break;
            }
            damping = damping == 0.0 ? 1e-4 : damping * 10.0;
        }

        if (!accepted) {
            // No damping level produced a decrease; the state is as good
            // as this linearization gets.
            stats.converged = true;
            break;
        }

        const double decrease = (cost - accepted_cost) / cost;  // cost > accepted_cost >= 0
        cost = accepted_cost;
        stats.cost_trace.push_back(cost);
        if (decrease < config.rel_tol) {
            stats.converged = true;
            break;
        }
    }

    stats.final_cost = cost;
    return {std::move(state), std::move(stats)};
}

/// Ablation: the same pipeline with a single global patch (n = 1) over
/// the resized domain.
inline std::pair<SolveState, SolveStats> solve_no_patch(const DepthMap& sensor, const DepthMap& mde,
                                                        const SolverConfig& config) {
    const PatchGrid grid = single_patch_grid(sensor.height, sensor.width);
    AffineFit fit;
    SolveState state = initialize(sensor, mde, grid, config, &fit);
    const FactorSet factors = build_factors(grid, sensor);
    auto [solved, stats] = irls_solve(std::move(state), factors, sensor, mde, grid, config);
    stats.degenerate_init = fit.degenerate;
    return {std::move(solved), std::move(stats)};
}

}  // namespace anchord
