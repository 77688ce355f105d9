#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "statewarp/core.hpp"
#include "statewarp/rng.hpp"
#include "statewarp/types.hpp"

#include "json.hpp"

namespace statewarp {

/// Construction parameters of a cycle-reservoir-with-jumps network.
/// Defaults are the fixed benchmark values: window 2, 5 neurons, jump 2,
/// spectral scaling 0.85, connection weights (r_i, r_c, r_j) = (0.2, 0.5, 0.4).
struct CrjParams {
    std::size_t reservoir_size = 5; // N
    std::size_t jump_length = 2;
    double input_weight = 0.2;    // r_i
    double cycle_weight = 0.5;    // r_c
    double jump_weight = 0.4;     // r_j
    double spectral_scaling = 0.85;
    std::size_t input_window = 2; // n successive time points per input
    std::uint64_t seed = 1;

    void validate() const
    {
        if (reservoir_size < 2) throw Error("CrjParams: reservoir_size must be >= 2");
        if (jump_length < 1) throw Error("CrjParams: jump_length must be >= 1");
        if (jump_length >= reservoir_size)
            throw Error("CrjParams: jump_length must be < reservoir_size");
        if (!(input_weight > 0.0) || !std::isfinite(input_weight))
            throw Error("CrjParams: input_weight must be positive and finite");
        if (!(cycle_weight > 0.0) || !std::isfinite(cycle_weight))
            throw Error("CrjParams: cycle_weight must be positive and finite");
        if (!(jump_weight >= 0.0) || !std::isfinite(jump_weight))
            throw Error("CrjParams: jump_weight must be nonnegative and finite");
        if (!(spectral_scaling > 0.0) || !std::isfinite(spectral_scaling))
            throw Error("CrjParams: spectral_scaling must be positive and finite");
        if (input_window < 1) throw Error("CrjParams: input_window must be >= 1");
    }
};

inline void to_json(nlohmann::json& j, const CrjParams& p)
{
    j = nlohmann::json{{"reservoir_size", p.reservoir_size},
                       {"jump_length", p.jump_length},
                       {"input_weight", p.input_weight},
                       {"cycle_weight", p.cycle_weight},
                       {"jump_weight", p.jump_weight},
                       {"spectral_scaling", p.spectral_scaling},
                       {"input_window", p.input_window},
                       {"seed", p.seed}};
}

inline void from_json(const nlohmann::json& j, CrjParams& p)
{
    p = CrjParams{};
    if (j.contains("reservoir_size")) j.at("reservoir_size").get_to(p.reservoir_size);
    if (j.contains("jump_length")) j.at("jump_length").get_to(p.jump_length);
    if (j.contains("input_weight")) j.at("input_weight").get_to(p.input_weight);
    if (j.contains("cycle_weight")) j.at("cycle_weight").get_to(p.cycle_weight);
    if (j.contains("jump_weight")) j.at("jump_weight").get_to(p.jump_weight);
    if (j.contains("spectral_scaling")) j.at("spectral_scaling").get_to(p.spectral_scaling);
    if (j.contains("input_window")) j.at("input_window").get_to(p.input_window);
    if (j.contains("seed")) j.at("seed").get_to(p.seed);
}

/// Fixed recurrent weights R (cycle plus jumps, rescaled) and input weights V.
struct CrjNetwork {
    Eigen::MatrixXd recurrent; // N x N
    Eigen::MatrixXd input;     // N x (input_window * d)
    CrjParams params;

    std::size_t size() const { return static_cast<std::size_t>(recurrent.rows()); }
    std::size_t input_width() const { return static_cast<std::size_t>(input.cols()); }
};

/// Reservoir activations, one row per time point of the driving series.
struct StateSequence {
    TimeSeries states; // L x N
};

/// Largest eigenvalue magnitude, dense solve (accurate to ~1e-14 at N <= 128).
inline double spectral_radius(const Eigen::MatrixXd& m)
{
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// Multiplies the whole matrix by one global factor so its spectral radius
/// equals `scaling`; entry directions are preserved.
inline Eigen::MatrixXd spectral_rescale(const Eigen::MatrixXd& m, double scaling)
{
    if (!(scaling > 0.0)) throw Error("spectral_rescale: scaling must be positive");
    double radius = spectral_radius(m);
    if (!(radius > 1e-14)) throw Error("spectral_rescale: zero spectral radius");
    return m * (scaling / radius);
}

namespace detail {

/// Jump anchors 0, l, 2l, ... and the bidirectional edges between consecutive
/// anchors, wrapping back to the first. Edges that coincide with a cycle
/// position or an existing jump are collapsed.
inline std::vector<std::pair<std::size_t, std::size_t>> jump_edges(std::size_t n, std::size_t l)
{
    std::vector<std::size_t> anchors;
    for (std::size_t a = 0; a < n; a += l) anchors.push_back(a);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t k = 0; k < anchors.size(); ++k) {
        std::size_t a = anchors[k];
        std::size_t b = anchors[(k + 1) % anchors.size()];
        if (a == b) continue;
        edges.emplace_back(a, b);
        edges.emplace_back(b, a);
    }
    return edges;
}

} // namespace detail

/// Builds the network: cycle weights r_c, jump weights r_j, a single global
/// spectral rescale, and input signs drawn as fair +-1 from the seeded
/// generator. Bitwise deterministic for a fixed seed.
inline CrjNetwork build_crj(const CrjParams& p, std::size_t input_dims = 1)
{
    p.validate();
    if (input_dims < 1) throw Error("build_crj: input_dims must be >= 1");
    const std::size_t n = p.reservoir_size;

    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) r((i + 1) % n, i) = p.cycle_weight; // cycle i -> i+1
    for (const auto& [src, dst] : detail::jump_edges(n, p.jump_length))
        if (r(dst, src) == 0.0) r(dst, src) = p.jump_weight;
    r = spectral_rescale(r, p.spectral_scaling);

    Rng rng(p.seed);
    const std::size_t width = p.input_window * input_dims;
    Eigen::MatrixXd v(n, width);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < width; ++j) v(i, j) = p.input_weight * rng.sign();

    return CrjNetwork{std::move(r), std::move(v), p};
}

/// Stacks n successive time points per row; indices past the end clamp to the
/// last observation, so the output keeps length L at width n * d.
inline TimeSeries window_embed(const TimeSeries& x, std::size_t n)
{
    if (n < 1) throw Error("window_embed: window must be >= 1");
    const std::size_t L = x.length(), d = x.dims();
    TimeSeries out(L, n * d);
    for (std::size_t t = 0; t < L; ++t)
        for (std::size_t w = 0; w < n; ++w) {
            std::size_t src = std::min(t + w, L - 1);
            for (std::size_t j = 0; j < d; ++j) out(t, w * d + j) = x(src, j);
        }
    return out;
}

/// Iterates S(t+1) = tanh(R S(t) + V X(t+1)) from s0 and returns S(1..L).
/// The input must already be window-embedded to the network's input width.
inline StateSequence run_states(const CrjNetwork& net, const TimeSeries& x,
                                const Eigen::VectorXd& s0)
{
    const std::size_t n = net.size(), width = net.input_width(), L = x.length();
    if (x.dims() != width) throw Error("run_states: input width does not match network");
    if (static_cast<std::size_t>(s0.size()) != n)
        throw Error("run_states: initial state size does not match network");

    StateSequence out{TimeSeries(L, n)};
    Eigen::VectorXd s = s0;
    for (std::size_t t = 0; t < L; ++t) {
        Eigen::Map<const Eigen::VectorXd> xt(x.row(t), static_cast<Eigen::Index>(width));
        s = (net.recurrent * s + net.input * xt).array().tanh().matrix();
        for (std::size_t k = 0; k < n; ++k) out.states(t, k) = s(static_cast<Eigen::Index>(k));
    }
    return out;
}

/// Zero-start overload, the convention used for all distance computations.
inline StateSequence run_states(const CrjNetwork& net, const TimeSeries& x)
{
    return run_states(net, x, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.size())));
}

/// Operator 2-norm (largest singular value).
inline double operator_norm(const Eigen::MatrixXd& m)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

/// One-step state gap under an input perturbation:
/// || tanh(Rs + V(x+eps)) - tanh(Rs + Vx) ||_2. Because tanh is 1-Lipschitz
/// this never exceeds ||V||_2 * ||eps||_2.
inline double one_step_noise_gap(const CrjNetwork& net, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& eps, const Eigen::VectorXd& s)
{
    if (x.size() != net.input.cols() || eps.size() != x.size() || s.size() != net.recurrent.rows())
        throw Error("one_step_noise_gap: shape mismatch");
    Eigen::VectorXd base = net.recurrent * s + net.input * x;
    Eigen::VectorXd noisy = net.recurrent * s + net.input * (x + eps);
    return (noisy.array().tanh() - base.array().tanh()).matrix().norm();
}

/// Linear readout f(t) = W S(t) + b fitted by ridge regression.
struct ReadoutModel {
    Eigen::MatrixXd output_weights; // O x N
    Eigen::VectorXd bias;           // O
    double ridge_lambda = 0.0;
};

/// The ridge grid named by the benchmark protocol: 1e-5 ... 10.
inline std::vector<double> default_ridge_grid()
{
    return {1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
}

namespace detail {

// Closed-form ridge on states augmented with a constant-1 column.
inline Eigen::MatrixXd ridge_solve(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y,
                                   double lambda)
{
    const Eigen::Index p = z.cols();
    Eigen::MatrixXd gram = z.transpose() * z + lambda * Eigen::MatrixXd::Identity(p, p);
    return gram.ldlt().solve(z.transpose() * y);
}

} // namespace detail

/// Closed-form ridge readout with the penalty chosen by k-fold cross
/// validation on mean squared error (ties prefer the smaller lambda).
inline ReadoutModel train_readout_ridge(const StateSequence& states, const TimeSeries& targets,
                                        const std::vector<double>& lambda_grid, int folds)
{
    const std::size_t rows = states.states.length();
    const std::size_t n = states.states.dims();
    const std::size_t o = targets.dims();
    if (targets.length() != rows) throw Error("train_readout_ridge: states/targets row mismatch");
    if (folds < 2) throw Error("train_readout_ridge: folds must be >= 2");
    if (rows < static_cast<std::size_t>(folds))
        throw Error("train_readout_ridge: fewer rows than folds");
    if (lambda_grid.empty()) throw Error("train_readout_ridge: empty lambda grid");

    Eigen::MatrixXd z(rows, n + 1);
    Eigen::MatrixXd y(rows, o);
    for (std::size_t t = 0; t < rows; ++t) {
        for (std::size_t k = 0; k < n; ++k) z(t, k) = states.states(t, k);
        z(t, n) = 1.0;
        for (std::size_t k = 0; k < o; ++k) y(t, k) = targets(t, k);
    }

    double best_lambda = lambda_grid.front();
    double best_mse = std::numeric_limits<double>::infinity();
    for (double lambda : lambda_grid) {
        if (!(lambda > 0.0)) throw Error("train_readout_ridge: lambda must be positive");
        double sse = 0.0;
        std::size_t count = 0;
        for (int f = 0; f < folds; ++f) {
            std::size_t lo = rows * static_cast<std::size_t>(f) / static_cast<std::size_t>(folds);
            std::size_t hi =
                rows * static_cast<std::size_t>(f + 1) / static_cast<std::size_t>(folds);
            std::size_t held = hi - lo;
            if (held == 0) continue;
            Eigen::MatrixXd z_train(rows - held, n + 1), y_train(rows - held, o);
            std::size_t r = 0;
            for (std::size_t t = 0; t < rows; ++t) {
                if (t >= lo && t < hi) continue;
                z_train.row(r) = z.row(t);
                y_train.row(r) = y.row(t);
                ++r;
            }
            Eigen::MatrixXd w = detail::ridge_solve(z_train, y_train, lambda);
            Eigen::MatrixXd residual = z.middleRows(lo, held) * w - y.middleRows(lo, held);
            sse += residual.squaredNorm();
            count += held * o;
        }
        double mse = sse / static_cast<double>(count);
        if (mse < best_mse) {
            best_mse = mse;
            best_lambda = lambda;
        }
    }

    Eigen::MatrixXd w = detail::ridge_solve(z, y, best_lambda);
    ReadoutModel model;
    model.output_weights = w.topRows(n).transpose();
    model.bias = w.row(n).transpose();
    model.ridge_lambda = best_lambda;
    return model;
}

/// One-step-ahead training RMSE of the ridge readout, pooled over the whole
/// dataset; lower means the reservoir tracks the signals better.
inline double predictability(const CrjNetwork& net, const LabeledDataset& train)
{
    train.validate();
    const std::size_t n = net.size();
    const std::size_t d = net.input_width() / net.params.input_window;

    std::size_t total = 0;
    for (const TimeSeries& x : train.series) {
        if (x.length() < 2) throw Error("predictability: every series must have length >= 2");
        if (x.dims() != d) throw Error("predictability: series dimension does not match network");
        total += x.length() - 1;
    }

    StateSequence pooled{TimeSeries(total, n)};
    TimeSeries targets(total, d);
    std::size_t row = 0;
    for (const TimeSeries& x : train.series) {
        StateSequence ss = run_states(net, window_embed(x, net.params.input_window));
        for (std::size_t t = 0; t + 1 < x.length(); ++t, ++row) {
            for (std::size_t k = 0; k < n; ++k) pooled.states(row, k) = ss.states(t, k);
            for (std::size_t k = 0; k < d; ++k) targets(row, k) = x(t + 1, k);
        }
    }

    ReadoutModel model = train_readout_ridge(pooled, targets, default_ridge_grid(), 5);
    double sse = 0.0;
    for (std::size_t t = 0; t < total; ++t) {
        for (std::size_t k = 0; k < d; ++k) {
            double pred = model.bias(static_cast<Eigen::Index>(k));
            for (std::size_t m = 0; m < n; ++m)
                pred += model.output_weights(static_cast<Eigen::Index>(k),
                                             static_cast<Eigen::Index>(m)) *
                        pooled.states(t, m);
            double diff = pred - targets(t, k);
            sse += diff * diff;
        }
    }
    return std::sqrt(sse / static_cast<double>(total * d));
}

} // namespace statewarp
