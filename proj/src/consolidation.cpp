#include "driftguard/consolidation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <string>

#include "driftguard/errors.hpp"

namespace driftguard::ewc {

namespace {

void check_shapes(std::span<const double> theta, std::span<const TaskSnapshot> snapshots) {
    for (const auto& s : snapshots) {
        if (s.theta_star.size() != theta.size() || s.fisher_diag.size() != theta.size()) {
            throw ShapeError("snapshot " + std::to_string(s.task_id) + " has " +
                             std::to_string(s.theta_star.size()) +
                             " parameters, current model has " + std::to_string(theta.size()));
        }
    }
}

}  // namespace

std::string_view to_string(FisherMode mode) {
    return mode == FisherMode::EmpiricalLabel ? "empirical-label" : "model-sampled-label";
}

FisherMode fisher_mode_from_string(std::string_view name) {
    if (name == "empirical-label") return FisherMode::EmpiricalLabel;
    if (name == "model-sampled-label") return FisherMode::ModelSampledLabel;
    throw ConfigError("unknown fisher_mode '" + std::string(name) +
                      "' (expected empirical-label or model-sampled-label)");
}

void ConsolidationConfig::validate() const {
    if (!(lambda_ewc >= 0.0) || !std::isfinite(lambda_ewc)) {
        throw ConfigError("lambda_ewc must be a finite non-negative number");
    }
    if (fisher_samples < 1) throw ConfigError("fisher_samples must be at least 1");
}

void TaskSnapshot::validate() const {
    if (theta_star.size() != fisher_diag.size()) {
        throw ShapeError("snapshot parameter and Fisher lengths differ");
    }
    for (double f : fisher_diag) {
        if (!std::isfinite(f) || f < 0.0) {
            throw NumericError("Fisher entries must be finite and non-negative", -1);
        }
    }
}

std::vector<double> estimate_fisher_diag(const nn::ParamVector& theta,
                                         const nn::LabeledBatch& data,
                                         const ConsolidationConfig& cfg) {
    cfg.validate();
    if (data.rows() == 0) throw InsufficientDataError("Fisher estimate needs at least one sample");
    data.validate(theta.class_count());

    std::mt19937_64 rng(cfg.seed);
    const std::size_t m = cfg.fisher_samples;
    std::vector<std::size_t> rows;
    if (data.rows() >= m) {
        rows.resize(data.rows());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        std::shuffle(rows.begin(), rows.end(), rng);
        rows.resize(m);
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, data.rows() - 1);
        rows.resize(m);
        for (auto& r : rows) r = pick(rng);
    }

    std::vector<double> fisher(theta.size(), 0.0);
    std::vector<double> g(theta.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t r : rows) {
        int y = data.labels[r];
        if (cfg.fisher_mode == FisherMode::ModelSampledLabel) {
            const auto p = nn::predict_proba(theta, data.row(r));
            const double u = unit(rng);
            double acc = 0.0;
            y = static_cast<int>(p.size()) - 1;
            for (std::size_t c = 0; c < p.size(); ++c) {
                acc += p[c];
                if (u < acc) {
                    y = static_cast<int>(c);
                    break;
                }
            }
        }
        nn::sample_loss_and_grad(theta, data.row(r), y, g);
        for (std::size_t j = 0; j < g.size(); ++j) fisher[j] += g[j] * g[j];
    }
    const double inv = 1.0 / static_cast<double>(m);
    for (double& f : fisher) f *= inv;
    return fisher;
}

double ewc_penalty(std::span<const double> theta, std::span<const TaskSnapshot> snapshots,
                   double lambda_ewc) {
    check_shapes(theta, snapshots);
    double total = 0.0;
    for (const auto& s : snapshots) {
        const auto& star = s.theta_star.values;
        for (std::size_t j = 0; j < theta.size(); ++j) {
            const double d = theta[j] - star[j];
            total += s.fisher_diag[j] * d * d;
        }
    }
    return 0.5 * lambda_ewc * total;
}

std::vector<double> ewc_penalty_grad(std::span<const double> theta,
                                     std::span<const TaskSnapshot> snapshots,
                                     double lambda_ewc) {
    check_shapes(theta, snapshots);
    std::vector<double> grad(theta.size(), 0.0);
    for (const auto& s : snapshots) {
        const auto& star = s.theta_star.values;
        for (std::size_t j = 0; j < theta.size(); ++j) {
            grad[j] += s.fisher_diag[j] * (theta[j] - star[j]);
        }
    }
    for (double& g : grad) g *= lambda_ewc;
    return grad;
}

nn::Penalty make_penalty(std::span<const TaskSnapshot> snapshots, double lambda_ewc) {
    const std::size_t n = snapshots.empty() ? 0 : snapshots.front().theta_star.size();
    // The summed penalty is a separable quadratic:
    //   (lambda/2) sum_j [ A_j theta_j^2 - 2 B_j theta_j + const ]
    // with A_j = sum_i F_ij and B_j = sum_i F_ij theta*_ij.
    auto curvature = std::make_shared<std::vector<double>>(n, 0.0);
    auto weighted_anchor = std::make_shared<std::vector<double>>(n, 0.0);
    for (const auto& s : snapshots) {
        if (s.fisher_diag.size() != n || s.theta_star.size() != n) {
            throw ShapeError("snapshots disagree on parameter count");
        }
        for (std::size_t j = 0; j < n; ++j) {
            (*curvature)[j] += s.fisher_diag[j];
            (*weighted_anchor)[j] += s.fisher_diag[j] * s.theta_star.values[j];
        }
    }

    nn::Penalty p;
    p.value = [snapshots, lambda_ewc](std::span<const double> theta) {
        return ewc_penalty(theta, snapshots, lambda_ewc);
    };
    p.add_gradient = [snapshots, lambda_ewc](std::span<const double> theta,
                                             std::span<double> grad) {
        const auto g = ewc_penalty_grad(theta, snapshots, lambda_ewc);
        for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += g[j];
    };
    p.proximal = [curvature, weighted_anchor, lambda_ewc](std::span<double> theta, double step) {
        if (theta.size() != curvature->size()) throw ShapeError("proximal step shape mismatch");
        const double t = step * lambda_ewc;
        for (std::size_t j = 0; j < theta.size(); ++j) {
            theta[j] = (theta[j] + t * (*weighted_anchor)[j]) / (1.0 + t * (*curvature)[j]);
        }
    };
    return p;
}

TaskSnapshot make_snapshot(const nn::ParamVector& theta, const nn::LabeledBatch& data,
                           const ConsolidationConfig& cfg, int task_id) {
    TaskSnapshot snap;
    snap.task_id = task_id;
    snap.theta_star = theta;
    snap.fisher_diag = estimate_fisher_diag(theta, data, cfg);
    return snap;
}

FineTuneResult fine_tune_dawc(const nn::ParamVector& theta,
                              std::span<const TaskSnapshot> snapshots,
                              const nn::LabeledBatch& new_data, const nn::TrainConfig& train_cfg,
                              const ConsolidationConfig& cons_cfg) {
    cons_cfg.validate();
    check_shapes(theta.values, snapshots);

    nn::TrainOptions options;
    nn::Penalty penalty;
    if (!snapshots.empty()) {
        penalty = make_penalty(snapshots, cons_cfg.lambda_ewc);
        options.penalty = &penalty;
    }
    auto trained = nn::train(theta, new_data, train_cfg, options);

    int next_id = 0;
    for (const auto& s : snapshots) next_id = std::max(next_id, s.task_id + 1);

    FineTuneResult out;
    out.snapshot = make_snapshot(trained.theta, new_data, cons_cfg, next_id);
    out.theta = std::move(trained.theta);
    out.updates = trained.updates;
    return out;
}

}  // namespace driftguard::ewc
