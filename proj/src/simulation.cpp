#include "liureg/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <thread>

namespace liureg {

namespace {

std::uint64_t double_bits(double x) {
    std::uint64_t u;
    std::memcpy(&u, &x, sizeof(u));
    return u;
}

struct ReplicateOutcome {
    bool failed = true;
    double condition_num = 0.0;
    std::vector<double> sq_err;  // parallel to cell.estimators
};

// data-driven penalty grid: 30 log-spaced points below the smallest
// lambda that zeroes every lasso coordinate
std::vector<double> penalty_grid(const MatrixXd& X, const VectorXd& y) {
    const double lmax = 2.0 * (X.transpose() * y).cwiseAbs().maxCoeff();
    if (!(lmax > 0.0)) return {1e-8};
    return log_grid(lmax * 1e-4, lmax, 30);
}

ReplicateOutcome one_replicate(const SimulationCell& cell, const ShrinkageConfig& cfg,
                               const PenaltyConfig& pen_cfg, const VectorXd& beta,
                               std::uint64_t rep_seed) {
    ReplicateOutcome out;
    const int p = cell.p1 + cell.p2;

    for (int attempt = 0; attempt < 2 && out.failed; ++attempt) {
        Xoshiro256pp rng(derive_stream({rep_seed, static_cast<std::uint64_t>(attempt)}));
        try {
            const MatrixXd X = generate_design(cell.n, p, cell.rho, rng);
            VectorXd eps(cell.n);
            for (int i = 0; i < cell.n; ++i) eps(i) = rng.normal();
            const VectorXd y = X * beta + eps;

            out.condition_num = condition_number(X);

            PartitionSpec spec;
            for (int j = 0; j < cell.p1; ++j) spec.main_idx.push_back(j);
            for (int j = cell.p1; j < p; ++j) spec.nuisance_idx.push_back(j);

            ShrinkageConfig local = cfg;
            local.alpha = cell.alpha;

            bool need_family = false;
            for (Estimator e : cell.estimators) {
                if (e == Estimator::LiuFull || e == Estimator::LiuSub ||
                    e == Estimator::Pretest || e == Estimator::Stein ||
                    e == Estimator::PositivePart) {
                    need_family = true;
                }
            }
            LiuFamilyFit fam;
            if (need_family) fam = fit_liu_family(X, y, spec, local);

            const double fit_scale =
                cfg.scaled_fit ? 1.0 / std::sqrt(static_cast<double>(cell.n)) : 1.0;
            const MatrixXd Xf = fit_scale * X;
            const VectorXd yf = fit_scale * y;

            const VectorXd beta1 = beta.head(cell.p1);
            std::vector<double> errs;
            errs.reserve(cell.estimators.size());
            for (std::size_t k = 0; k < cell.estimators.size(); ++k) {
                const Estimator e = cell.estimators[k];
                VectorXd b1;
                switch (e) {
                    case Estimator::Lse:
                        b1 = lse(X, y).head(cell.p1);
                        break;
                    case Estimator::RidgeFull: {
                        Dataset data{yf, Xf, {}, {}};
                        const PartitionedDesign pd = partition(data, spec);
                        b1 = ridge_full_beta1(pd, yf, ridge_gcv_lambda(Xf, yf));
                        break;
                    }
                    case Estimator::RidgeSub: {
                        const MatrixXd X1 = Xf.leftCols(cell.p1);
                        b1 = ridge_sub_beta1(X1, yf, ridge_gcv_lambda(X1, yf));
                        break;
                    }
                    case Estimator::LiuFull:
                        b1 = fam.lfm;
                        break;
                    case Estimator::LiuSub:
                        b1 = fam.lsm;
                        break;
                    case Estimator::Pretest:
                        b1 = fam.lpt;
                        break;
                    case Estimator::Stein:
                        b1 = fam.ls.value();
                        break;
                    case Estimator::PositivePart:
                        b1 = fam.lps.value();
                        break;
                    case Estimator::Lasso:
                    case Estimator::AdaptiveLasso:
                    case Estimator::Scad: {
                        const PenalizedMethod m =
                            e == Estimator::Lasso ? PenalizedMethod::Lasso
                            : e == Estimator::AdaptiveLasso ? PenalizedMethod::AdaptiveLasso
                                                            : PenalizedMethod::Scad;
                        const auto cv =
                            cv_tune(m, X, y, penalty_grid(X, y), 5,
                                    derive_stream({rep_seed, 0x70656eULL,
                                                   static_cast<std::uint64_t>(e)}),
                                    pen_cfg);
                        b1 = cv.beta.head(cell.p1);
                        break;
                    }
                }
                errs.push_back((b1 - beta1).squaredNorm());
            }
            out.sq_err = std::move(errs);
            out.failed = false;
        } catch (const std::exception&) {
            out.failed = true;
        }
    }
    return out;
}

}  // namespace

void SimulationCell::validate() const {
    if (n < 2 || p1 < 1 || p2 < 0) throw std::invalid_argument("SimulationCell: bad dimensions");
    if (p1 + p2 > n) throw std::invalid_argument("SimulationCell: p exceeds n");
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw std::invalid_argument("SimulationCell: rho must lie in [0, 1)");
    }
    if (delta_star < 0.0) throw std::invalid_argument("SimulationCell: delta_star < 0");
    if (reps < 1) throw std::invalid_argument("SimulationCell: reps must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("SimulationCell: alpha outside (0,1)");
    }
    if (estimators.empty()) throw std::invalid_argument("SimulationCell: empty estimator set");
    for (Estimator e : estimators) {
        if ((e == Estimator::Stein || e == Estimator::PositivePart) && p2 < 3) {
            throw std::invalid_argument("SimulationCell: LS/LPS need p2 >= 3");
        }
    }
    if (delta_star > 0.0 && p2 < 1) {
        throw std::invalid_argument("SimulationCell: delta_star > 0 needs p2 >= 1");
    }
}

std::uint64_t SimulationCell::key_hash() const {
    std::uint64_t h = derive_stream(
        {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(p1),
         static_cast<std::uint64_t>(p2), double_bits(rho), double_bits(delta_star),
         static_cast<std::uint64_t>(reps), double_bits(alpha)});
    for (Estimator e : estimators) {
        h = derive_stream({h, static_cast<std::uint64_t>(e)});
    }
    return h;
}

MatrixXd generate_design(int n, int p, double rho, Xoshiro256pp& rng) {
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw std::invalid_argument("generate_design: rho must lie in [0, 1)");
    }
    MatrixXd Z(n, p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) Z(i, j) = rng.normal();
    }
    if (rho == 0.0) return Z;
    const MatrixXd sigma =
        (1.0 - rho) * MatrixXd::Identity(p, p) + rho * MatrixXd::Ones(p, p);
    const MatrixXd A = Eigen::LLT<MatrixXd>(sigma).matrixL().transpose();  // A'A = Sigma
    return Z * A;
}

VectorXd true_beta(int p1, int p2, double delta_star) {
    if (delta_star > 0.0 && p2 < 1) {
        throw std::invalid_argument("true_beta: delta_star > 0 needs p2 >= 1");
    }
    VectorXd beta = VectorXd::Zero(p1 + p2);
    beta.head(p1).setOnes();
    if (p2 >= 1) beta(p1) = delta_star;
    return beta;
}

RmseRow run_cell(const SimulationCell& cell, const ShrinkageConfig& cfg,
                 const PenaltyConfig& pen_cfg, int jobs) {
    cell.validate();
    cfg.validate();
    const VectorXd beta = true_beta(cell.p1, cell.p2, cell.delta_star);

    std::vector<ReplicateOutcome> outcomes(cell.reps);
    const int workers = std::max(1, jobs);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= cell.reps) break;
            outcomes[r] = one_replicate(cell, cfg, pen_cfg, beta,
                                        derive_stream({cell.seed,
                                                       static_cast<std::uint64_t>(r)}));
        }
    };
    if (workers == 1) {
        work();
    } else {
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    // ordered reduction over replicate index: output is independent of
    // the worker count
    RmseRow row;
    row.cell = cell;
    const std::size_t m = cell.estimators.size();
    std::vector<double> sum(m, 0.0), sumsq(m, 0.0);
    double cn_sum = 0.0;
    int ok = 0;
    for (const auto& o : outcomes) {
        if (o.failed) {
            ++row.failed_replicates;
            continue;
        }
        ++ok;
        cn_sum += o.condition_num;
        for (std::size_t k = 0; k < m; ++k) {
            sum[k] += o.sq_err[k];
            sumsq[k] += o.sq_err[k] * o.sq_err[k];
        }
    }
    if (row.failed_replicates > 0.01 * cell.reps) {
        throw std::runtime_error("run_cell: " + std::to_string(row.failed_replicates) +
                                 " of " + std::to_string(cell.reps) +
                                 " replicates failed (cell n=" + std::to_string(cell.n) +
                                 " rho=" + std::to_string(cell.rho) + " delta*=" +
                                 std::to_string(cell.delta_star) + ")");
    }
    if (ok == 0) throw std::runtime_error("run_cell: every replicate failed");

    row.mean_condition_number = cn_sum / ok;
    for (std::size_t k = 0; k < m; ++k) {
        const Estimator e = cell.estimators[k];
        const double mean = sum[k] / ok;
        row.mse[e] = mean;
        row.mse_se[e] = ok > 1 ? std::sqrt((sumsq[k] / ok - mean * mean) / (ok - 1)) : 0.0;
    }
    const auto lfm = row.mse.find(Estimator::LiuFull);
    if (lfm == row.mse.end() || !(lfm->second > 0.0)) {
        throw std::runtime_error("run_cell: LFM must be in the estimator set (RMSE base)");
    }
    for (const auto& [e, v] : row.mse) row.rmse[e] = v / lfm->second;
    return row;
}

std::vector<RmseRow> run_grid(std::vector<SimulationCell> cells,
                              std::uint64_t master_seed, const ShrinkageConfig& cfg,
                              const PenaltyConfig& pen_cfg, int jobs) {
    if (cells.empty()) throw std::invalid_argument("run_grid: empty cell list");
    std::vector<RmseRow> rows;
    rows.reserve(cells.size());
    for (auto& cell : cells) {
        cell.seed = derive_stream({master_seed, cell.key_hash()});
        rows.push_back(run_cell(cell, cfg, pen_cfg, jobs));
    }
    return rows;
}

}  // namespace liureg
