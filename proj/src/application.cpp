#include "liureg/application.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include "liureg/rng.hpp"
#include "liureg/special.hpp"

namespace liureg {

namespace {

bool is_sub_vector_kind(Estimator e) {
    return e == Estimator::LiuSub || e == Estimator::Pretest || e == Estimator::Stein ||
           e == Estimator::PositivePart;
}

double aic_with_intercept(const Dataset& data, const std::vector<int>& cols) {
    const Eigen::Index n = data.n();
    MatrixXd X(n, cols.size() + 1);
    X.col(0).setOnes();
    for (std::size_t k = 0; k < cols.size(); ++k) X.col(k + 1) = data.X.col(cols[k]);
    const VectorXd beta = lse(X, data.y);
    const double rss = (data.y - X * beta).squaredNorm();
    return n * std::log(rss / static_cast<double>(n)) + 2.0 * (cols.size() + 1);
}

struct BootstrapOutcome {
    bool failed = true;
    std::vector<double> pe;                 // per estimator
    std::vector<VectorXd> coef;             // per estimator: intercept + main block
};

struct FitContext {
    const Dataset& data;
    const BootstrapConfig& cfg;
    const ShrinkageConfig& shrink_cfg;
    const PenaltyConfig& pen_cfg;
};

// Fits every requested estimator on (X, y) already standardized /
// centered, and returns the coefficient vector each one predicts with:
// full-length for full-model kinds, main-block for sub-model kinds.
std::map<Estimator, VectorXd> fit_suite(const FitContext& ctx, const MatrixXd& X,
                                        const VectorXd& y, std::uint64_t stream) {
    std::map<Estimator, VectorXd> fits;
    bool need_family = false;
    for (Estimator e : ctx.cfg.estimators) {
        if (e == Estimator::LiuFull || is_sub_vector_kind(e)) need_family = true;
    }
    LiuFamilyFit fam;
    if (need_family) {
        fam = fit_liu_family(X, y, ctx.cfg.sub_model, ctx.shrink_cfg);
    }
    for (Estimator e : ctx.cfg.estimators) {
        switch (e) {
            case Estimator::Lse:
                fits[e] = lse(X, y);
                break;
            case Estimator::RidgeFull:
                fits[e] = ridge(X, y, ridge_gcv_lambda(X, y));
                break;
            case Estimator::LiuFull:
                fits[e] = fam.joint_liu;
                break;
            case Estimator::LiuSub:
                fits[e] = fam.lsm;
                break;
            case Estimator::Pretest:
                fits[e] = fam.lpt;
                break;
            case Estimator::Stein:
                fits[e] = fam.ls.value();
                break;
            case Estimator::PositivePart:
                fits[e] = fam.lps.value();
                break;
            case Estimator::Lasso:
            case Estimator::AdaptiveLasso:
            case Estimator::Scad: {
                const PenalizedMethod m =
                    e == Estimator::Lasso ? PenalizedMethod::Lasso
                    : e == Estimator::AdaptiveLasso ? PenalizedMethod::AdaptiveLasso
                                                    : PenalizedMethod::Scad;
                const double lmax = 2.0 * (X.transpose() * y).cwiseAbs().maxCoeff();
                const auto grid = lmax > 0.0 ? log_grid(lmax * 1e-4, lmax, 30)
                                             : std::vector<double>{1e-8};
                fits[e] = cv_tune(m, X, y, grid, 5,
                                  derive_stream({stream, static_cast<std::uint64_t>(e)}),
                                  ctx.pen_cfg)
                              .beta;
                break;
            }
            default:
                throw std::invalid_argument("bootstrap_pe: unsupported estimator " +
                                            std::string(estimator_label(e)));
        }
    }
    return fits;
}

double predict_one(Estimator e, const VectorXd& coef, const VectorXd& x_std,
                   const std::vector<int>& main_idx, double intercept) {
    if (is_sub_vector_kind(e)) {
        double acc = intercept;
        for (std::size_t k = 0; k < main_idx.size(); ++k) {
            acc += coef(k) * x_std(main_idx[k]);
        }
        return acc;
    }
    return intercept + coef.dot(x_std);
}

BootstrapOutcome one_bootstrap(const FitContext& ctx, std::uint64_t rep_seed) {
    const Eigen::Index n = ctx.data.n();
    const Eigen::Index p = ctx.data.p();
    Xoshiro256pp rng(rep_seed);

    // case resampling on raw rows; redraw on a degenerate resample
    MatrixXd Xb(n, p);
    VectorXd yb(n);
    bool ok = false;
    for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto r = rng.uniform_index(static_cast<std::uint64_t>(n));
            Xb.row(i) = ctx.data.X.row(static_cast<Eigen::Index>(r));
            yb(i) = ctx.data.y(static_cast<Eigen::Index>(r));
        }
        ok = true;
        for (Eigen::Index j = 0; j < p; ++j) {
            if ((Xb.col(j).array() - Xb(0, j)).abs().maxCoeff() <= 0.0) ok = false;
        }
    }
    if (!ok) {
        throw std::runtime_error("bootstrap_pe: degenerate resample after 10 redraws");
    }

    BootstrapOutcome out;

    // fold assignment on the resample
    const int folds = ctx.cfg.folds;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (Eigen::Index i = n - 1; i > 0; --i) {
        const auto k = rng.uniform_index(static_cast<std::uint64_t>(i + 1));
        std::swap(perm[i], perm[k]);
    }
    std::vector<int> fold_of(n);
    for (Eigen::Index i = 0; i < n; ++i) fold_of[perm[i]] = static_cast<int>(i % folds);

    // full-resample transforms, used only in the leakage audit mode
    Dataset resample{yb, Xb, ctx.data.column_names, ctx.data.response_name};
    StandardizationTransform full_t;
    if (ctx.cfg.leak_transforms) {
        full_t = standardize(resample).second;
    }

    std::vector<double> sse(ctx.cfg.estimators.size(), 0.0);
    for (int f = 0; f < folds; ++f) {
        std::vector<int> train, test;
        for (Eigen::Index i = 0; i < n; ++i) {
            (fold_of[i] == f ? test : train).push_back(static_cast<int>(i));
        }
        Dataset tr;
        tr.X.resize(train.size(), p);
        tr.y.resize(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) {
            tr.X.row(i) = Xb.row(train[i]);
            tr.y(i) = yb(train[i]);
        }
        auto [trs, t] = standardize(tr);
        if (ctx.cfg.leak_transforms) {
            // audit: replace the fold transform with the full-resample one
            trs.X = full_t.apply_to(tr.X);
            trs.y = tr.y.array() - full_t.response_mean;
            t = full_t;
        }
        const double intercept =
            ctx.cfg.leak_transforms ? full_t.response_mean : t.response_mean;

        const auto fits = fit_suite(ctx, trs.X, trs.y,
                                    derive_stream({rep_seed, static_cast<std::uint64_t>(f)}));
        for (int i : test) {
            VectorXd x_std(p);
            for (Eigen::Index j = 0; j < p; ++j) {
                x_std(j) = (Xb(i, j) - t.column_means(j)) / t.column_sds(j);
            }
            for (std::size_t k = 0; k < ctx.cfg.estimators.size(); ++k) {
                const Estimator e = ctx.cfg.estimators[k];
                const double pred = predict_one(e, fits.at(e), x_std,
                                                ctx.cfg.sub_model.main_idx, intercept);
                const double err = yb(i) - pred;
                sse[k] += err * err;
            }
        }
    }
    out.pe.resize(ctx.cfg.estimators.size());
    for (std::size_t k = 0; k < sse.size(); ++k) {
        out.pe[k] = sse[k] / static_cast<double>(n);
    }

    // coefficient stats come from a full-resample fit
    auto [rs, rt] = standardize(resample);
    const auto full_fits = fit_suite(ctx, rs.X, rs.y, derive_stream({rep_seed, 0xC0EFULL}));
    out.coef.resize(ctx.cfg.estimators.size());
    for (std::size_t k = 0; k < ctx.cfg.estimators.size(); ++k) {
        const Estimator e = ctx.cfg.estimators[k];
        const VectorXd& b = full_fits.at(e);
        VectorXd row(ctx.cfg.sub_model.main_idx.size() + 1);
        row(0) = rt.response_mean;
        for (std::size_t j = 0; j < ctx.cfg.sub_model.main_idx.size(); ++j) {
            row(j + 1) = is_sub_vector_kind(e) ? b(j) : b(ctx.cfg.sub_model.main_idx[j]);
        }
        out.coef[k] = row;
    }
    out.failed = false;
    return out;
}

}  // namespace

void BootstrapConfig::validate(int n, int p) const {
    if (B < 1) throw std::invalid_argument("BootstrapConfig: B must be >= 1");
    if (folds < 2 || folds > n) {
        throw std::invalid_argument("BootstrapConfig: folds must lie in [2, n]");
    }
    if (estimators.empty()) throw std::invalid_argument("BootstrapConfig: empty estimator set");
    sub_model.validate(p);
}

Dataset load_table(const std::string& path, const std::string& response_col) {
    return load_csv(path, response_col);
}

PartitionSpec select_submodel(const Dataset& data) {
    data.validate();
    const int p = static_cast<int>(data.p());
    std::set<int> current;
    for (int j = 0; j < p; ++j) current.insert(j);

    auto as_vec = [](const std::set<int>& s) {
        return std::vector<int>(s.begin(), s.end());
    };
    double best = aic_with_intercept(data, as_vec(current));

    for (;;) {
        double cand_aic = best;
        int cand_col = -1;
        bool cand_add = false;
        for (int j = 0; j < p; ++j) {
            std::set<int> trial = current;
            bool add;
            if (current.count(j)) {
                trial.erase(j);
                add = false;
            } else {
                trial.insert(j);
                add = true;
            }
            const double a = aic_with_intercept(data, as_vec(trial));
            if (a < cand_aic - 1e-10) {
                cand_aic = a;
                cand_col = j;
                cand_add = add;
            }
        }
        if (cand_col < 0) break;
        if (cand_add) {
            current.insert(cand_col);
        } else {
            current.erase(cand_col);
        }
        best = cand_aic;
    }

    PartitionSpec spec;
    for (int j = 0; j < p; ++j) {
        (current.count(j) ? spec.main_idx : spec.nuisance_idx).push_back(j);
    }
    return spec;
}

PEResult bootstrap_pe(const Dataset& data, const BootstrapConfig& cfg,
                      const ShrinkageConfig& shrink_cfg, const PenaltyConfig& pen_cfg,
                      int jobs) {
    data.validate();
    cfg.validate(static_cast<int>(data.n()), static_cast<int>(data.p()));
    shrink_cfg.validate();
    const FitContext ctx{data, cfg, shrink_cfg, pen_cfg};

    std::vector<BootstrapOutcome> outcomes(cfg.B);
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int b = next.fetch_add(1);
            if (b >= cfg.B) break;
            try {
                outcomes[b] =
                    one_bootstrap(ctx, derive_stream({cfg.seed,
                                                      static_cast<std::uint64_t>(b)}));
            } catch (const std::exception&) {
                outcomes[b].failed = true;
            }
        }
    };
    const int workers = std::max(1, jobs);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    // reference fit on the original data for the bootstrap bias
    auto [orig_std, orig_t] = standardize(data);
    const auto orig_fits = fit_suite(ctx, orig_std.X, orig_std.y,
                                     derive_stream({cfg.seed, 0x0A16ULL}));

    PEResult res;
    res.estimators = cfg.estimators;
    res.coef_names.push_back("(intercept)");
    for (int j : cfg.sub_model.main_idx) {
        res.coef_names.push_back(j < static_cast<int>(data.column_names.size())
                                     ? data.column_names[j]
                                     : "x" + std::to_string(j));
    }

    int failed = 0;
    for (const auto& o : outcomes) {
        if (o.failed) ++failed;
    }
    if (failed > 0.01 * cfg.B) {
        throw std::runtime_error("bootstrap_pe: " + std::to_string(failed) +
                                 " replicates failed");
    }

    const std::size_t m = cfg.estimators.size();
    const std::size_t q = cfg.sub_model.main_idx.size() + 1;
    for (std::size_t k = 0; k < m; ++k) {
        const Estimator e = cfg.estimators[k];
        std::vector<double>& draws = res.pe_draws[e];
        VectorXd csum = VectorXd::Zero(q), csumsq = VectorXd::Zero(q);
        double pe_sum = 0.0;
        int ok = 0;
        for (const auto& o : outcomes) {
            if (o.failed) continue;
            ++ok;
            draws.push_back(o.pe[k]);
            pe_sum += o.pe[k];
            csum += o.coef[k];
            csumsq += o.coef[k].cwiseProduct(o.coef[k]);
        }
        res.mean_pe[e] = pe_sum / ok;

        const VectorXd orig = [&] {
            const VectorXd& b = orig_fits.at(e);
            VectorXd row(q);
            row(0) = orig_t.response_mean;
            for (std::size_t j = 0; j + 1 < q; ++j) {
                row(j + 1) =
                    is_sub_vector_kind(e) ? b(j) : b(cfg.sub_model.main_idx[j]);
            }
            return row;
        }();
        std::vector<CoefficientStats> stats(q);
        for (std::size_t j = 0; j < q; ++j) {
            const double mean = csum(j) / ok;
            const double var = ok > 1 ? (csumsq(j) - ok * mean * mean) / (ok - 1) : 0.0;
            stats[j] = {mean, mean - orig(j), std::sqrt(std::max(0.0, var))};
        }
        res.coefficients[e] = std::move(stats);
    }
    const double base = res.mean_pe.at(Estimator::LiuFull);
    for (const auto& [e, v] : res.mean_pe) res.rpe[e] = v / base;
    return res;
}

CorrelationResult correlation_matrix(const Dataset& data) {
    data.validate();
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    if (n < 3) throw std::invalid_argument("correlation_matrix: needs n >= 3");

    CorrelationResult out;
    out.names = data.column_names;
    if (out.names.empty()) {
        for (Eigen::Index j = 0; j < p; ++j) out.names.push_back("x" + std::to_string(j));
    }
    MatrixXd Z(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double mean = data.X.col(j).mean();
        const double ss = std::sqrt((data.X.col(j).array() - mean).square().sum());
        if (ss <= 0.0) {
            throw std::runtime_error("correlation_matrix: constant column " + out.names[j]);
        }
        Z.col(j) = (data.X.col(j).array() - mean) / ss;
    }
    out.r = Z.transpose() * Z;
    out.p_value.resize(p, p);
    out.significant.resize(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            if (i == j) {
                out.r(i, j) = 1.0;
                out.p_value(i, j) = 0.0;
                out.significant(i, j) = true;
                continue;
            }
            const double r = std::min(0.9999999999, std::max(-0.9999999999, out.r(i, j)));
            const double t = r * std::sqrt((n - 2) / (1.0 - r * r));
            out.p_value(i, j) = student_t_two_sided_p(t, static_cast<double>(n - 2));
            out.significant(i, j) = out.p_value(i, j) < 0.05;
        }
    }
    return out;
}

}  // namespace liureg
