#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "liureg/estimators.hpp"
#include "liureg/model_core.hpp"
#include "liureg/penalized.hpp"

namespace liureg {

struct BootstrapConfig {
    int B = 1000;     // bootstrap replicates
    int folds = 10;   // CV folds per replicate
    std::uint64_t seed = 0;
    std::vector<Estimator> estimators;
    PartitionSpec sub_model;
    // Audit mode: standardize with full-resample transforms instead of
    // per-training-fold ones. Exists so tests can assert the leakage
    // guard actually changes the answer; never used for reporting.
    bool leak_transforms = false;

    void validate(int n, int p) const;
};

struct CoefficientStats {
    double estimate = 0.0;  // bootstrap mean
    double bias = 0.0;      // bootstrap mean minus original-fit value
    double se = 0.0;        // bootstrap standard deviation
};

struct PEResult {
    std::vector<Estimator> estimators;
    std::map<Estimator, double> mean_pe;
    std::map<Estimator, double> rpe;                     // vs Liu full model
    std::map<Estimator, std::vector<double>> pe_draws;   // per replicate, for box plots
    // coefficient rows: intercept first, then the sub-model block, all
    // on the standardized-covariate scale (intercept on the raw
    // response scale)
    std::vector<std::string> coef_names;
    std::map<Estimator, std::vector<CoefficientStats>> coefficients;
};

// CSV ingestion for the application pipeline (header + named response).
Dataset load_table(const std::string& path, const std::string& response_col);

// Stepwise AIC (both directions, from the full model,
// AIC = n log(RSS/n) + 2k with an always-included intercept).
PartitionSpec select_submodel(const Dataset& data);

// Case-resampling bootstrap; each replicate scores estimators by
// k-fold cross-validated squared prediction error, with
// standardization fitted inside each training fold only.
PEResult bootstrap_pe(const Dataset& data, const BootstrapConfig& cfg,
                      const ShrinkageConfig& shrink_cfg, const PenaltyConfig& pen_cfg = {},
                      int jobs = 1);

struct CorrelationResult {
    std::vector<std::string> names;
    MatrixXd r;            // Pearson correlations, unit diagonal
    MatrixXd p_value;      // two-sided t-test
    Eigen::MatrixX<bool> significant;  // p < 0.05
};

CorrelationResult correlation_matrix(const Dataset& data);

}  // namespace liureg
