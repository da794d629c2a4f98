#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace liureg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Regression data: response y (length n) and design X (n x p), with
// optional column names carried through from CSV ingestion. Immutable
// after construction; all pipeline types in this library are value
// types safe to share across worker threads.
struct Dataset {
    VectorXd y;
    MatrixXd X;
    std::vector<std::string> column_names;  // empty when synthetic
    std::string response_name;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }

    // Enforces: rows(X) == len(y), p <= n, all entries finite.
    void validate() const;
};

// Split of the p regressors into a main block (indices of interest)
// and a nuisance block. Indices are 0-based and order is preserved.
struct PartitionSpec {
    std::vector<int> main_idx;
    std::vector<int> nuisance_idx;

    int p1() const { return static_cast<int>(main_idx.size()); }
    int p2() const { return static_cast<int>(nuisance_idx.size()); }

    // Enforces: disjoint, in range, union covers {0..p-1}, p1 >= 1.
    void validate(int p) const;
};

// Cached partition products. M1 is the annihilator of X1, materialized
// n x n (n stays small in all workloads here).
struct PartitionedDesign {
    MatrixXd X1;
    MatrixXd X2;
    MatrixXd M1;         // I - X1 (X1'X1)^-1 X1'
    MatrixXd x1tx1;      // X1'X1
    MatrixXd x2t_m1_x2;  // X2'M1X2

    Eigen::Index n() const { return X1.rows(); }
    int p1() const { return static_cast<int>(X1.cols()); }
    int p2() const { return static_cast<int>(X2.cols()); }
};

// Column-wise standardization state: apply() maps raw data to
// zero-mean/unit-sd covariates and a centered response; the transform
// is retained to back-map coefficients and recover the intercept.
struct StandardizationTransform {
    VectorXd column_means;
    VectorXd column_sds;  // sample sd, divisor n-1
    double response_mean = 0.0;

    MatrixXd apply_to(const MatrixXd& X) const;
    // Maps coefficients fitted on the standardized scale back to raw
    // scale; returns {intercept, raw-scale coefficients}.
    std::pair<double, VectorXd> back_map(const VectorXd& beta_std) const;
};

// Threshold above which a condition number flags multicollinearity.
inline constexpr double kConditionNumberThreshold = 30.0;

PartitionedDesign partition(const Dataset& data, const PartitionSpec& spec);

// lambda_max(X'X) / lambda_min(X'X). Throws when X'X is numerically
// singular (smallest eigenvalue below 1e-12 * largest).
double condition_number(const MatrixXd& X);

inline bool multicollinear(double condition_num) {
    return condition_num > kConditionNumberThreshold;
}

// Centers the response, standardizes every column to mean 0 / sd 1
// (sample sd). Throws naming the column when one is constant.
std::pair<Dataset, StandardizationTransform> standardize(const Dataset& data);

// CSV ingestion: header row required, one response column by name, all
// other columns numeric covariates. Parse failures report row/column.
Dataset load_csv(const std::string& path, const std::string& response_col);

}  // namespace liureg
