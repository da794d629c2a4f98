#include "liureg/model_core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace liureg {

void Dataset::validate() const {
    if (X.rows() != y.size()) {
        throw std::invalid_argument("Dataset: X has " + std::to_string(X.rows()) +
                                    " rows but y has length " + std::to_string(y.size()));
    }
    if (X.cols() > X.rows()) {
        throw std::invalid_argument("Dataset: p=" + std::to_string(X.cols()) +
                                    " exceeds n=" + std::to_string(X.rows()));
    }
    if (!X.allFinite() || !y.allFinite()) {
        throw std::invalid_argument("Dataset: non-finite entries present");
    }
}

void PartitionSpec::validate(int p) const {
    if (main_idx.empty()) {
        throw std::invalid_argument("PartitionSpec: main block must be nonempty");
    }
    if (static_cast<int>(main_idx.size() + nuisance_idx.size()) != p) {
        throw std::invalid_argument("PartitionSpec: index count " +
                                    std::to_string(main_idx.size() + nuisance_idx.size()) +
                                    " does not match p=" + std::to_string(p));
    }
    std::set<int> seen;
    for (const auto& block : {main_idx, nuisance_idx}) {
        for (int j : block) {
            if (j < 0 || j >= p) {
                throw std::out_of_range("PartitionSpec: index " + std::to_string(j) +
                                        " out of range for p=" + std::to_string(p));
            }
            if (!seen.insert(j).second) {
                throw std::invalid_argument("PartitionSpec: index " + std::to_string(j) +
                                            " appears in both blocks");
            }
        }
    }
}

MatrixXd StandardizationTransform::apply_to(const MatrixXd& X) const {
    if (X.cols() != column_means.size()) {
        throw std::invalid_argument("StandardizationTransform: column count mismatch");
    }
    MatrixXd out = X;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        out.col(j) = (X.col(j).array() - column_means(j)) / column_sds(j);
    }
    return out;
}

std::pair<double, VectorXd> StandardizationTransform::back_map(const VectorXd& beta_std) const {
    if (beta_std.size() != column_sds.size()) {
        throw std::invalid_argument("StandardizationTransform: coefficient length mismatch");
    }
    VectorXd beta_raw = beta_std.array() / column_sds.array();
    const double intercept = response_mean - beta_raw.dot(column_means);
    return {intercept, beta_raw};
}

PartitionedDesign partition(const Dataset& data, const PartitionSpec& spec) {
    data.validate();
    spec.validate(static_cast<int>(data.p()));

    PartitionedDesign pd;
    const Eigen::Index n = data.n();
    pd.X1.resize(n, spec.p1());
    pd.X2.resize(n, spec.p2());
    for (int k = 0; k < spec.p1(); ++k) pd.X1.col(k) = data.X.col(spec.main_idx[k]);
    for (int k = 0; k < spec.p2(); ++k) pd.X2.col(k) = data.X.col(spec.nuisance_idx[k]);

    pd.x1tx1 = pd.X1.transpose() * pd.X1;
    Eigen::LDLT<MatrixXd> ldlt(pd.x1tx1);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-12 * ldlt.vectorD().maxCoeff()) {
        throw std::runtime_error("partition: X1'X1 is numerically singular");
    }
    // M1 = I - X1 (X1'X1)^-1 X1', via factorized solve
    pd.M1 = MatrixXd::Identity(n, n) - pd.X1 * ldlt.solve(pd.X1.transpose());
    pd.x2t_m1_x2 = pd.X2.transpose() * pd.M1 * pd.X2;
    return pd;
}

double condition_number(const MatrixXd& X) {
    const MatrixXd gram = X.transpose() * X;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("condition_number: eigen decomposition failed");
    }
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 1e-12 * hi) {
        throw std::runtime_error("condition_number: X'X numerically singular (min eigenvalue " +
                                 std::to_string(lo) + ")");
    }
    return hi / lo;
}

std::pair<Dataset, StandardizationTransform> standardize(const Dataset& data) {
    data.validate();
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    if (n < 2) throw std::invalid_argument("standardize: need n >= 2");

    StandardizationTransform t;
    t.column_means.resize(p);
    t.column_sds.resize(p);
    t.response_mean = data.y.mean();

    Dataset out = data;
    out.y = data.y.array() - t.response_mean;
    for (Eigen::Index j = 0; j < p; ++j) {
        const double mean = data.X.col(j).mean();
        const double ss = (data.X.col(j).array() - mean).square().sum();
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (sd <= 0.0 || !std::isfinite(sd)) {
            const std::string name = j < static_cast<Eigen::Index>(data.column_names.size())
                                         ? data.column_names[j]
                                         : ("column " + std::to_string(j));
            throw std::runtime_error("standardize: degenerate (constant) column: " + name);
        }
        t.column_means(j) = mean;
        t.column_sds(j) = sd;
        out.X.col(j) = (data.X.col(j).array() - mean) / sd;
    }
    return {out, t};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim whitespace
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& response_col) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file " + path);
    const std::vector<std::string> header = split_csv_line(line);

    int response_idx = -1;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == response_col) response_idx = static_cast<int>(j);
    }
    if (response_idx < 0) {
        throw std::runtime_error("load_csv: response column '" + response_col +
                                 "' not found in " + path);
    }

    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error("load_csv: row " + std::to_string(lineno) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        }
        std::vector<double> vals(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            try {
                std::size_t pos = 0;
                vals[j] = std::stod(cells[j], &pos);
                if (pos != cells[j].size()) throw std::invalid_argument("trailing chars");
            } catch (const std::exception&) {
                throw std::runtime_error("load_csv: non-numeric cell at row " +
                                         std::to_string(lineno) + ", column '" + header[j] +
                                         "': '" + cells[j] + "'");
            }
        }
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw std::runtime_error("load_csv: no data rows in " + path);

    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index p = static_cast<Eigen::Index>(header.size()) - 1;
    Dataset data;
    data.y.resize(n);
    data.X.resize(n, p);
    data.response_name = response_col;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (static_cast<int>(j) != response_idx) data.column_names.push_back(header[j]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index k = 0;
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (static_cast<int>(j) == response_idx) {
                data.y(i) = rows[i][j];
            } else {
                data.X(i, k++) = rows[i][j];
            }
        }
    }
    data.validate();
    return data;
}

}  // namespace liureg
