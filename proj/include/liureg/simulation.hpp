#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "liureg/estimators.hpp"
#include "liureg/penalized.hpp"
#include "liureg/rng.hpp"

namespace liureg {

// One Monte Carlo configuration: equicorrelated design, coefficient
// vector (1,...,1, delta*, 0,...,0), i.i.d. standard normal errors.
struct SimulationCell {
    int n = 100;
    int p1 = 5;
    int p2 = 15;
    double rho = 0.0;          // equicorrelation in [0, 1)
    double delta_star = 0.0;   // ||beta - beta0||
    int reps = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 0;    // cell-level stream root
    std::vector<Estimator> estimators;

    void validate() const;
    // Hash of the cell identity (everything except the seed), used to
    // derive per-cell streams from a master seed.
    std::uint64_t key_hash() const;
};

struct RmseRow {
    SimulationCell cell;
    std::map<Estimator, double> mse;
    std::map<Estimator, double> mse_se;   // Monte Carlo standard error
    std::map<Estimator, double> rmse;     // MSE ratio vs the Liu full model
    double mean_condition_number = 0.0;
    int failed_replicates = 0;
};

// n x p draw from N(0, Sigma_x) rows with Sigma_x = (1-rho) I + rho 11'.
MatrixXd generate_design(int n, int p, double rho, Xoshiro256pp& rng);

// (1,...,1, delta*, 0,...,0): p1 ones, then delta*, then p2-1 zeros.
VectorXd true_beta(int p1, int p2, double delta_star);

// Runs every replicate of one cell; deterministic for any job count.
// Penalized estimators are tuned per replicate by inner cross-
// validation on a data-driven log grid.
RmseRow run_cell(const SimulationCell& cell, const ShrinkageConfig& cfg,
                 const PenaltyConfig& pen_cfg = {}, int jobs = 1);

// One row per cell; cells are independent and order-insensitive
// because each derives its own stream from (master seed, cell key).
std::vector<RmseRow> run_grid(std::vector<SimulationCell> cells,
                              std::uint64_t master_seed, const ShrinkageConfig& cfg,
                              const PenaltyConfig& pen_cfg = {}, int jobs = 1);

}  // namespace liureg
