// liureg: Liu-type shrinkage estimation toolkit.
//
// Subcommands: simulate (Monte Carlo relative-efficiency grids),
// risk (theoretical risk curves), dist (noncentral chi-square
// utilities), analyze (bootstrap + cross-validated prediction error on
// a CSV dataset). Every output CSV is written atomically and paired
// with a JSON manifest that pins the resolved configuration and seed.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "liureg/application.hpp"
#include "liureg/asymptotics.hpp"
#include "liureg/config.hpp"
#include "liureg/csvio.hpp"
#include "liureg/distributions.hpp"
#include "liureg/estimators.hpp"
#include "liureg/manifest.hpp"
#include "liureg/simulation.hpp"

namespace {

using namespace liureg;

struct CliError : std::runtime_error {
    std::string category;
    int code;
    CliError(std::string cat, int c, const std::string& msg)
        : std::runtime_error(msg), category(std::move(cat)), code(c) {}
};

std::uint64_t resolve_seed(bool seed_given, std::uint64_t cli_seed, bool cfg_has,
                           std::uint64_t cfg_seed) {
    if (seed_given) return cli_seed;
    if (cfg_has) return cfg_seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::vector<Estimator> parse_estimators(const std::vector<std::string>& labels) {
    std::vector<Estimator> out;
    for (const auto& l : labels) out.push_back(estimator_from_label(l));
    return out;
}

ShrinkageConfig shrinkage_from_config(ConfigFile& cfg) {
    ShrinkageConfig sc;
    const std::string d_mode = cfg.get_string_or("d_mode", "estimate");
    if (d_mode == "estimate") {
        sc.d_mode = DMode::Estimated;
    } else if (d_mode == "fixed") {
        sc.d_mode = DMode::Fixed;
    } else {
        throw CliError("CONFIG", 2, "d_mode must be 'estimate' or 'fixed'");
    }
    sc.d = cfg.get_number_or("d", 1.0);
    sc.d1 = cfg.get_number_or("d1", sc.d);
    sc.lambda_r = cfg.get_number_or("lambda_r", 0.0);
    sc.lambda_r1 = cfg.get_number_or("lambda_r1", 0.0);
    sc.alpha = cfg.get_number_or("alpha", 0.05);
    const std::string variant = cfg.get_string_or("lfm_variant", "as_printed");
    if (variant == "as_printed") {
        sc.liu_variant = LiuFullVariant::AsPrinted;
    } else if (variant == "unrestricted") {
        sc.liu_variant = LiuFullVariant::Unrestricted;
    } else {
        throw CliError("CONFIG", 2, "lfm_variant must be 'as_printed' or 'unrestricted'");
    }
    sc.scaled_fit = cfg.get_bool_or("scaled_fit", false);
    return sc;
}

void describe_shrinkage(RunManifest& m, const ShrinkageConfig& sc) {
    m.parameters["d_mode"] = sc.d_mode == DMode::Estimated ? "estimate" : "fixed";
    m.parameters["d"] = std::to_string(sc.d);
    m.parameters["d1"] = std::to_string(sc.d1);
    m.parameters["alpha"] = std::to_string(sc.alpha);
    m.parameters["lfm_variant"] =
        sc.liu_variant == LiuFullVariant::AsPrinted ? "as_printed" : "unrestricted";
    m.parameters["scaled_fit"] = sc.scaled_fit ? "true" : "false";
    m.parameters["ridge_gcv_grid"] = "50 log-spaced points on [1e-4, 1e2]";
    m.parameters["penalty_grid"] = "30 log-spaced points on [1e-4, 1] x lambda_max";
}

int run_dist(const std::string& op, int v, double delta, int j, double x, double c,
             const std::string& side, double alpha) {
    double value;
    if (op == "cdf") {
        value = ncchisq_cdf(v, delta, x);
    } else if (op == "invmoment") {
        value = inv_moment(v, delta, j);
    } else if (op == "truncmoment") {
        const TailSide s = side == "le" ? TailSide::LessEqual : TailSide::Greater;
        value = trunc_inv_moment(v, delta, j, c, s);
    } else if (op == "quantile") {
        value = chisq_quantile(v, alpha);
    } else {
        throw CliError("USAGE", 64, "unknown dist operation: " + op);
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    std::cout << buf << "\n";
    return 0;
}

int run_risk(int p1, int p2, double rho, double d, double alpha, double sigma2,
             double delta_max, int steps, const std::string& out, bool full_precision) {
    const int p = p1 + p2;
    AsymptoticInputs inp;
    inp.C = (1.0 - rho) * MatrixXd::Identity(p, p) + rho * MatrixXd::Ones(p, p);
    inp.sigma2 = sigma2;
    inp.d = d;
    inp.beta = VectorXd::Zero(p);
    inp.beta.head(p1).setOnes();
    inp.W = MatrixXd::Identity(p1, p1);

    // unit direction for the local alternative; rescaled per grid point
    VectorXd dir = VectorXd::Zero(p2);
    dir(0) = 1.0;
    inp.kappa = dir;
    const double unit = derive_symbols(inp).Delta;

    CsvWriter csv({"delta", "estimator", "risk"}, full_precision);
    const std::vector<Estimator> kinds = {Estimator::LiuFull, Estimator::LiuSub,
                                          Estimator::Pretest, Estimator::Stein,
                                          Estimator::PositivePart};
    for (int k = 0; k <= steps; ++k) {
        const double target = delta_max * k / steps;
        inp.kappa = target > 0.0 ? VectorXd(std::sqrt(target / unit) * dir)
                                 : VectorXd(VectorXd::Zero(p2));
        const auto sym = derive_symbols(inp);
        for (Estimator e : kinds) {
            csv.add_row_mixed({csv.format_number(target), estimator_label(e),
                               csv.format_number(risk(e, sym, inp.W, alpha))});
        }
    }
    csv.write(out);

    RunManifest m;
    m.subcommand = "risk";
    m.parameters = {{"p1", std::to_string(p1)},
                    {"p2", std::to_string(p2)},
                    {"rho", std::to_string(rho)},
                    {"d", std::to_string(d)},
                    {"alpha", std::to_string(alpha)},
                    {"sigma2", std::to_string(sigma2)},
                    {"delta_max", std::to_string(delta_max)},
                    {"steps", std::to_string(steps)}};
    m.outputs["risk_csv"] = out;
    m.write(out + ".manifest.json");
    return 0;
}

int run_simulate(const std::string& config_path, const std::string& out,
                 const std::string& plot_out, bool seed_given, std::uint64_t cli_seed,
                 int jobs, bool full_precision) {
    ConfigFile cfg = [&] {
        try {
            return ConfigFile::parse_file(config_path);
        } catch (const std::exception& e) {
            throw CliError("CONFIG", 2, e.what());
        }
    }();

    std::vector<SimulationCell> cells;
    ShrinkageConfig sc;
    std::uint64_t master_seed = 0;
    try {
        const int p1 = static_cast<int>(cfg.get_int_or("p1", 5));
        const auto p2s = cfg.get_number_list_or("p2", {15});
        const auto ns = cfg.get_number_list_or("n", {100});
        const auto rhos = cfg.get_number_list_or("rho", {0.0});
        const auto deltas = cfg.get_number_list_or("delta_star", {0.0});
        const int reps = static_cast<int>(cfg.get_int_or("reps", 1000));
        const double alpha = cfg.get_number_or("alpha", 0.05);
        const auto est = parse_estimators(
            cfg.get_string_list_or("estimators", {"LFM", "LSM", "LPT", "LS", "LPS"}));
        const bool cfg_has_seed = cfg.has("seed");
        const std::uint64_t cfg_seed =
            cfg_has_seed ? static_cast<std::uint64_t>(cfg.get_int("seed")) : 0;
        master_seed = resolve_seed(seed_given, cli_seed, cfg_has_seed, cfg_seed);
        sc = shrinkage_from_config(cfg);
        cfg.check_all_consumed();

        for (double n : ns) {
            for (double p2 : p2s) {
                for (double rho : rhos) {
                    for (double ds : deltas) {
                        SimulationCell cell;
                        cell.n = static_cast<int>(n);
                        cell.p1 = p1;
                        cell.p2 = static_cast<int>(p2);
                        cell.rho = rho;
                        cell.delta_star = ds;
                        cell.reps = reps;
                        cell.alpha = alpha;
                        cell.estimators = est;
                        cells.push_back(cell);
                    }
                }
            }
        }
    } catch (const CliError&) {
        throw;
    } catch (const std::exception& e) {
        throw CliError("CONFIG", 2, e.what());
    }

    const auto rows = run_grid(cells, master_seed, sc, {}, jobs);

    std::vector<std::string> header = {"n",           "p1",   "p2",     "rho",
                                       "delta_star",  "reps", "failed", "cn_mean"};
    for (Estimator e : cells.front().estimators) {
        const std::string l = estimator_label(e);
        header.push_back(l + "_mse");
        header.push_back(l + "_se");
        header.push_back(l + "_rmse");
    }
    CsvWriter csv(header, full_precision);
    for (const auto& row : rows) {
        std::vector<double> vals = {static_cast<double>(row.cell.n),
                                    static_cast<double>(row.cell.p1),
                                    static_cast<double>(row.cell.p2),
                                    row.cell.rho,
                                    row.cell.delta_star,
                                    static_cast<double>(row.cell.reps),
                                    static_cast<double>(row.failed_replicates),
                                    row.mean_condition_number};
        for (Estimator e : row.cell.estimators) {
            vals.push_back(row.mse.at(e));
            vals.push_back(row.mse_se.at(e));
            vals.push_back(row.rmse.at(e));
        }
        csv.add_row(vals);
    }
    csv.write(out);

    RunManifest m;
    m.subcommand = "simulate";
    m.master_seed = master_seed;
    for (const auto& [k, v] : cfg.raw()) m.parameters["config." + k] = v;
    describe_shrinkage(m, sc);
    m.parameters["jobs_note"] = "outputs are independent of --jobs";
    m.outputs["rmse_csv"] = out;

    if (!plot_out.empty()) {
        CsvWriter plot({"n", "p2", "rho", "delta_star", "estimator", "rmse"},
                       full_precision);
        for (const auto& row : rows) {
            for (Estimator e : row.cell.estimators) {
                plot.add_row_mixed({plot.format_number(row.cell.n),
                                    plot.format_number(row.cell.p2),
                                    plot.format_number(row.cell.rho),
                                    plot.format_number(row.cell.delta_star),
                                    estimator_label(e),
                                    plot.format_number(row.rmse.at(e))});
            }
        }
        plot.write(plot_out);
        m.outputs["plot_csv"] = plot_out;
    }
    m.write(out + ".manifest.json");
    return 0;
}

int run_analyze(const std::string& data_path, const std::string& response,
                const std::string& submodel, int B, int folds, const std::string& out_dir,
                bool seed_given, std::uint64_t cli_seed, int jobs, bool full_precision) {
    Dataset data = [&] {
        try {
            return load_table(data_path, response);
        } catch (const std::exception& e) {
            throw CliError("IO", 3, e.what());
        }
    }();

    BootstrapConfig bc;
    bc.B = B;
    bc.folds = folds;
    bc.seed = resolve_seed(seed_given, cli_seed, false, 0);
    bc.estimators = {Estimator::LiuFull,      Estimator::LiuSub,
                     Estimator::Pretest,      Estimator::Stein,
                     Estimator::PositivePart, Estimator::Lse,
                     Estimator::RidgeFull,    Estimator::Lasso,
                     Estimator::AdaptiveLasso, Estimator::Scad};

    if (submodel == "auto") {
        bc.sub_model = select_submodel(data);
    } else {
        std::vector<std::string> wanted;
        std::stringstream ss(submodel);
        std::string tok;
        while (std::getline(ss, tok, ',')) wanted.push_back(tok);
        for (const auto& name : wanted) {
            bool found = false;
            for (std::size_t j = 0; j < data.column_names.size(); ++j) {
                if (data.column_names[j] == name) {
                    bc.sub_model.main_idx.push_back(static_cast<int>(j));
                    found = true;
                }
            }
            if (!found) throw CliError("CONFIG", 2, "unknown covariate: " + name);
        }
        for (int j = 0; j < static_cast<int>(data.p()); ++j) {
            if (std::find(bc.sub_model.main_idx.begin(), bc.sub_model.main_idx.end(),
                          j) == bc.sub_model.main_idx.end()) {
                bc.sub_model.nuisance_idx.push_back(j);
            }
        }
    }

    ShrinkageConfig sc;
    sc.d_mode = DMode::Estimated;
    sc.liu_variant = LiuFullVariant::Unrestricted;
    sc.scaled_fit = true;

    const PEResult res = bootstrap_pe(data, bc, sc, {}, jobs);

    std::filesystem::create_directories(out_dir);

    std::vector<std::string> rpe_header = {"estimator", "row"};
    rpe_header.push_back("intercept");
    for (int j : bc.sub_model.main_idx) rpe_header.push_back(data.column_names[j]);
    rpe_header.push_back("rpe");
    CsvWriter rpe(rpe_header, full_precision);
    for (Estimator e : res.estimators) {
        const auto& stats = res.coefficients.at(e);
        for (const std::string row : {"estimate", "bias", "se"}) {
            std::vector<std::string> cells = {estimator_label(e), row};
            for (const auto& s : stats) {
                const double v = row == "estimate" ? s.estimate
                                 : row == "bias"   ? s.bias
                                                   : s.se;
                cells.push_back(rpe.format_number(v));
            }
            cells.push_back(row == "estimate" ? rpe.format_number(res.rpe.at(e)) : "");
            rpe.add_row_mixed(cells);
        }
    }
    rpe.write(out_dir + "/rpe_table.csv");

    CsvWriter box({"replicate", "estimator", "pe"}, full_precision);
    for (Estimator e : res.estimators) {
        const auto& draws = res.pe_draws.at(e);
        for (std::size_t b = 0; b < draws.size(); ++b) {
            box.add_row_mixed({box.format_number(static_cast<double>(b)),
                               estimator_label(e), box.format_number(draws[b])});
        }
    }
    box.write(out_dir + "/pe_boxplot.csv");

    const auto corr = correlation_matrix(data);
    std::vector<std::string> h = {"variable"};
    for (const auto& n : corr.names) h.push_back(n);
    h.push_back("significant_pairs");
    CsvWriter cm(h, full_precision);
    for (Eigen::Index i = 0; i < corr.r.rows(); ++i) {
        std::vector<std::string> cells = {corr.names[i]};
        std::string sig;
        for (Eigen::Index j = 0; j < corr.r.cols(); ++j) {
            cells.push_back(cm.format_number(corr.r(i, j)));
            if (j != i && corr.significant(i, j)) {
                sig += (sig.empty() ? "" : ";") + corr.names[j];
            }
        }
        cells.push_back(sig);
        cm.add_row_mixed(cells);
    }
    cm.write(out_dir + "/correlations.csv");

    RunManifest m;
    m.subcommand = "analyze";
    m.master_seed = bc.seed;
    m.parameters["data"] = data_path;
    m.parameters["response"] = response;
    m.parameters["B"] = std::to_string(B);
    m.parameters["folds"] = std::to_string(folds);
    std::string main_cols;
    for (int j : bc.sub_model.main_idx) {
        main_cols += (main_cols.empty() ? "" : ",") + data.column_names[j];
    }
    m.parameters["submodel"] = main_cols;
    describe_shrinkage(m, sc);
    m.outputs["rpe_table"] = out_dir + "/rpe_table.csv";
    m.outputs["pe_boxplot"] = out_dir + "/pe_boxplot.csv";
    m.outputs["correlations"] = out_dir + "/correlations.csv";
    m.write(out_dir + "/manifest.json");

    for (Estimator e : res.estimators) {
        std::printf("%-8s RPE %.4f\n", estimator_label(e), res.rpe.at(e));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Liu-type shrinkage estimation toolkit"};
    app.require_subcommand(1);

    auto* dist = app.add_subcommand("dist", "noncentral chi-square utilities");
    dist->require_subcommand(1);
    int d_v = 1, d_j = 1;
    double d_delta = 0.0, d_x = 0.0, d_c = 1.0, d_alpha = 0.05;
    std::string d_side = "le";
    auto* c1 = dist->add_subcommand("cdf");
    c1->add_option("--v", d_v)->required();
    c1->add_option("--delta", d_delta);
    c1->add_option("--x", d_x)->required();
    auto* c2 = dist->add_subcommand("invmoment");
    c2->add_option("--v", d_v)->required();
    c2->add_option("--delta", d_delta);
    c2->add_option("--j", d_j)->required();
    auto* c3 = dist->add_subcommand("truncmoment");
    c3->add_option("--v", d_v)->required();
    c3->add_option("--delta", d_delta);
    c3->add_option("--j", d_j)->required();
    c3->add_option("--c", d_c)->required();
    c3->add_option("--side", d_side)->check(CLI::IsMember({"le", "gt"}));
    auto* c4 = dist->add_subcommand("quantile");
    c4->add_option("--v", d_v)->required();
    c4->add_option("--alpha", d_alpha)->required();

    auto* risk_cmd = app.add_subcommand("risk", "theoretical risk curves");
    int r_p1 = 3, r_p2 = 5, r_steps = 40;
    double r_rho = 0.3, r_d = 0.8, r_alpha = 0.05, r_sigma2 = 1.0, r_dmax = 20.0;
    std::string r_out = "risk.csv";
    risk_cmd->add_option("--p1", r_p1);
    risk_cmd->add_option("--p2", r_p2);
    risk_cmd->add_option("--rho", r_rho);
    risk_cmd->add_option("--d", r_d);
    risk_cmd->add_option("--alpha", r_alpha);
    risk_cmd->add_option("--sigma2", r_sigma2);
    risk_cmd->add_option("--delta-max", r_dmax);
    risk_cmd->add_option("--steps", r_steps);
    risk_cmd->add_option("--out", r_out)->required();

    auto* sim = app.add_subcommand("simulate", "Monte Carlo relative-efficiency study");
    std::string s_config, s_out, s_plot;
    std::uint64_t s_seed = 0;
    int s_jobs = 1;
    bool s_full = false;
    sim->add_option("--config", s_config)->required();
    sim->add_option("--out", s_out)->required();
    sim->add_option("--plot-data", s_plot);
    auto* seed_opt = sim->add_option("--seed", s_seed);
    sim->add_option("--jobs", s_jobs)->check(CLI::PositiveNumber);
    sim->add_flag("--precision-full", s_full);

    auto* ana = app.add_subcommand("analyze", "bootstrap prediction-error pipeline");
    std::string a_data, a_response, a_submodel = "auto", a_out;
    int a_B = 1000, a_folds = 10, a_jobs = 1;
    std::uint64_t a_seed = 0;
    bool a_full = false;
    ana->add_option("--data", a_data)->required();
    ana->add_option("--response", a_response)->required();
    ana->add_option("--submodel", a_submodel);
    ana->add_option("--B", a_B);
    ana->add_option("--folds", a_folds);
    ana->add_option("--out", a_out)->required();
    auto* a_seed_opt = ana->add_option("--seed", a_seed);
    ana->add_option("--jobs", a_jobs)->check(CLI::PositiveNumber);
    ana->add_flag("--precision-full", a_full);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() != 0) {
            std::cerr << "error category=USAGE: " << e.what() << "\n";
        }
        return app.exit(e);
    }

    try {
        if (dist->parsed()) {
            std::string op;
            for (auto* sub : {c1, c2, c3, c4}) {
                if (sub->parsed()) op = sub->get_name();
            }
            return run_dist(op, d_v, d_delta, d_j, d_x, d_c, d_side, d_alpha);
        }
        if (risk_cmd->parsed()) {
            return run_risk(r_p1, r_p2, r_rho, r_d, r_alpha, r_sigma2, r_dmax, r_steps,
                            r_out, false);
        }
        if (sim->parsed()) {
            return run_simulate(s_config, s_out, s_plot, seed_opt->count() > 0, s_seed,
                                s_jobs, s_full);
        }
        if (ana->parsed()) {
            return run_analyze(a_data, a_response, a_submodel, a_B, a_folds, a_out,
                               a_seed_opt->count() > 0, a_seed, a_jobs, a_full);
        }
    } catch (const CliError& e) {
        std::cerr << "error category=" << e.category << ": " << e.what() << "\n";
        return e.code;
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        const std::string cat = msg.rfind("config:", 0) == 0 ? "CONFIG"
                                : msg.find("cannot open") != std::string::npos
                                    ? "IO"
                                    : "NUMERIC";
        std::cerr << "error category=" << cat << ": " << msg << "\n";
        return cat == "CONFIG" ? 2 : cat == "IO" ? 3 : 4;
    }
    return 0;
}
