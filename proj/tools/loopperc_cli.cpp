// loopperc command-line front end.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "loopperc/errors.hpp"
#include "loopperc/estimators.hpp"
#include "loopperc/gwt.hpp"
#include "loopperc/multilink.hpp"
#include "loopperc/percolation.hpp"
#include "loopperc/potential.hpp"
#include "loopperc/tree.hpp"

using namespace loopperc;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kValidationExit = 2;
constexpr int kDiagnosticExit = 3;

struct RunConfig {
    std::string command;
    std::uint64_t seed = 1;
    unsigned threads = default_threads();
    std::string out;
    std::string tree = "regular:3";
    std::string law = "poisson:2";
    std::string model = "loop";
    std::vector<double> beta{0.5};
    std::vector<double> lambda{1.0};
    std::vector<double> u{1.0};
    std::vector<double> eps{1e-2, 1e-3, 1e-4};
    std::vector<double> q{0.5};
    std::vector<int> d{3};
    std::vector<int> d_star{3};
    std::vector<int> depths{};
    int depth = 8;
    std::size_t replicas = 10000;
    std::size_t mc_samples = 0;
    int nodes = 256;
    double target = 0.05;
    double tol = 1e-3;
    double z = 1.96;
};

ordered_json to_json(const RunConfig& c) {
    ordered_json j;
    j["command"] = c.command;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["out"] = c.out;
    const auto& cmd = c.command;
    if (cmd == "gen-tree" || cmd == "survival" || cmd == "threshold" || cmd == "dominate" || cmd == "conductance" ||
        cmd == "probe-53")
        j["tree"] = c.tree;
    if (cmd == "gwt-check" || cmd == "unilink") j["law"] = c.law;
    if (cmd == "survival" || cmd == "threshold") j["model"] = c.model;
    if (cmd == "survival" || cmd == "dominate" || cmd == "gwt-check" || cmd == "unilink") j["beta"] = c.beta;
    if (cmd == "prune-prob" || cmd == "probe-53") j["lambda"] = c.lambda;
    if (cmd != "gen-tree" && cmd != "gwt-check" && cmd != "conductance") j["u"] = c.u;
    if (cmd == "gwt-check") j["eps"] = c.eps;
    if (cmd == "conductance") {
        j["q"] = c.q;
        j["depths"] = c.depths;
    }
    if (cmd == "prune-prob") {
        j["d"] = c.d;
        j["d_star"] = c.d_star;
        j["mc_samples"] = c.mc_samples;
        j["nodes"] = c.nodes;
    }
    if (cmd != "prune-prob" && cmd != "gwt-check") j["depth"] = c.depth;
    if (cmd == "survival" || cmd == "threshold" || cmd == "dominate" || cmd == "unilink" || cmd == "probe-53")
        j["replicas"] = c.replicas;
    if (cmd == "threshold") {
        j["target"] = c.target;
        j["tol"] = c.tol;
        j["z"] = c.z;
    }
    return j;
}

double single(const std::vector<double>& v, const char* name) {
    if (v.size() != 1) throw InvalidParameter(std::string("--") + name + " takes exactly one value here");
    return v.front();
}

RootedTree materialize(const TreeSpec& spec, int depth, std::uint64_t seed) {
    if (depth < 0) throw InvalidParameter("--depth must be >= 0");
    struct Visitor {
        int depth;
        std::uint64_t seed;
        RootedTree operator()(const TreeSpec::Regular& r) const { return generate_regular(r.d, depth); }
        RootedTree operator()(const TreeSpec::Law& l) const {
            Rng rng = replica_rng(seed, 0);
            return generate_galton_watson(l.law, depth, rng);
        }
        RootedTree operator()(const TreeSpec::Explicit& e) const {
            if (e.tree->max_depth() < depth) throw InvalidParameter("--depth exceeds the depth of the tree file");
            return truncate(*e.tree, depth);
        }
    };
    return std::visit(Visitor{depth, seed}, spec.variant());
}

void run(const RunConfig& c, std::ostream& out) {
    const auto& cmd = c.command;
    if (cmd == "gen-tree") {
        write_tree_csv(out, materialize(TreeSpec::parse(c.tree), c.depth, c.seed));
    } else if (cmd == "survival") {
        const auto curve = survival_curve(parse_model(c.model), TreeSpec::parse(c.tree), c.beta, single(c.u, "u"),
                                          c.depth, c.replicas, c.seed, c.threads);
        write_survival_csv(out, curve);
    } else if (cmd == "threshold") {
        ThresholdOptions o;
        o.target = c.target;
        o.tol = c.tol;
        o.z = c.z;
        o.threads = c.threads;
        const auto r = threshold_bisection(parse_model(c.model), TreeSpec::parse(c.tree), single(c.u, "u"), c.depth,
                                           c.replicas, c.seed, o);
        write_threshold_header(out);
        write_threshold_row(out, r);
    } else if (cmd == "dominate") {
        const auto spec = TreeSpec::parse(c.tree);
        const double u = single(c.u, "u");
        const auto rows = domination_report(spec, c.beta, u, c.depth, c.replicas, c.seed, c.threads);
        write_domination_csv(out, spec, u, c.depth, c.replicas, rows);
    } else if (cmd == "prune-prob") {
        if (c.mc_samples != 0 && c.mc_samples < 1000) throw InvalidParameter("--mc-samples must be 0 or >= 1000");
        write_pruning_header(out);
        std::uint64_t row = 0;
        for (int d : c.d)
            for (int ds : c.d_star)
                for (double lambda : c.lambda)
                    for (double u : c.u) {
                        if (d < 0 || ds < 0) throw InvalidParameter("--d and --d-star must be >= 0");
                        PruningParams p;
                        p.lambda = lambda;
                        p.u = u;
                        p.quadrature_nodes = c.nodes;
                        p.validate();
                        const auto du = static_cast<std::size_t>(d), dsu = static_cast<std::size_t>(ds);
                        const double r = pruning_probability(du, dsu, p);
                        double mc = std::nan(""), se = std::nan("");
                        if (c.mc_samples > 0 && d >= 2 && ds >= 1) {
                            Rng rng = replica_rng(c.seed, row);
                            const auto e = verify_pruning_probability_mc(du, dsu, p, c.mc_samples, rng);
                            mc = e.estimate;
                            se = e.std_error;
                        }
                        write_pruning_row(out, du, dsu, p, r, mc, se);
                        ++row;
                    }
    } else if (cmd == "gwt-check") {
        const GeneratingFunction f(OffspringLaw::parse(c.law));
        write_gwt_csv(out, f, c.beta, c.eps);
    } else if (cmd == "conductance") {
        const auto tree = materialize(TreeSpec::parse(c.tree), c.depth, c.seed);
        std::vector<int> depths = c.depths;
        if (depths.empty())
            for (int k = 1; k <= tree.max_depth(); ++k) depths.push_back(k);
        write_conductance_csv(out, c.q, depths, tree);
    } else if (cmd == "probe-53") {
        const auto tree = materialize(TreeSpec::parse(c.tree), c.depth, c.seed);
        const double lambda = single(c.lambda, "lambda"), u = single(c.u, "u");
        const auto r = theorem53_probe(tree, lambda, u, c.depth, c.replicas, c.seed);
        char buf[256];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g,%.17g,%.17g,%zu,%zu\n", lambda, u, c.depth,
                      r.br_before, r.br_after_mean, r.std_error, r.components, r.attempts);
        out << "lambda,u,D,br_before,br_after_mean,stderr,N,attempts\n" << buf;
    } else if (cmd == "unilink") {
        const auto law = OffspringLaw::parse(c.law);
        const double beta = single(c.beta, "beta"), u = single(c.u, "u");
        const auto r = unilink_branching_criterion(law, beta, u, c.depth, c.replicas, c.seed, c.threads);
        write_unilink_header(out);
        write_unilink_row(out, law, beta, u, c.depth, r);
    }
}

void write_sidecar(const RunConfig& c, double seconds) {
    ordered_json meta;
    meta["version"] = kVersion;
    meta["config"] = to_json(c);
    meta["seed"] = c.seed;
    meta["wall_time_s"] = seconds;
    meta["outputs"] = {c.out};
    const std::string path = c.out + ".meta.json";
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        f << meta.dump(2) << '\n';
        if (!f) throw std::runtime_error("cannot write " + path);
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

int main(int argc, char** argv) {
    RunConfig c;
    CLI::App app{"Loop percolation on trees: simulation, estimators and analytic checks"};
    app.set_config("--config", "", "Configuration file (TOML); command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1, 1);
    app.add_option("--seed", c.seed, "Master seed")->capture_default_str();
    app.add_option("--threads", c.threads, "Worker threads")->check(CLI::Range(1u, 4096u))->capture_default_str();
    app.add_option("--out", c.out, "Output CSV path")->required();

    const auto beta_opt = [&](CLI::App* s, const char* help) {
        s->add_option("--beta", c.beta, help)->delimiter(',')->check(CLI::NonNegativeNumber)->capture_default_str();
    };
    const auto u_opt = [&](CLI::App* s) {
        s->add_option("--u", c.u, "Cross probability u")->delimiter(',')->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
    };
    const auto depth_opt = [&](CLI::App* s) {
        s->add_option("--depth", c.depth, "Depth D")->check(CLI::NonNegativeNumber)->capture_default_str();
    };
    const auto replicas_opt = [&](CLI::App* s) {
        s->add_option("--replicas,-N", c.replicas, "Number of replicas N")->capture_default_str();
    };
    const auto tree_opt = [&](CLI::App* s) {
        s->add_option("--tree", c.tree, "regular:<d> | gw:<law> | gw-quenched:<law> | file:<csv>")
            ->capture_default_str();
    };

    auto* gen = app.add_subcommand("gen-tree", "Generate a tree and write it as CSV");
    tree_opt(gen);
    depth_opt(gen);

    auto* survival = app.add_subcommand("survival", "Depth-D survival curve over a beta grid");
    survival->add_option("--model", c.model, "loop | link | delaylink")->capture_default_str();
    tree_opt(survival);
    beta_opt(survival, "Sorted beta grid");
    u_opt(survival);
    depth_opt(survival);
    replicas_opt(survival);

    auto* threshold = app.add_subcommand("threshold", "Bisection for the depth-D threshold proxy");
    threshold->add_option("--model", c.model, "loop | link | delaylink")->capture_default_str();
    tree_opt(threshold);
    u_opt(threshold);
    depth_opt(threshold);
    replicas_opt(threshold);
    threshold->add_option("--target", c.target, "Target survival probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    threshold->add_option("--tol", c.tol, "Final bracket width")->check(CLI::PositiveNumber)->capture_default_str();
    threshold->add_option("--z", c.z, "Wilson interval width")->check(CLI::PositiveNumber)->capture_default_str();

    auto* dominate = app.add_subcommand("dominate", "Paired loop / delay-link / link survival comparison");
    tree_opt(dominate);
    beta_opt(dominate, "Sorted beta grid");
    u_opt(dominate);
    depth_opt(dominate);
    replicas_opt(dominate);

    auto* prune = app.add_subcommand("prune-prob", "Pruning probabilities over a (d, d*, lambda, u) grid");
    prune->add_option("--d", c.d, "Degrees")->delimiter(',')->capture_default_str();
    prune->add_option("--d-star", c.d_star, "Values of D*")->delimiter(',')->capture_default_str();
    prune->add_option("--lambda", c.lambda, "Link rates")->delimiter(',')->check(CLI::PositiveNumber)
        ->capture_default_str();
    u_opt(prune);
    prune->add_option("--nodes", c.nodes, "Quadrature nodes")->check(CLI::Range(64, 100000))->capture_default_str();
    prune->add_option("--mc-samples", c.mc_samples, "Monte Carlo check samples (0 = off)")->capture_default_str();

    auto* gwt = app.add_subcommand("gwt-check", "Galton-Watson criteria over a beta grid");
    gwt->add_option("--law", c.law, "Offspring law")->capture_default_str();
    beta_opt(gwt, "Beta values");
    gwt->add_option("--eps", c.eps, "Epsilon grid for the heavy-tail condition")->delimiter(',')->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* cond = app.add_subcommand("conductance", "Effective conductance of exponential gauges");
    tree_opt(cond);
    depth_opt(cond);
    cond->add_option("--q", c.q, "Gauge ratios q")->delimiter(',')->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cond->add_option("--depths", c.depths, "Depths to report (default 1..depth)")->delimiter(',');

    auto* probe = app.add_subcommand("probe-53", "Branching number before and after delay-link percolation");
    tree_opt(probe);
    probe->add_option("--lambda", c.lambda, "Link rate")->delimiter(',')->check(CLI::PositiveNumber)
        ->capture_default_str();
    u_opt(probe);
    depth_opt(probe);
    replicas_opt(probe);

    auto* uni = app.add_subcommand("unilink", "Uni-link branching criterion on Galton-Watson trees");
    uni->add_option("--law", c.law, "Offspring law")->capture_default_str();
    beta_opt(uni, "Link rate");
    u_opt(uni);
    depth_opt(uni);
    replicas_opt(uni);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: " << e.what() << '\n';
        return kValidationExit;
    }
    c.command = app.get_subcommands().front()->get_name();

    const std::string tmp = c.out + ".tmp";
    const auto start = std::chrono::steady_clock::now();
    int status = 0;
    bool renamed = false;
    try {
        {
            std::ofstream f(tmp, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open " + tmp);
            run(c, f);
            f.flush();
            if (!f) throw std::runtime_error("write to " + tmp + " failed");
        }
        std::filesystem::rename(tmp, c.out);
        renamed = true;
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_sidecar(c, seconds);
        return 0;
    } catch (const InvalidParameter& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        status = kValidationExit;
    } catch (const DiagnosticError& e) {
        std::cerr << "diagnostic: " << e.what() << '\n';
        status = kDiagnosticExit;
    } catch (const DegenerateStart& e) {
        std::cerr << "diagnostic: " << e.what() << '\n';
        status = kDiagnosticExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        status = 1;
    }
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    if (renamed) std::filesystem::remove(c.out, ec);
    return status;
}
