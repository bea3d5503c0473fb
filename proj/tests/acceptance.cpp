// Acceptance runner: `acceptance <name>|all [cli-path]` checks one criterion
// (or all) and prints one PASS/FAIL line each; exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <unistd.h>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "loopperc/estimators.hpp"
#include "loopperc/gwt.hpp"
#include "loopperc/loops.hpp"
#include "loopperc/multilink.hpp"
#include "loopperc/percolation.hpp"
#include "loopperc/potential.hpp"

using namespace loopperc;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string num(double x, int digits = 6) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string cli_path;

// ---------------------------------------------------------------- 1
Outcome loop_partition() {
    Rng rng(101);
    double worst_sum = 0.0, worst_int = 0.0;
    int configs = 0;
    while (configs < 1000) {
        RootedTree tree = [&] {
            switch (rng() % 4) {
            case 0: return generate_regular(2 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 6));
            case 1: return generate_regular(3, 7);
            case 2: return generate_galton_watson(OffspringLaw::poisson(0.8 + 2.0 * uniform01(rng)), 8, rng);
            default: return generate_galton_watson(OffspringLaw::geometric(0.25 + 0.4 * uniform01(rng)), 7, rng);
            }
        }();
        if (tree.size() > 10000) continue;
        const double beta = 0.05 + 3.0 * uniform01(rng);
        const double u = configs % 3 == 0 ? 1.0 : (configs % 3 == 1 ? 0.0 : uniform01(rng));
        const auto config = sample_links(tree, beta, u, rng);
        const auto loops = all_loops(tree, config);
        double total = 0.0;
        for (const auto& l : loops) {
            total += l.length;
            if (u == 1.0) worst_int = std::max(worst_int, std::abs(l.length - std::round(l.length)));
        }
        worst_sum = std::max(worst_sum, std::abs(total - static_cast<double>(tree.size())));
        ++configs;
    }
    const bool pass = worst_sum <= 1e-9 && worst_int <= 1e-9;
    return {pass, "configs=1000 max|sum-|V||=" + num(worst_sum, 3) + " max u=1 distance to integer=" +
                      num(worst_int, 3)};
}

// ---------------------------------------------------------------- 2
Outcome hand_traces() {
    const Link cross1{0.4, LinkKind::Cross};
    bool ok = true;
    std::string detail;

    // No links.
    const auto pair = RootedTree::from_child_counts(std::vector<std::int64_t>{1, 0});
    const auto empty = LinkConfiguration::from_edges({{}, {}}, 1.0, 1.0);
    const auto t0 = trace_loop(pair, empty, LoopPoint{0, 0.0, Direction::Up});
    const bool a = t0.segments.size() == 1 && t0.segments[0].vertex == 0 && t0.length == 1.0 &&
                   t0.visited_vertices == std::vector<VertexId>{0};
    detail += std::string("no-links ") + (a ? "ok" : "wrong");

    // One cross on {o,y}.
    const auto one = LinkConfiguration::from_edges({{}, {cross1}}, 1.0, 1.0);
    const auto t1 = trace_loop(pair, one, LoopPoint{0, 0.0, Direction::Up});
    const bool b = t1.visited_vertices == std::vector<VertexId>{0, 1} && std::abs(t1.length - 2.0) < 1e-15;
    detail += std::string(", one-cross ") + (b ? "ok" : "wrong");

    // Two crosses on {x,y}, x not the root.
    const auto path = RootedTree::from_child_counts(std::vector<std::int64_t>{1, 1, 0});
    const double s1 = 0.3, s2 = 0.7;
    const auto two =
        LinkConfiguration::from_edges({{}, {}, {{s1, LinkKind::Cross}, {s2, LinkKind::Cross}}}, 1.0, 1.0);
    const auto t2 = trace_loop(path, two, LoopPoint{1, 0.0, Direction::Up});
    bool c = t2.visited_vertices == std::vector<VertexId>{1, 2} && std::abs(t2.length - 1.0) < 1e-15;
    for (double t : {0.0, 0.1, 0.29, 0.71, 0.9, 0.999}) c = c && t2.occupies(1, t) && !t2.occupies(2, t);
    for (double t : {0.31, 0.5, 0.69}) c = c && t2.occupies(2, t) && !t2.occupies(1, t);
    const auto comp = trace_loop(path, two, LoopPoint{1, 0.5, Direction::Up});
    c = c && std::abs(comp.length - 1.0) < 1e-15 && comp.occupies(1, 0.5) && comp.occupies(2, 0.1) &&
        comp.occupies(2, 0.9) && !comp.occupies(2, 0.5);
    detail += std::string(", two-crosses ") + (c ? "ok" : "wrong");
    ok = a && b && c;
    return {ok, detail};
}

// ---------------------------------------------------------------- 3
Outcome pruning_cross_check() {
    const std::vector<std::pair<std::size_t, std::size_t>> pairs{{2, 1}, {3, 3}, {4, 2}, {4, 3}, {5, 5}};
    int cases = 0, mc_fail = 0, dim_fail = 0, plugin_fail = 0;
    double worst_z = 0.0, worst_dim = 0.0;
    std::uint64_t stream = 0;
    for (const auto& [d, ds] : pairs)
        for (double lambda : {0.3, 0.7, 1.0, 2.0})
            for (double u : {0.0, 0.5, 1.0}) {
                PruningParams p;
                p.lambda = lambda;
                p.u = u;
                const double r1 = pruning_probability(d, ds, p);
                const double r2 = pruning_probability_2d(d, ds, p);
                Rng rng = replica_rng(303, stream++);
                const auto mc = verify_pruning_probability_mc(d, ds, p, 100000, rng);
                // Binomial SE at the quadrature value; the plug-in SE collapses
                // when only a handful of the 1e5 draws are hits.
                const double se = std::sqrt(r1 * (1 - r1) / 100000.0);
                const double z = se > 0 ? std::abs(mc.estimate - r1) / se : (mc.estimate == r1 ? 0.0 : INFINITY);
                const double z_plugin = mc.std_error > 0 ? std::abs(mc.estimate - r1) / mc.std_error
                                                         : (mc.estimate == r1 ? 0.0 : INFINITY);
                plugin_fail += z_plugin > 3.0;
                worst_z = std::max(worst_z, z);
                worst_dim = std::max(worst_dim, std::abs(r1 - r2));
                mc_fail += z > 3.0;
                dim_fail += std::abs(r1 - r2) > 1e-10;
                ++cases;
            }
    return {mc_fail == 0 && dim_fail == 0, "cases=" + std::to_string(cases) + " max|z|=" + num(worst_z, 3) +
                                               " (beyond 3 SE: " + std::to_string(mc_fail) +
                                               "; with the plug-in SE: " + std::to_string(plugin_fail) +
                                               ") max|r_1d-r_2d|=" + num(worst_dim, 3)};
}

// ---------------------------------------------------------------- 4
Outcome pruning_monotone_grid() {
    int mono_fail = 0, small_fail = 0, large_fail = 0;
    double worst_small = 0.0, worst_large = 0.0;
    std::string small_at;
    for (double u : {0.0, 0.5, 1.0}) {
        for (double lambda : {1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 50.0}) {
            PruningParams p;
            p.lambda = lambda;
            p.u = u;
            for (std::size_t d = 2; d <= 8; ++d)
                for (std::size_t ds = 1; ds <= 8; ++ds) {
                    const double r = pruning_probability(d, ds, p);
                    if (d > 2 && pruning_probability(d - 1, ds, p) < r) ++mono_fail;
                    if (ds > 1 && pruning_probability(d, ds - 1, p) < r) ++mono_fail;
                    if (lambda == 1e-3) {
                        if (r >= 1e-4) ++small_fail;
                        if (r > worst_small) {
                            worst_small = r;
                            small_at = "(d=" + std::to_string(d) + ",d*=" + std::to_string(ds) + ",u=" + num(u) + ")";
                        }
                    }
                    if (lambda == 50.0) {
                        if (r >= 1e-4) ++large_fail;
                        worst_large = std::max(worst_large, r);
                    }
                }
        }
    }
    return {mono_fail == 0 && small_fail == 0 && large_fail == 0,
            "monotonicity violations=" + std::to_string(mono_fail) + "; lambda=1e-3: max r=" + num(worst_small, 4) +
                " at " + small_at + ", cells >= 1e-4: " + std::to_string(small_fail) +
                "; lambda=50: max r=" + num(worst_large, 4) + ", cells >= 1e-4: " + std::to_string(large_fail)};
}

// ---------------------------------------------------------------- 5
Outcome link_recursion() {
    const double p = 0.4;
    const double beta = -std::log1p(-p);
    const std::vector<double> grid{beta};
    const auto c = survival_curve(Model::Link, TreeSpec::regular(3), grid, 1.0, 8, 100000, 505);
    double q = 1.0;
    for (int k = 1; k < 8; ++k) q = 1.0 - std::pow(1.0 - p * q, 2);
    const double exact = 1.0 - std::pow(1.0 - p * q, 3);
    const double z = std::abs(c.estimates[0] - exact) / c.stderrs[0];
    return {z <= 3.0, "estimate=" + num(c.estimates[0]) + " exact=" + num(exact) + " SE=" + num(c.stderrs[0], 3) +
                          " |z|=" + num(z, 3)};
}

// ---------------------------------------------------------------- 6
Outcome domination() {
    std::vector<double> grid;
    for (int k = 0; k < 12; ++k) grid.push_back(0.1 + 0.9 * k / 11.0);
    const auto rows = domination_report(TreeSpec::regular(4), grid, 1.0, 8, 10000, 606);
    int violations = 0;
    double worst = -INFINITY;
    for (const auto& r : rows) {
        violations += r.violation;
        worst = std::max({worst, r.z_loop_delaylink, r.z_delaylink_link});
    }
    std::string curve;
    for (const auto& r : rows)
        curve += " " + num(r.beta, 3) + ":" + num(r.p_loop, 3) + "/" + num(r.p_delaylink, 3) + "/" + num(r.p_link, 3);
    return {violations == 0,
            "violations=" + std::to_string(violations) + " max z=" + num(worst, 3) + " beta:loop/delay/link" + curve};
}

// ---------------------------------------------------------------- 7
Outcome loop_threshold_example() {
    // The example's d-regular tree branches d times at every vertex.
    const auto spec = TreeSpec::galton_watson(OffspringLaw::deterministic(5));
    const double link_value = -std::log(4.0 / 5.0);
    const double d = 5.0;
    const double expansion = 1 / d + 1 / (d * d) + (11.0 / 12.0) / (d * d * d);
    const double expansion_err = 2 / (d * d * d * d);
    ThresholdOptions o;
    o.z = 3.0;
    o.tol = 1e-3;

    const auto main = threshold_bisection(Model::Loop, spec, 1.0, 12, 100000, 707, o);
    const auto link = threshold_bisection(Model::Link, spec, 1.0, 12, 100000, 707, o);
    const bool above = main.ci_lo >= link_value + 0.01;
    const bool below = main.ci_hi < 0.35;

    std::string seq;
    std::vector<double> hats;
    bool bracket_ok = true;
    for (int depth : {8, 12, 16, 20}) {
        const auto r = depth == 12 ? main : threshold_bisection(Model::Loop, spec, 1.0, depth, 20000, 707, o);
        hats.push_back(r.beta_hat);
        bracket_ok = bracket_ok && r.ci_lo < expansion + expansion_err;
        seq += " D=" + std::to_string(depth) + ":" + num(r.beta_hat, 4) + "[" + num(r.ci_lo, 4) + "," +
               num(r.ci_hi, 4) + "]";
    }
    bool increasing = true;
    for (std::size_t k = 1; k < hats.size(); ++k) increasing = increasing && hats[k] > hats[k - 1];
    const bool trend = increasing && bracket_ok;
    return {above && below && trend,
            "D=12 loop beta_hat=" + num(main.beta_hat, 4) + " 3SE bracket [" + num(main.ci_lo, 4) + "," +
                num(main.ci_hi, 4) + "] needs lo >= " + num(link_value + 0.01, 5) + (above ? " (ok)" : " (FAILS)") +
                ", hi < 0.35" + (below ? " (ok)" : " (FAILS)") + "; paired link beta_hat=" + num(link.beta_hat, 4) +
                " (gap " + num(main.beta_hat - link.beta_hat, 3) + "); expansion " + num(expansion, 5) + "+-" +
                num(expansion_err, 2) + "; loop proxy sequence" + seq +
                (trend ? " rises toward the expansion value" : " does not rise toward the expansion value")};
}

// ---------------------------------------------------------------- 8
Outcome poisson_identity() {
    const auto r = unilink_branching_criterion(OffspringLaw::poisson(4.0), 0.5, 1.0, 10, 100000, 808, default_threads());
    const bool identity = std::abs(r.identity_gap) <= 3 * r.identity_gap_std_error;
    const double factor = 0.5 * std::exp(-0.5) * 4.0;
    return {identity && r.supercritical,
            "mean C1=" + num(r.mean_C1) + " mean|gamma|*beta*e^-beta*lambda=" + num(r.mean_gamma * factor) +
                " gap=" + num(r.identity_gap, 3) + " SE=" + num(r.identity_gap_std_error, 3) +
                (r.supercritical ? " supercritical" : " NOT supercritical")};
}

// ---------------------------------------------------------------- 9
Outcome heavy_tail() {
    const GeneratingFunction heavy(OffspringLaw::power_law(1.3, 10000000));
    const std::vector<double> eps{1e-2, 1e-3, 1e-4};
    const auto h = theoremB_condition(heavy, eps);
    const GeneratingFunction pois(OffspringLaw::poisson(5.0));
    const std::vector<double> e4{1e-4};
    const auto p = theoremB_condition(pois, e4);
    const bool heavy_ok = h[0] && h[1] && h[2];
    std::string hs;
    for (bool b : h) hs += b ? "T" : "F";
    return {heavy_ok && !p[0], "powerlaw(1.3) at 1e-2,1e-3,1e-4: " + hs + "; poisson(5) at 1e-4: " +
                                   (p[0] ? "true" : "false")};
}

// ---------------------------------------------------------------- 10
Outcome h_expansion() {
    std::vector<double> ratios;
    for (double b : {0.1, 0.05, 0.025}) ratios.push_back(std::abs(h_of_beta(b) - (b / 2 - b * b / 12)) / (b * b * b));
    bool bounded = true, stable = true;
    for (std::size_t k = 0; k < ratios.size(); ++k) {
        bounded = bounded && ratios[k] <= 1.0;
        if (k > 0) stable = stable && ratios[k - 1] / ratios[k] <= 2.0 && ratios[k] / ratios[k - 1] <= 2.0;
    }
    return {bounded && stable, "|h-(b/2-b^2/12)|/b^3 at 0.1,0.05,0.025 = " + num(ratios[0], 5) + ", " +
                                   num(ratios[1], 5) + ", " + num(ratios[2], 5) + "; consecutive factors " +
                                   num(ratios[0] / ratios[1], 5) + ", " + num(ratios[1] / ratios[2], 5)};
}

// ---------------------------------------------------------------- 11
double kirchhoff(const RootedTree& tree, const Gauge& g, int depth) {
    std::vector<int> index(tree.size(), -1);
    int m = 0;
    for (std::size_t x = 1; x < tree.size(); ++x)
        if (tree.depth(static_cast<VertexId>(x)) < depth) index[x] = m++;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    for (std::size_t y = 1; y < tree.size(); ++y) {
        const auto v = static_cast<VertexId>(y);
        if (tree.depth(v) > depth) continue;
        const auto x = static_cast<std::size_t>(tree.parent(v));
        const double c = 1.0 / g.increment(v);
        const int iy = index[y], ix = index[x];
        if (iy >= 0) L(iy, iy) += c;
        if (ix >= 0) L(ix, ix) += c;
        if (iy >= 0 && ix >= 0) {
            L(iy, ix) -= c;
            L(ix, iy) -= c;
        }
        if (iy >= 0 && x == 0) b(iy) += c;
    }
    const Eigen::VectorXd phi = m > 0 ? Eigen::VectorXd(L.fullPivLu().solve(b)) : Eigen::VectorXd();
    double current = 0.0;
    for (VertexId y : tree.children(0)) {
        const auto j = static_cast<std::size_t>(y);
        current += (1.0 - (index[j] >= 0 ? phi(index[j]) : 0.0)) / g.increment(y);
    }
    return current;
}

Outcome conductance() {
    Rng rng(1111);
    int checked = 0;
    double worst = 0.0;
    while (checked < 100) {
        const auto t = generate_galton_watson(OffspringLaw::poisson(1.7), 5, rng);
        if (t.size() > 12 || t.max_depth() < 1) continue;
        std::vector<double> values(t.size(), 1.0);
        for (std::size_t x = 1; x < t.size(); ++x)
            values[x] = values[static_cast<std::size_t>(t.parent(static_cast<VertexId>(x)))] + 0.05 + uniform01(rng);
        const auto g = Gauge::from_values(t, values);
        const int depth = 1 + static_cast<int>(rng() % static_cast<unsigned>(t.max_depth()));
        const double sweep = effective_conductance(t, g, depth);
        worst = std::max(worst, std::abs(sweep - kirchhoff(t, g, depth)) / std::max(1.0, sweep));
        ++checked;
    }
    bool classify = true;
    std::string points;
    for (int d : {3, 4, 5}) {
        const int depth = d == 5 ? 8 : 10;
        const auto est = branching_number_estimate(generate_regular(d, depth), depth);
        const double off = std::abs(est.q_hat * (d - 1) - 1.0);
        classify = classify && off <= 1e-3;
        points += " d=" + std::to_string(d) + ":q*(d-1)=" + num(est.q_hat * (d - 1), 6);
    }
    return {worst <= 1e-10 && classify, "trees=100 max rel diff=" + num(worst, 3) + ";" + points};
}

// ---------------------------------------------------------------- 12
Outcome branching_probe() {
    const auto tree = generate_regular(4, 10);
    const auto r = theorem53_probe(tree, 3.0, 1.0, 10, 200, 1212);
    const bool pass = r.br_after_mean < r.br_before - 3 * r.std_error;
    return {pass, "br_before=" + num(r.br_before) + " br_after_mean=" + num(r.br_after_mean) +
                      " SE=" + num(r.std_error, 3) + " components=" + std::to_string(r.components) +
                      " attempts=" + std::to_string(r.attempts)};
}

// ---------------------------------------------------------------- 13
std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism() {
    if (cli_path.empty()) return {false, "no CLI path given"};
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("loopperc-accept-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::vector<std::pair<std::string, std::string>> commands{
        {"gen-tree", "gen-tree --tree gw:poisson:2 --depth 6"},
        {"survival", "survival --model loop --tree gw:poisson:3 --beta 0.2,0.4,0.8 --u 0.5 --depth 6 -N 2000"},
        {"threshold", "threshold --model link --tree regular:4 --depth 6 -N 2000 --tol 0.01"},
        {"dominate", "dominate --tree regular:4 --beta 0.3,0.6 --depth 5 -N 2000"},
        {"prune-prob", "prune-prob --d 2,3 --d-star 1,2 --lambda 0.5,1 --u 0,1 --mc-samples 2000"},
        {"gwt-check", "gwt-check --law poisson:3 --beta 0.1,0.5,1 --eps 0.01,0.0001"},
        {"conductance", "conductance --tree gw:poisson:2.5 --depth 6 --q 0.3,0.5,0.7"},
        {"probe-53", "probe-53 --tree regular:3 --lambda 3 --depth 6 -N 10"},
        {"unilink", "unilink --law poisson:3 --beta 0.5 --depth 6 -N 2000"},
    };
    int failures = 0;
    std::string detail;
    for (const auto& [name, args] : commands) {
        std::vector<std::string> outputs;
        int status = 0;
        for (int threads : {1, 3, 1}) {
            const fs::path out = dir / (name + "-" + std::to_string(outputs.size()) + ".csv");
            const std::string cmd = "\"" + cli_path + "\" --seed 42 --threads " + std::to_string(threads) +
                                    " --out \"" + out.string() + "\" " + args + " 2>/dev/null";
            status |= std::system(cmd.c_str());
            outputs.push_back(slurp(out));
        }
        const bool same = status == 0 && !outputs[0].empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2];
        failures += !same;
        detail += " " + name + (same ? ":same" : ":DIFFERENT");
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    return {failures == 0, "commands=" + std::to_string(commands.size()) + detail};
}

struct Criterion {
    const char* slug;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::map<int, Criterion> criteria{
        {1, {"loop_partition", "loop partition invariant", 60, loop_partition}},
        {2, {"hand_traces", "hand-traced loop oracles", 60, hand_traces}},
        {3, {"pruning_cross_check", "pruning formula cross-check", 300, pruning_cross_check}},
        {4, {"pruning_grid", "pruning monotonicity and limits", 60, pruning_monotone_grid}},
        {5, {"link_recursion", "link recursion oracle", 60, link_recursion}},
        {6, {"domination", "domination chain", 600, domination}},
        {7, {"loop_threshold", "d=5 loop threshold proxy", 1800, loop_threshold_example}},
        {8, {"unilink_identity", "Poisson uni-link identity", 600, poisson_identity}},
        {9, {"heavy_tail_criterion", "heavy-tail offspring criterion", 60, heavy_tail}},
        {10, {"h_expansion", "h expansion", 60, h_expansion}},
        {11, {"conductance", "conductance sweep and classification", 60, conductance}},
        {12, {"branching_probe", "branching number probe", 600, branching_probe}},
        {13, {"cli_determinism", "CLI determinism", 300, cli_determinism}},
    };
    std::vector<int> ids;
    const std::string which = argc >= 2 ? argv[1] : "all";
    for (const auto& [id, c] : criteria)
        if (which == "all" || which == c.slug) ids.push_back(id);
    if (ids.empty()) {
        std::cerr << "unknown criterion '" << which << "'\n";
        return 2;
    }
    if (argc >= 3) cli_path = argv[2];

    bool all = true;
    for (int id : ids) {
        const auto& c = criteria.at(id);
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.limit_seconds;
        const bool pass = o.pass && in_time;
        std::cout << (pass ? "PASS " : "FAIL ") << c.slug << " (" << c.name << "): " << o.detail << " (" << num(secs, 3) << " s, limit " << c.limit_seconds << " s"
                  << (in_time ? "" : ", OVER LIMIT") << ")" << std::endl;
        all = all && pass;
    }
    return all ? 0 : 1;
}
