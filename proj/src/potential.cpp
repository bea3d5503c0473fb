#include "loopperc/potential.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "loopperc/errors.hpp"
#include "loopperc/links.hpp"
#include "loopperc/percolation.hpp"

namespace loopperc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

Gauge Gauge::from_values(const RootedTree& tree, std::vector<double> values) {
    if (values.size() != tree.size()) throw InvalidParameter("gauge needs one value per vertex");
    if (values[0] != 1.0) throw InvalidParameter("gauge must equal 1 at the root");
    Gauge g;
    g.increments_.assign(values.size(), 0.0);
    for (std::size_t x = 1; x < values.size(); ++x) {
        const double inc = values[x] - values[static_cast<std::size_t>(tree.parent(static_cast<VertexId>(x)))];
        if (!(inc >= 0.0)) throw InvalidParameter("gauge decreases along the edge to vertex " + std::to_string(x));
        g.increments_[x] = inc;
    }
    g.values_ = std::move(values);
    return g;
}

Gauge Gauge::exponential(const RootedTree& tree, double q) {
    if (!(q > 0.0 && q <= 1.0)) throw InvalidParameter("exponential gauge needs q in (0,1]");
    return gauge_from_percolation(tree, q);
}

Gauge gauge_from_percolation(const RootedTree& tree, std::span<const double> p) {
    if (p.size() != tree.size()) throw InvalidParameter("percolation gauge needs one p per vertex");
    std::vector<double> values(tree.size(), 1.0);
    for (std::size_t x = 1; x < tree.size(); ++x) {
        if (!(p[x] > 0.0 && p[x] <= 1.0)) throw InvalidParameter("percolation parameters must lie in (0,1]");
        values[x] = values[static_cast<std::size_t>(tree.parent(static_cast<VertexId>(x)))] / p[x];
    }
    return Gauge::from_values(tree, std::move(values));
}

Gauge gauge_from_percolation(const RootedTree& tree, double p) {
    return gauge_from_percolation(tree, std::vector<double>(tree.size(), p));
}

double effective_conductance(const RootedTree& tree, const Gauge& gauge, int depth) {
    if (gauge.size() != tree.size()) throw InvalidParameter("gauge does not match the tree");
    if (depth < 0 || depth > tree.max_depth()) throw InvalidParameter("depth outside the tree");
    if (depth == 0) return kInf;
    // Breadth-first ids: children always follow their parent, so one
    // reverse pass is a leaf-to-root sweep. 1/0 and 1/inf follow IEEE rules,
    // which gives the shorted boundary and perfect conductors for free.
    std::size_t end = tree.size();
    const auto depths = tree.depths();
    while (end > 0 && depths[end - 1] > depth) --end;
    std::vector<double> c(end, 0.0);
    for (std::size_t x = end; x-- > 0;) {
        const auto v = static_cast<VertexId>(x);
        if (depths[x] == depth) {
            c[x] = kInf;
            continue;
        }
        double sum = 0.0;
        for (VertexId y : tree.children(v)) {
            const auto j = static_cast<std::size_t>(y);
            sum += 1.0 / (gauge.increment(y) + 1.0 / c[j]);
        }
        c[x] = sum;
    }
    return c[0];
}

namespace {

// Root-to-depth-k conductances for k = first..depth under q^-|x|, in one
// sweep per k.
std::vector<double> resistances(const RootedTree& tree, const Gauge& g, int first, int depth) {
    std::vector<double> r;
    for (int k = first; k <= depth; ++k) r.push_back(1.0 / effective_conductance(tree, g, k));
    return r;
}

int fit_start(int depth) { return depth - depth / 2 + 1; }

} // namespace

double resistance_increment_slope(const RootedTree& tree, double q, int depth) {
    if (depth < 4) throw InvalidParameter("branching estimate needs depth >= 4");
    if (depth > tree.max_depth()) throw InvalidParameter("tree does not reach the requested depth");
    const Gauge g = Gauge::exponential(tree, q);
    const int first = fit_start(depth);
    const auto r = resistances(tree, g, first - 1, depth);
    std::vector<double> xs, ys;
    for (std::size_t i = 1; i < r.size(); ++i) {
        const double inc = r[i] - r[i - 1];
        if (!(inc > 1e-12 * r[i])) return kInf;
        xs.push_back(static_cast<double>(first) + static_cast<double>(i - 1));
        ys.push_back(std::log(inc));
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

BranchingEstimate branching_number_estimate(const RootedTree& tree, int depth, const BranchingOptions& options) {
    if (!(options.q_tolerance > 0.0)) throw InvalidParameter("q_tolerance must be > 0");
    if (options.scan_points < 4) throw InvalidParameter("scan needs at least 4 points");
    const auto decays = [&](double q) {
        const double s = resistance_increment_slope(tree, q, depth);
        return s != kInf && s >= -options.delta;
    };
    const double q_min = 0.01, q_max = 0.999;
    std::vector<double> grid;
    std::vector<bool> cls;
    for (int i = 0; i < options.scan_points; ++i) {
        const double q = q_min + (q_max - q_min) * i / (options.scan_points - 1);
        grid.push_back(q);
        cls.push_back(decays(q));
    }
    std::size_t switches = 0;
    for (std::size_t i = 1; i < cls.size(); ++i) switches += cls[i] != cls[i - 1];
    if (switches > 1 || (switches == 1 && !cls.front()))
        throw NonMonotone("decay classification is not monotone in q over the scan grid");

    BranchingEstimate est{0.0, 0.0, depth, fit_start(depth), options.delta};
    if (cls.back()) {
        // Decay everywhere: the boundary is at q = 1.
        est.q_hat = 1.0;
        est.br = 1.0;
        return est;
    }
    double lo, hi;
    if (!cls.front()) {
        lo = 0.0;
        hi = q_min;
    } else {
        std::size_t i = 0;
        while (cls[i + 1]) ++i;
        lo = grid[i];
        hi = grid[i + 1];
    }
    while (hi - lo > options.q_tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= 0.0) break;
        (decays(mid) ? lo : hi) = mid;
    }
    est.q_hat = 0.5 * (lo + hi);
    est.br = 1.0 / est.q_hat;
    return est;
}

ProbeResult percolation_probe(const RootedTree& tree, int depth, std::size_t n,
                              const std::function<RootedTree(std::size_t)>& component,
                              const BranchingOptions& options) {
    if (n == 0) throw InvalidParameter("probe needs at least one component");
    ProbeResult res{branching_number_estimate(tree, depth, options).br, 0.0, 0.0, 0, 0};
    std::vector<double> values;
    for (std::size_t attempt = 0; res.components < n && attempt < 20 * n; ++attempt) {
        ++res.attempts;
        const RootedTree comp = component(attempt);
        if (comp.max_depth() < depth) continue;
        values.push_back(branching_number_estimate(comp, depth, options).br);
        ++res.components;
    }
    if (res.components == 0) throw DegenerateSample("no percolated component reached the probe depth");
    const double k = static_cast<double>(res.components);
    double sum = 0.0, ss = 0.0;
    for (double v : values) sum += v;
    res.br_after_mean = sum / k;
    for (double v : values) ss += (v - res.br_after_mean) * (v - res.br_after_mean);
    res.std_error = k > 1 ? std::sqrt(ss / (k - 1) / k) : 0.0;
    return res;
}

ProbeResult theorem53_probe(const RootedTree& tree, double lambda, double u, int depth, std::size_t n,
                            std::uint64_t seed, const BranchingOptions& options) {
    const PruningParams params{lambda, u, 256};
    params.validate();
    return percolation_probe(tree, depth, n, [&](std::size_t i) {
        Rng rng = replica_rng(seed, i);
        const auto config = sample_links(tree, lambda, u, rng);
        const auto cluster = link_cluster(tree, config);
        return root_component(cluster, delayed_pruning_mask(cluster, params, rng));
    }, options);
}

void write_conductance_csv(std::ostream& out, std::span<const double> qs, std::span<const int> depths,
                           const RootedTree& tree) {
    out << "q,D,conductance\n";
    char buf[96];
    for (double q : qs) {
        const Gauge g = Gauge::exponential(tree, q);
        for (int d : depths) {
            std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", q, d, effective_conductance(tree, g, d));
            out << buf;
        }
    }
}

} // namespace loopperc
