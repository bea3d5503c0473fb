#include "loopperc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>

#include "loopperc/errors.hpp"
#include "loopperc/percolation.hpp"

namespace loopperc {

namespace {

constexpr double kMinBeta = 1e-6;
constexpr double kMaxBeta = 20.0;
constexpr double kScanRatio = 1.25;
constexpr std::uint64_t kQuenchedSalt = 0x7175656e63686564ULL;

std::string fmt(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double pruning_r(double lambda, double u, std::size_t d, std::optional<std::size_t> ds) {
    if (!ds) return 0.0;
    thread_local std::map<std::tuple<double, double, std::size_t, std::size_t>, double> cache;
    const auto key = std::make_tuple(lambda, u, d, *ds);
    if (const auto it = cache.find(key); it != cache.end()) return it->second;
    PruningParams p;
    p.lambda = lambda;
    p.u = u;
    const double r = pruning_probability(d, ds, p);
    if (cache.size() > 4096) cache.clear();
    cache.emplace(key, r);
    return r;
}

std::size_t retained_children(LazyWorld& w, VertexId v, std::vector<VertexId>* out = nullptr) {
    std::size_t n = 0;
    const auto kids = w.children(v);
    const std::vector<VertexId> copy(kids.begin(), kids.end());
    for (VertexId c : copy)
        if (w.retained(c)) {
            ++n;
            if (out) out->push_back(c);
        }
    return n;
}

void validate_run(double u, int depth, std::size_t replicas, const TreeSpec& spec) {
    if (!(u >= 0.0 && u <= 1.0)) throw InvalidParameter("u must lie in [0,1]");
    if (depth < 0) throw InvalidParameter("D must be >= 0");
    if (replicas < 1000) throw InvalidParameter("N must be >= 1000");
    if (const auto top = spec.max_depth(); top && *top < depth)
        throw InvalidParameter("D exceeds the depth of the tree");
}

std::vector<double> clipped_grid(std::span<const double> grid) {
    if (grid.empty()) throw InvalidParameter("beta grid is empty");
    std::vector<double> out;
    for (double b : grid) {
        if (!std::isfinite(b) || b < 0.0) throw InvalidParameter("beta grid values must be finite and >= 0");
        out.push_back(std::max(b, kMinBeta));
    }
    if (!std::is_sorted(out.begin(), out.end())) throw InvalidParameter("beta grid must be sorted");
    return out;
}

std::size_t count_hits(Model model, const TreeSpec& spec, double beta, double u, int depth, std::size_t replicas,
                       std::uint64_t seed, unsigned threads) {
    std::vector<char> hit(replicas, 0);
    parallel_for(replicas, threads, [&](std::size_t i) {
        auto w = replica_world(spec, seed, i, beta, u, depth);
        hit[i] = reaches(model, w) ? 1 : 0;
    });
    return static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
}

double binomial_se(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

} // namespace

std::string to_string(Model m) {
    switch (m) {
    case Model::Loop: return "loop";
    case Model::Link: return "link";
    case Model::LinkDelay: return "delaylink";
    }
    return "?";
}

Model parse_model(std::string_view text) {
    if (text == "loop") return Model::Loop;
    if (text == "link") return Model::Link;
    if (text == "delaylink") return Model::LinkDelay;
    throw InvalidParameter("unknown model '" + std::string(text) + "' (loop, link, delaylink)");
}

LazyWorld replica_world(const TreeSpec& spec, std::uint64_t seed, std::uint64_t replica, double beta, double u,
                        int depth) {
    const std::uint64_t key = derive_key(seed, replica);
    std::uint64_t tree_key = derive_key(key, 0);
    if (const auto* law = std::get_if<TreeSpec::Law>(&spec.variant()); law && law->quenched)
        tree_key = derive_key(seed, kQuenchedSalt);
    return LazyWorld(spec, tree_key, derive_key(key, 1), beta, u, depth);
}

bool loop_reaches(LazyWorld& w) {
    const int target = w.cut_depth();
    if (target == 0) return true;
    const auto ev = w.events(w.root());
    if (ev.empty()) return false;
    if (ev.front().time == 0.0) throw DegenerateStart("a link sits at the start time of the root loop");
    const ArcPos start{w.root(), ev.size() - 1, Direction::Up};
    return !walk_loop(w, start, [&](const ArcPos& p) { return w.depth(p.vertex) < target; });
}

bool link_reaches(LazyWorld& w) {
    const int target = w.cut_depth();
    if (target == 0) return true;
    std::vector<VertexId> stack{w.root()};
    std::vector<VertexId> kids;
    while (!stack.empty()) {
        const VertexId v = stack.back();
        stack.pop_back();
        kids.clear();
        retained_children(w, v, &kids);
        for (VertexId c : kids) {
            if (w.depth(c) >= target) return true;
            stack.push_back(c);
        }
    }
    return false;
}

bool link_delay_reaches(LazyWorld& w) {
    const int target = w.cut_depth();
    std::vector<VertexId> stack{w.root()};
    std::vector<VertexId> kids;
    while (!stack.empty()) {
        const VertexId v = stack.back();
        stack.pop_back();
        if (w.depth(v) >= target) return true;
        kids.clear();
        retained_children(w, v, &kids);
        if (w.depth(v) % 3 == 1 && !kids.empty()) {
            std::size_t ds = std::numeric_limits<std::size_t>::max();
            for (VertexId c : kids) ds = std::min(ds, 1 + retained_children(w, c));
            const double r = pruning_r(w.beta(), w.u(), 1 + kids.size(), ds);
            if (w.vertex_uniform(v) < r) continue;
        }
        for (VertexId c : kids) stack.push_back(c);
    }
    return false;
}

bool reaches(Model m, LazyWorld& w) {
    switch (m) {
    case Model::Loop: return loop_reaches(w);
    case Model::Link: return link_reaches(w);
    case Model::LinkDelay: return link_delay_reaches(w);
    }
    return false;
}

SurvivalCurve survival_curve(Model model, const TreeSpec& spec, std::span<const double> beta_grid, double u,
                             int depth, std::size_t replicas, std::uint64_t seed, unsigned threads) {
    validate_run(u, depth, replicas, spec);
    const auto grid = clipped_grid(beta_grid);
    const std::size_t g = grid.size();
    std::vector<char> hit(replicas * g, 0);
    parallel_for(replicas, threads, [&](std::size_t i) {
        for (std::size_t k = 0; k < g; ++k) {
            auto w = replica_world(spec, seed, i, grid[k], u, depth);
            hit[i * g + k] = reaches(model, w) ? 1 : 0;
        }
    });
    SurvivalCurve c{model, grid, depth, replicas, {}, {}, spec.describe(), u, seed};
    for (std::size_t k = 0; k < g; ++k) {
        std::size_t n = 0;
        for (std::size_t i = 0; i < replicas; ++i) n += static_cast<std::size_t>(hit[i * g + k]);
        const double p = static_cast<double>(n) / static_cast<double>(replicas);
        c.estimates.push_back(p);
        c.stderrs.push_back(binomial_se(p, replicas));
    }
    return c;
}

void write_survival_csv(std::ostream& out, const SurvivalCurve& c) {
    out << "model,beta,u,D,N,estimate,stderr\n";
    for (std::size_t k = 0; k < c.beta_grid.size(); ++k)
        out << to_string(c.model) << ',' << fmt(c.beta_grid[k]) << ',' << fmt(c.u) << ',' << c.depth << ','
            << c.replicas << ',' << fmt(c.estimates[k]) << ',' << fmt(c.stderrs[k]) << '\n';
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) throw InvalidParameter("Wilson interval needs at least one trial");
    if (successes > trials) throw InvalidParameter("more successes than trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

ThresholdResult threshold_bisection(Model model, const TreeSpec& spec, double u, int depth, std::size_t replicas,
                                    std::uint64_t seed, const ThresholdOptions& opt) {
    validate_run(u, depth, replicas, spec);
    if (!(opt.target > 0.0 && opt.target < 1.0)) throw InvalidParameter("target must lie in (0,1)");
    if (!(opt.tol > 0.0)) throw InvalidParameter("tol must be > 0");
    if (!(opt.z > 0.0)) throw InvalidParameter("z must be > 0");

    ThresholdResult r{model, u, depth, replicas, opt.target, 0.0, 0.0, 0.0, seed, {}};
    const auto n = static_cast<double>(replicas);
    const auto eval = [&](double beta) {
        const std::size_t h = count_hits(model, spec, beta, u, depth, replicas, seed, opt.threads);
        r.evaluations.push_back({beta, h});
        return static_cast<double>(h) / n;
    };

    std::vector<double> scan_beta, scan_p;
    bool found = false;
    for (double b = kMinBeta;; b *= kScanRatio) {
        b = std::min(b, kMaxBeta);
        scan_beta.push_back(b);
        scan_p.push_back(eval(b));
        if (scan_p.back() >= opt.target) {
            found = true;
            break;
        }
        if (b >= kMaxBeta) break;
    }
    if (!found)
        throw NoTransition("survival stays below " + fmt(opt.target) + " on (1e-6, 20) for " + to_string(model) +
                           " at D=" + std::to_string(depth));
    for (std::size_t k = 0; k + 1 < scan_p.size(); ++k) {
        const double drop = scan_p[k] - scan_p[k + 1];
        const double se = std::hypot(binomial_se(scan_p[k], replicas), binomial_se(scan_p[k + 1], replicas));
        if (drop > opt.monotone_se * se && drop > 0.0) {
            std::string curve;
            for (std::size_t j = 0; j < scan_p.size(); ++j) curve += " " + fmt(scan_beta[j]) + ":" + fmt(scan_p[j]);
            throw NonMonotone("survival decreases between beta=" + fmt(scan_beta[k]) + " and " +
                              fmt(scan_beta[k + 1]) + "; scan:" + curve);
        }
    }

    double hi = scan_beta.back();
    double lo = scan_beta.size() > 1 ? scan_beta[scan_beta.size() - 2] : 0.0;
    while (hi - lo > opt.tol) {
        const double mid = 0.5 * (lo + hi);
        (eval(mid) >= opt.target ? hi : lo) = mid;
    }
    r.beta_hat = 0.5 * (lo + hi);

    r.ci_lo = 0.0;
    r.ci_hi = std::numeric_limits<double>::infinity();
    for (const auto& e : r.evaluations) {
        const auto w = wilson_interval(e.hits, replicas, opt.z);
        if (w.hi < opt.target) r.ci_lo = std::max(r.ci_lo, e.beta);
        if (w.lo > opt.target) r.ci_hi = std::min(r.ci_hi, e.beta);
    }
    return r;
}

void write_threshold_header(std::ostream& out) { out << "model,u,D,target,beta_hat,ci_lo,ci_hi,seed\n"; }

void write_threshold_row(std::ostream& out, const ThresholdResult& r) {
    out << to_string(r.model) << ',' << fmt(r.u) << ',' << r.depth << ',' << fmt(r.target) << ',' << fmt(r.beta_hat)
        << ',' << fmt(r.ci_lo) << ',' << fmt(r.ci_hi) << ',' << r.seed << '\n';
}

std::vector<DominationRow> domination_report(const TreeSpec& spec, std::span<const double> beta_grid, double u,
                                             int depth, std::size_t replicas, std::uint64_t seed, unsigned threads,
                                             double z_limit) {
    validate_run(u, depth, replicas, spec);
    const auto grid = clipped_grid(beta_grid);
    const std::size_t g = grid.size();
    // Three bits per (replica, beta): loop, delaylink, link.
    std::vector<unsigned char> bits(replicas * g, 0);
    parallel_for(replicas, threads, [&](std::size_t i) {
        for (std::size_t k = 0; k < g; ++k) {
            auto w = replica_world(spec, seed, i, grid[k], u, depth);
            unsigned char b = 0;
            if (loop_reaches(w)) b |= 1;
            if (link_delay_reaches(w)) b |= 2;
            if (link_reaches(w)) b |= 4;
            bits[i * g + k] = b;
        }
    });

    const double n = static_cast<double>(replicas);
    const auto paired_z = [&](std::size_t k, unsigned char a, unsigned char b) {
        double s = 0, s2 = 0;
        for (std::size_t i = 0; i < replicas; ++i) {
            const double d = ((bits[i * g + k] & a) ? 1.0 : 0.0) - ((bits[i * g + k] & b) ? 1.0 : 0.0);
            s += d;
            s2 += d * d;
        }
        const double mean = s / n;
        const double var = std::max(0.0, s2 / n - mean * mean);
        const double se = std::sqrt(var / (n - 1));
        if (se == 0.0) return mean > 0 ? std::numeric_limits<double>::infinity() : 0.0;
        return mean / se;
    };

    std::vector<DominationRow> rows;
    for (std::size_t k = 0; k < g; ++k) {
        std::size_t c[3] = {0, 0, 0};
        for (std::size_t i = 0; i < replicas; ++i)
            for (int m = 0; m < 3; ++m) c[m] += (bits[i * g + k] >> m) & 1u;
        DominationRow row{grid[k],
                          static_cast<double>(c[0]) / n,
                          static_cast<double>(c[1]) / n,
                          static_cast<double>(c[2]) / n,
                          paired_z(k, 1, 2),
                          paired_z(k, 2, 4),
                          false};
        row.violation = row.z_loop_delaylink > z_limit || row.z_delaylink_link > z_limit;
        rows.push_back(row);
    }
    return rows;
}

void write_domination_csv(std::ostream& out, const TreeSpec& spec, double u, int depth, std::size_t replicas,
                          std::span<const DominationRow> rows) {
    out << "tree,beta,u,D,N,p_loop,p_delaylink,p_link,z_loop_delaylink,z_delaylink_link,violation\n";
    for (const auto& r : rows)
        out << '"' << spec.describe() << "\"," << fmt(r.beta) << ',' << fmt(u) << ',' << depth << ',' << replicas
            << ',' << fmt(r.p_loop) << ',' << fmt(r.p_delaylink) << ',' << fmt(r.p_link) << ','
            << fmt(r.z_loop_delaylink) << ',' << fmt(r.z_delaylink_link) << ',' << (r.violation ? 1 : 0) << '\n';
}

} // namespace loopperc
