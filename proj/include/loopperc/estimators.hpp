#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loopperc/parallel.hpp"
#include "loopperc/world.hpp"

namespace loopperc {

enum class Model { Loop, Link, LinkDelay };

std::string to_string(Model m);
Model parse_model(std::string_view text);

// World of replica `replica` in a run seeded with `seed`. Worlds of the same
// replica at different beta share their random numbers.
LazyWorld replica_world(const TreeSpec& spec, std::uint64_t seed, std::uint64_t replica, double beta, double u,
                        int depth);

// Depth-D reach events, evaluated on the world's cut depth.
bool loop_reaches(LazyWorld& world);
bool link_reaches(LazyWorld& world);
// Link cluster thinned by delayed pruning with lambda = beta.
bool link_delay_reaches(LazyWorld& world);
bool reaches(Model m, LazyWorld& world);

struct SurvivalCurve {
    Model model;
    std::vector<double> beta_grid;
    int depth;
    std::size_t replicas;
    std::vector<double> estimates;
    std::vector<double> stderrs;
    std::string tree;
    double u;
    std::uint64_t seed;
};

// Grid values below 1e-6 are raised to 1e-6.
SurvivalCurve survival_curve(Model model, const TreeSpec& spec, std::span<const double> beta_grid, double u,
                             int depth, std::size_t replicas, std::uint64_t seed,
                             unsigned threads = default_threads());

void write_survival_csv(std::ostream& out, const SurvivalCurve& curve);

struct Interval {
    double lo;
    double hi;
};

Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

struct ThresholdOptions {
    double target = 0.05;
    double tol = 1e-3;
    // Width of the Wilson bounds, and the SE multiple of the monotonicity check.
    double z = 1.96;
    double monotone_se = 3.0;
    unsigned threads = default_threads();
};

struct ThresholdPoint {
    double beta;
    std::size_t hits;
};

struct ThresholdResult {
    Model model;
    double u;
    int depth;
    std::size_t replicas;
    double target;
    double beta_hat;
    // Largest evaluated beta whose survival is below target and smallest
    // one above it, at the Wilson bound of width z.
    double ci_lo;
    double ci_hi;
    std::uint64_t seed;
    std::vector<ThresholdPoint> evaluations;
};

// Coarse geometric scan of (1e-6, 20) up to the first beta with survival at
// least `target`, then bisection of that bracket down to `tol`.
ThresholdResult threshold_bisection(Model model, const TreeSpec& spec, double u, int depth, std::size_t replicas,
                                    std::uint64_t seed, const ThresholdOptions& options = {});

void write_threshold_header(std::ostream& out);
void write_threshold_row(std::ostream& out, const ThresholdResult& r);

struct DominationRow {
    double beta;
    double p_loop;
    double p_delaylink;
    double p_link;
    // Paired z-statistics of p_loop - p_delaylink and p_delaylink - p_link;
    // positive values point against the ordering.
    double z_loop_delaylink;
    double z_delaylink_link;
    bool violation;
};

std::vector<DominationRow> domination_report(const TreeSpec& spec, std::span<const double> beta_grid, double u,
                                             int depth, std::size_t replicas, std::uint64_t seed,
                                             unsigned threads = default_threads(), double z_limit = 3.0);

void write_domination_csv(std::ostream& out, const TreeSpec& spec, double u, int depth, std::size_t replicas,
                          std::span<const DominationRow> rows);

} // namespace loopperc
