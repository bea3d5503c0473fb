#include "doctest.h"

#include <cmath>

#include "loopperc/errors.hpp"
#include "loopperc/gwt.hpp"
#include "loopperc/multilink.hpp"

using namespace loopperc;

namespace {

Link cross(double t) { return {t, LinkKind::Cross}; }

} // namespace

TEST_SUITE("multilink_analysis") {

TEST_CASE("cluster shapes") {
    const auto chain = RootedTree::from_child_counts(std::vector<std::int64_t>{1, 1, 0});
    const auto single = LinkConfiguration::from_edges({{}, {cross(0.3)}, {cross(0.6)}}, 1.0, 1.0);
    auto c = multi_link_cluster(chain, single, 0);
    CHECK(c.member_vertices == std::vector<VertexId>{0});
    CHECK(c.member_edges.empty());
    const auto doubled =
        LinkConfiguration::from_edges({{}, {cross(0.2), cross(0.7)}, {cross(0.1), cross(0.5)}}, 1.0, 1.0);
    c = multi_link_cluster(chain, doubled, 0);
    CHECK(c.member_vertices == std::vector<VertexId>{0, 1, 2});
    CHECK(multi_link_cluster(chain, doubled, 1).member_vertices == std::vector<VertexId>{1, 2});
    CHECK_THROWS_AS(multi_link_cluster(chain, doubled, 5), LookupError);
}

TEST_CASE("multi-link loops") {
    const auto chain = RootedTree::from_child_counts(std::vector<std::int64_t>{1, 1, 0});
    const auto single = LinkConfiguration::from_edges({{}, {cross(0.3)}, {}}, 1.0, 1.0);
    CHECK(multi_link_loop(chain, single, 0).length == 1.0);
    const auto two = LinkConfiguration::from_edges({{}, {cross(0.3), cross(0.8)}, {cross(0.5)}}, 1.0, 1.0);
    const auto g = multi_link_loop(chain, two, 0);
    CHECK(g.length == doctest::Approx(1.0));
    CHECK(g.visited_vertices == std::vector<VertexId>{0, 1});

    Rng rng(4);
    for (int i = 0; i < 500; ++i) {
        const auto t = generate_galton_watson(OffspringLaw::poisson(3.0), 5, rng);
        const auto conf = sample_links(t, 2.0, 1.0, rng);
        const double len = multi_link_loop(t, conf, 0).length;
        CHECK(std::abs(len - std::round(len)) < 1e-9);
        CHECK(len >= 1.0 - 1e-9);
    }
}

TEST_CASE("incident uni-links") {
    const auto star = generate_regular(4, 1);
    const auto none = LinkConfiguration(star.size(), 1.0, 1.0);
    auto c = multi_link_cluster(star, none, 0);
    CHECK(count_incident_unilinks(star, none, multi_link_loop(star, none, 0), c) == 0);
    const auto ones = LinkConfiguration::from_edges({{}, {cross(0.1)}, {cross(0.4)}, {cross(0.6)}, {}}, 1.0, 1.0);
    c = multi_link_cluster(star, ones, 0);
    CHECK(count_incident_unilinks(star, ones, multi_link_loop(star, ones, 0), c) == 3);
    // Root with a two-cross edge: the loop of the root occupies it on the
    // outer arc only, so a uni-link inside the inner arc is not incident.
    const auto mixed =
        LinkConfiguration::from_edges({{}, {cross(0.2), cross(0.5)}, {cross(0.3)}, {cross(0.9)}, {}}, 1.0, 1.0);
    c = multi_link_cluster(star, mixed, 0);
    CHECK(count_incident_unilinks(star, mixed, multi_link_loop(star, mixed, 0), c) == 1);
}

TEST_CASE("cluster size follows the thinned branching process") {
    const double lambda = 4.0, beta = 0.5;
    const int depth = 4;
    const double m = lambda * (1 - (1 + beta) * std::exp(-beta));
    double oracle = 0.0;
    for (int k = 0; k <= depth; ++k) oracle += std::pow(m, k);
    const auto law = OffspringLaw::poisson(lambda);
    const int n = 20000;
    double sum = 0.0, sq = 0.0;
    Rng rng(55);
    for (int i = 0; i < n; ++i) {
        const auto t = generate_galton_watson(law, depth, rng);
        const auto conf = sample_links(t, beta, 1.0, rng);
        const double s = static_cast<double>(multi_link_cluster(t, conf, 0).member_vertices.size());
        sum += s;
        sq += s * s;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - oracle) < 3 * std::sqrt((sq / n - mean * mean) / n));
}

TEST_CASE("lazy neighbourhood agrees with full trees") {
    // Same statistics of C1 from full trees and from the lazily grown
    // neighbourhood of the cluster.
    const auto law = OffspringLaw::poisson(3.0);
    const double beta = 0.8;
    const int depth = 5, n = 20000;
    Rng rng(8);
    double full = 0.0, full_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto t = generate_galton_watson(law, depth, rng);
        const auto conf = sample_links(t, beta, 1.0, rng);
        const auto cl = multi_link_cluster(t, conf, 0);
        const double c1 = static_cast<double>(count_incident_unilinks(t, conf, multi_link_loop(t, conf, 0), cl));
        full += c1;
        full_sq += c1 * c1;
    }
    const auto lazy = unilink_branching_criterion(law, beta, 1.0, depth, n, 77);
    const double fm = full / n;
    const double fse = std::sqrt((full_sq / n - fm * fm) / n);
    CHECK(std::abs(fm - lazy.mean_C1) < 3 * std::hypot(fse, lazy.std_error));
}

TEST_CASE("Poisson identity and criterion") {
    const auto r = unilink_branching_criterion(OffspringLaw::poisson(4.0), 0.5, 1.0, 10, 100000, 2024, 4);
    CHECK(std::abs(r.identity_gap) < 3 * r.identity_gap_std_error);
    CHECK(r.supercritical);
    CHECK(r.mean_gamma >= 1.0);
    const auto tiny = unilink_branching_criterion(OffspringLaw::poisson(4.0), 1e-6, 1.0, 10, 1000, 1);
    CHECK(tiny.mean_C1 < 0.01);
    CHECK_FALSE(tiny.supercritical);
    for (double beta = 0.1; beta < 10; beta += 0.1) CHECK_FALSE(poisson_sufficient(beta, 2.0));
    const auto sub = unilink_branching_criterion(OffspringLaw::poisson(2.0), 1.0, 1.0, 8, 5000, 3);
    CHECK(sub.mean_C1 >= 0.0);
    CHECK_THROWS_AS(unilink_branching_criterion(OffspringLaw::poisson(2.0), 1.0, 1.0, 8, 10, 3), InvalidParameter);
}

TEST_CASE("thread count does not change the estimate") {
    const auto a = unilink_branching_criterion(OffspringLaw::poisson(3.0), 0.7, 0.5, 6, 3000, 9, 1);
    const auto b = unilink_branching_criterion(OffspringLaw::poisson(3.0), 0.7, 0.5, 6, 3000, 9, 3);
    CHECK(a.mean_C1 == b.mean_C1);
    CHECK(a.mean_gamma == b.mean_gamma);
}

TEST_CASE("cluster size is uncorrelated with the root's uni-link count") {
    const int n = 20000;
    Rng rng(6);
    std::vector<double> xs, ys;
    for (int i = 0; i < n; ++i) {
        const auto s = sample_unilink_neighbourhood(OffspringLaw::poisson(4.0), 0.6, 1.0, 6, rng);
        const auto cl = multi_link_cluster(s.tree, s.config, 0);
        double uni = 0;
        for (VertexId w : s.tree.children(0)) uni += s.config.count(w) == 1;
        xs.push_back(static_cast<double>(cl.member_vertices.size()) - 1.0 -
                     static_cast<double>(std::count_if(s.tree.children(0).begin(), s.tree.children(0).end(),
                                                       [&](VertexId w) { return s.config.count(w) >= 2; })));
        ys.push_back(uni);
    }
    // Size of the cluster strictly below the root's children vs uni-links at
    // the root: independent by Poisson thinning.
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    const double corr = sxy / std::sqrt(sxx * syy);
    CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(n)));
}

} // TEST_SUITE
