#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "loopperc/random.hpp"

namespace loopperc {

// Offspring distribution zeta = (zeta_0, zeta_1, ...) of a Galton-Watson tree.
class OffspringLaw {
public:
    struct Deterministic { std::int64_t d; };
    struct Poisson { double lambda; };
    struct Binomial { std::int64_t n; double p; };
    // P(k) = p (1-p)^k, k >= 0.
    struct Geometric { double p; };
    // P(k) proportional to k^-tau for 1 <= k <= cutoff, zero elsewhere.
    struct PowerLaw { double tau; std::int64_t cutoff; };
    // P(k) proportional to weights[k].
    struct Empirical { std::vector<double> weights; };

    using Variant = std::variant<Deterministic, Poisson, Binomial, Geometric, PowerLaw, Empirical>;

    static OffspringLaw deterministic(std::int64_t d);
    static OffspringLaw poisson(double lambda);
    static OffspringLaw binomial(std::int64_t n, double p);
    static OffspringLaw geometric(double p);
    static OffspringLaw power_law(double tau, std::int64_t cutoff);
    static OffspringLaw empirical(std::vector<double> weights);

    // "poisson:2", "deterministic:3", "binomial:10:0.3", "geometric:0.5",
    // "powerlaw:1.3:1000000", "empirical:0.2,0.3,0.5".
    static OffspringLaw parse(std::string_view text);
    // Inverse of parse.
    std::string describe() const;

    const Variant& variant() const { return law_; }

    double pmf(std::int64_t k) const;
    double mean() const;
    // Largest k with positive mass, when finite.
    std::optional<std::int64_t> max_support() const;

    // Mass the PowerLaw cutoff removes from the untruncated zeta(tau) law
    // (upper bound); zero for the other laws.
    double truncated_tail_mass() const;

    template <class Gen>
    std::int64_t sample(Gen& gen) const;

private:
    explicit OffspringLaw(Variant v);

    Variant law_;
    double norm_ = 1.0;          // PowerLaw / Empirical normaliser
    std::vector<double> cdf_;    // Empirical cumulative masses
};

template <class Gen>
std::int64_t OffspringLaw::sample(Gen& gen) const {
    struct Visitor {
        const OffspringLaw& self;
        Gen& gen;

        std::int64_t operator()(const Deterministic& l) const { return l.d; }
        std::int64_t operator()(const Poisson& l) const {
            if (l.lambda <= 0.0) return 0;
            return std::poisson_distribution<std::int64_t>(l.lambda)(gen);
        }
        std::int64_t operator()(const Binomial& l) const {
            return std::binomial_distribution<std::int64_t>(l.n, l.p)(gen);
        }
        std::int64_t operator()(const Geometric& l) const {
            if (l.p >= 1.0) return 0;
            return std::geometric_distribution<std::int64_t>(l.p)(gen);
        }
        std::int64_t operator()(const PowerLaw& l) const {
            // Rejection from the continuous Pareto density on [1, cutoff+1),
            // rounded down. Acceptance ratio is at least 2^-tau.
            const double a = 1.0 - l.tau;
            const double top = std::pow(static_cast<double>(l.cutoff) + 1.0, a);
            const double first_cell = (1.0 - std::pow(2.0, a)) / -a;
            for (;;) {
                const double x = std::pow(1.0 - uniform01(gen) * (1.0 - top), 1.0 / a);
                auto k = static_cast<std::int64_t>(x);
                if (k < 1) k = 1;
                if (k > l.cutoff) k = l.cutoff;
                const double kd = static_cast<double>(k);
                const double cell = (std::pow(kd, a) - std::pow(kd + 1.0, a)) / -a;
                if (uniform01(gen) * cell <= std::pow(kd, -l.tau) * first_cell) return k;
            }
        }
        std::int64_t operator()(const Empirical&) const {
            const double u = uniform01(gen);
            const auto& cdf = self.cdf_;
            std::size_t lo = 0, hi = cdf.size() - 1;
            while (lo < hi) {
                const std::size_t mid = (lo + hi) / 2;
                if (u < cdf[mid]) hi = mid; else lo = mid + 1;
            }
            return static_cast<std::int64_t>(lo);
        }
    };
    return std::visit(Visitor{*this, gen}, law_);
}

} // namespace loopperc
