#include "loopperc/offspring.hpp"

#include <charconv>
#include <numeric>
#include <sstream>

#include "loopperc/errors.hpp"

namespace loopperc {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double to_double(std::string_view s, std::string_view what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw InvalidParameter("offspring law: cannot parse " + std::string(what) + " from '" +
                               std::string(s) + "'");
    return value;
}

std::int64_t to_int(std::string_view s, std::string_view what) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw InvalidParameter("offspring law: cannot parse " + std::string(what) + " from '" +
                               std::string(s) + "'");
    return value;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace

OffspringLaw::OffspringLaw(Variant v) : law_(std::move(v)) {}

OffspringLaw OffspringLaw::deterministic(std::int64_t d) {
    if (d < 0) throw InvalidParameter("deterministic offspring count must be >= 0");
    return OffspringLaw(Deterministic{d});
}

OffspringLaw OffspringLaw::poisson(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw InvalidParameter("poisson rate must be finite and >= 0");
    return OffspringLaw(Poisson{lambda});
}

OffspringLaw OffspringLaw::binomial(std::int64_t n, double p) {
    if (n < 0 || !(p >= 0.0 && p <= 1.0))
        throw InvalidParameter("binomial needs n >= 0 and p in [0,1]");
    return OffspringLaw(Binomial{n, p});
}

OffspringLaw OffspringLaw::geometric(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw InvalidParameter("geometric needs p in (0,1]");
    return OffspringLaw(Geometric{p});
}

OffspringLaw OffspringLaw::power_law(double tau, std::int64_t cutoff) {
    if (!(tau > 1.0) || !std::isfinite(tau)) throw InvalidParameter("power-law exponent must be > 1");
    if (cutoff < 1) throw InvalidParameter("power-law cutoff must be >= 1");
    OffspringLaw law(PowerLaw{tau, cutoff});
    // Summed from the small terms up so the normaliser is accurate to ~1 ulp.
    double z = 0.0;
    for (std::int64_t k = cutoff; k >= 1; --k) z += std::pow(static_cast<double>(k), -tau);
    law.norm_ = z;
    return law;
}

OffspringLaw OffspringLaw::empirical(std::vector<double> weights) {
    if (weights.empty()) throw InvalidParameter("empirical law needs at least one weight");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw InvalidParameter("empirical weights must be finite and >= 0");
        total += w;
    }
    if (!(total > 0.0)) throw InvalidParameter("empirical weights must not all be zero");
    OffspringLaw law(Empirical{std::move(weights)});
    law.norm_ = total;
    const auto& w = std::get<Empirical>(law.law_).weights;
    law.cdf_.resize(w.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        acc += w[k] / total;
        law.cdf_[k] = acc;
    }
    law.cdf_.back() = 1.0;
    return law;
}

OffspringLaw OffspringLaw::parse(std::string_view text) {
    const auto parts = split(text, ':');
    const auto kind = parts.front();
    auto expect = [&](std::size_t n) {
        if (parts.size() != n)
            throw InvalidParameter("offspring law '" + std::string(text) + "': expected " +
                                   std::to_string(n - 1) + " parameter(s)");
    };
    if (kind == "deterministic") {
        expect(2);
        return deterministic(to_int(parts[1], "d"));
    }
    if (kind == "poisson") {
        expect(2);
        return poisson(to_double(parts[1], "lambda"));
    }
    if (kind == "binomial") {
        expect(3);
        return binomial(to_int(parts[1], "n"), to_double(parts[2], "p"));
    }
    if (kind == "geometric") {
        expect(2);
        return geometric(to_double(parts[1], "p"));
    }
    if (kind == "powerlaw") {
        expect(3);
        return power_law(to_double(parts[1], "tau"), to_int(parts[2], "cutoff"));
    }
    if (kind == "empirical") {
        expect(2);
        std::vector<double> w;
        for (auto item : split(parts[1], ',')) w.push_back(to_double(item, "weight"));
        return empirical(std::move(w));
    }
    throw InvalidParameter("unknown offspring law '" + std::string(kind) + "'");
}

std::string OffspringLaw::describe() const {
    struct Visitor {
        std::string operator()(const Deterministic& l) const { return "deterministic:" + std::to_string(l.d); }
        std::string operator()(const Poisson& l) const { return "poisson:" + fmt(l.lambda); }
        std::string operator()(const Binomial& l) const {
            return "binomial:" + std::to_string(l.n) + ":" + fmt(l.p);
        }
        std::string operator()(const Geometric& l) const { return "geometric:" + fmt(l.p); }
        std::string operator()(const PowerLaw& l) const {
            return "powerlaw:" + fmt(l.tau) + ":" + std::to_string(l.cutoff);
        }
        std::string operator()(const Empirical& l) const {
            std::string s = "empirical:";
            for (std::size_t i = 0; i < l.weights.size(); ++i) {
                if (i) s += ',';
                s += fmt(l.weights[i]);
            }
            return s;
        }
    };
    return std::visit(Visitor{}, law_);
}

double OffspringLaw::pmf(std::int64_t k) const {
    if (k < 0) return 0.0;
    struct Visitor {
        const OffspringLaw& self;
        std::int64_t k;
        double operator()(const Deterministic& l) const { return k == l.d ? 1.0 : 0.0; }
        double operator()(const Poisson& l) const {
            if (l.lambda == 0.0) return k == 0 ? 1.0 : 0.0;
            const double kd = static_cast<double>(k);
            return std::exp(kd * std::log(l.lambda) - l.lambda - std::lgamma(kd + 1.0));
        }
        double operator()(const Binomial& l) const {
            if (k > l.n) return 0.0;
            if (l.p == 0.0) return k == 0 ? 1.0 : 0.0;
            if (l.p == 1.0) return k == l.n ? 1.0 : 0.0;
            const double n = static_cast<double>(l.n), kd = static_cast<double>(k);
            return std::exp(std::lgamma(n + 1) - std::lgamma(kd + 1) - std::lgamma(n - kd + 1) +
                            kd * std::log(l.p) + (n - kd) * std::log1p(-l.p));
        }
        double operator()(const Geometric& l) const {
            if (l.p == 1.0) return k == 0 ? 1.0 : 0.0;
            return l.p * std::exp(static_cast<double>(k) * std::log1p(-l.p));
        }
        double operator()(const PowerLaw& l) const {
            if (k < 1 || k > l.cutoff) return 0.0;
            return std::pow(static_cast<double>(k), -l.tau) / self.norm_;
        }
        double operator()(const Empirical& l) const {
            if (static_cast<std::size_t>(k) >= l.weights.size()) return 0.0;
            return l.weights[static_cast<std::size_t>(k)] / self.norm_;
        }
    };
    return std::visit(Visitor{*this, k}, law_);
}

double OffspringLaw::mean() const {
    struct Visitor {
        const OffspringLaw& self;
        double operator()(const Deterministic& l) const { return static_cast<double>(l.d); }
        double operator()(const Poisson& l) const { return l.lambda; }
        double operator()(const Binomial& l) const { return static_cast<double>(l.n) * l.p; }
        double operator()(const Geometric& l) const { return (1.0 - l.p) / l.p; }
        double operator()(const PowerLaw& l) const {
            double s = 0.0;
            for (std::int64_t k = l.cutoff; k >= 1; --k) s += std::pow(static_cast<double>(k), 1.0 - l.tau);
            return s / self.norm_;
        }
        double operator()(const Empirical& l) const {
            double s = 0.0;
            for (std::size_t k = 0; k < l.weights.size(); ++k) s += static_cast<double>(k) * l.weights[k];
            return s / self.norm_;
        }
    };
    return std::visit(Visitor{*this}, law_);
}

std::optional<std::int64_t> OffspringLaw::max_support() const {
    struct Visitor {
        std::optional<std::int64_t> operator()(const Deterministic& l) const { return l.d; }
        std::optional<std::int64_t> operator()(const Poisson& l) const {
            if (l.lambda == 0.0) return std::int64_t{0};
            return std::nullopt;
        }
        std::optional<std::int64_t> operator()(const Binomial& l) const { return l.n; }
        std::optional<std::int64_t> operator()(const Geometric& l) const {
            if (l.p == 1.0) return std::int64_t{0};
            return std::nullopt;
        }
        std::optional<std::int64_t> operator()(const PowerLaw& l) const { return l.cutoff; }
        std::optional<std::int64_t> operator()(const Empirical& l) const {
            std::int64_t k = static_cast<std::int64_t>(l.weights.size()) - 1;
            while (k > 0 && l.weights[static_cast<std::size_t>(k)] == 0.0) --k;
            return k;
        }
    };
    return std::visit(Visitor{}, law_);
}

double OffspringLaw::truncated_tail_mass() const {
    if (const auto* l = std::get_if<PowerLaw>(&law_)) {
        // sum_{k > C} k^-tau <= C^(1-tau) / (tau - 1); relative to the
        // untruncated normaliser, which exceeds norm_.
        const double tail = std::pow(static_cast<double>(l->cutoff), 1.0 - l->tau) / (l->tau - 1.0);
        return tail / (norm_ + tail);
    }
    return 0.0;
}

} // namespace loopperc
