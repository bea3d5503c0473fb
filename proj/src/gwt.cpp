#include "loopperc/gwt.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "loopperc/errors.hpp"

namespace loopperc {

namespace {

bool has_closed_form(const OffspringLaw& law) {
    return std::holds_alternative<OffspringLaw::Deterministic>(law.variant()) ||
           std::holds_alternative<OffspringLaw::Poisson>(law.variant()) ||
           std::holds_alternative<OffspringLaw::Binomial>(law.variant()) ||
           std::holds_alternative<OffspringLaw::Geometric>(law.variant());
}

void check_z(double z) {
    if (!(z >= 0.0 && z <= 1.0)) throw InvalidParameter("generating function argument outside [0,1]");
}

} // namespace

GeneratingFunction::GeneratingFunction(OffspringLaw law)
    : GeneratingFunction(law, has_closed_form(law) ? Mode::ClosedForm : Mode::Series) {}

GeneratingFunction::GeneratingFunction(OffspringLaw law, Mode mode)
    : law_(std::move(law)), mode_(mode), mean_(law_.mean()) {
    if (mode_ == Mode::ClosedForm && !has_closed_form(law_))
        throw InvalidParameter("no closed-form generating function for " + law_.describe());
}

double GeneratingFunction::series(double z, bool derivative) const {
    // Terms are summed until the remaining mass (or first moment) times
    // z^k is below the tolerance. With finite support the sum is exact.
    const auto top = law_.max_support();
    const std::int64_t limit = top ? *top : std::int64_t{1} << 40;
    double sum = 0.0, mass = 0.0, moment = 0.0, zk = 1.0;  // zk = z^(k-1) or z^k
    for (std::int64_t k = derivative ? 1 : 0; k <= limit; ++k) {
        const double p = law_.pmf(k);
        const double kd = static_cast<double>(k);
        sum += (derivative ? kd : 1.0) * p * zk;
        mass += p;
        moment += kd * p;
        zk *= z;
        if (k > 0) {
            const double rest = derivative ? mean_ - moment : 1.0 - mass;
            if (rest * zk < kSeriesTolerance * 0.1 || (!top && rest < kSeriesTolerance * 0.1)) return sum;
        }
    }
    if (!top) throw PrecisionError("series for " + law_.describe() + " did not meet its tail tolerance");
    return sum;
}

double GeneratingFunction::f(double z) const {
    check_z(z);
    if (mode_ == Mode::Series) return series(z, false);
    struct Visitor {
        double z;
        double operator()(const OffspringLaw::Deterministic& l) const { return std::pow(z, static_cast<double>(l.d)); }
        double operator()(const OffspringLaw::Poisson& l) const { return std::exp(l.lambda * (z - 1.0)); }
        double operator()(const OffspringLaw::Binomial& l) const {
            return std::pow(1.0 - l.p + l.p * z, static_cast<double>(l.n));
        }
        double operator()(const OffspringLaw::Geometric& l) const { return l.p / (1.0 - (1.0 - l.p) * z); }
        double operator()(const OffspringLaw::PowerLaw&) const { return 0.0; }
        double operator()(const OffspringLaw::Empirical&) const { return 0.0; }
    };
    return std::visit(Visitor{z}, law_.variant());
}

double GeneratingFunction::fprime(double z) const {
    check_z(z);
    if (mode_ == Mode::Series) return series(z, true);
    struct Visitor {
        double z;
        double operator()(const OffspringLaw::Deterministic& l) const {
            if (l.d == 0) return 0.0;
            return static_cast<double>(l.d) * std::pow(z, static_cast<double>(l.d - 1));
        }
        double operator()(const OffspringLaw::Poisson& l) const { return l.lambda * std::exp(l.lambda * (z - 1.0)); }
        double operator()(const OffspringLaw::Binomial& l) const {
            if (l.n == 0) return 0.0;
            return static_cast<double>(l.n) * l.p * std::pow(1.0 - l.p + l.p * z, static_cast<double>(l.n - 1));
        }
        double operator()(const OffspringLaw::Geometric& l) const {
            const double q = 1.0 - l.p;
            const double den = 1.0 - q * z;
            return l.p * q / (den * den);
        }
        double operator()(const OffspringLaw::PowerLaw&) const { return 0.0; }
        double operator()(const OffspringLaw::Empirical&) const { return 0.0; }
    };
    return std::visit(Visitor{z}, law_.variant());
}

double h_of_beta(double beta) {
    if (!(beta > 0.0)) throw InvalidParameter("h needs beta > 0");
    if (beta < 1e-4) {
        const double b2 = beta * beta;
        return beta / 2.0 - b2 / 12.0 + b2 * b2 / 720.0;
    }
    return 1.0 - beta / std::expm1(beta);
}

double expected_Y(double beta, const GeneratingFunction& f) {
    const double h = h_of_beta(beta);
    const double keep = -std::expm1(-beta);
    return (1.0 - h) * keep * f.fprime(std::exp(-beta) + keep * (1.0 - h));
}

std::vector<bool> theoremB_condition(const GeneratingFunction& f, std::span<const double> eps_grid) {
    std::vector<bool> out;
    out.reserve(eps_grid.size());
    for (double eps : eps_grid) {
        if (!(eps > 0.0 && eps < 1.0)) throw InvalidParameter("epsilon values must lie in (0,1)");
        out.push_back(std::sqrt(eps) * f.fprime(1.0 - eps) > 1.0 / std::sqrt(2.0));
    }
    return out;
}

double link_threshold(double mean_offspring) {
    if (!(mean_offspring > 0.0)) throw InvalidParameter("link threshold needs a positive mean");
    if (mean_offspring <= 1.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-1.0 / mean_offspring);
}

bool poisson_sufficient(double beta, double lambda) {
    if (!(beta > 0.0) || !(lambda > 0.0)) throw InvalidParameter("poisson_sufficient needs beta, lambda > 0");
    return beta * std::exp(-beta) * lambda > 1.0;
}

void write_gwt_csv(std::ostream& out, const GeneratingFunction& f, std::span<const double> betas,
                   std::span<const double> eps_grid) {
    out << "law,beta,h,expected_Y,thmB_eps,thmB_holds,link_threshold,poisson_sufficient\n";
    const auto verdicts = theoremB_condition(f, eps_grid);
    const double threshold = link_threshold(f.mean());
    const auto* poisson = std::get_if<OffspringLaw::Poisson>(&f.law().variant());
    char buf[256];
    for (double beta : betas) {
        const double h = h_of_beta(beta);
        const double y = expected_Y(beta, f);
        const char* ps = poisson ? (poisson_sufficient(beta, poisson->lambda) ? "true" : "false") : "NA";
        for (std::size_t i = 0; i < eps_grid.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%s,%.17g,%s", beta, h, y, eps_grid[i],
                          verdicts[i] ? "true" : "false", threshold, ps);
            out << '"' << f.law().describe() << "\"," << buf << '\n';
        }
    }
}

} // namespace loopperc
