#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "loopperc/offspring.hpp"

namespace loopperc {

// Probability generating function f of an offspring law and its derivative.
class GeneratingFunction {
public:
    enum class Mode { ClosedForm, Series };

    // Closed form for Deterministic, Poisson, Binomial and Geometric laws,
    // series otherwise.
    explicit GeneratingFunction(OffspringLaw law);
    // Forces a mode; ClosedForm is rejected for laws without one.
    GeneratingFunction(OffspringLaw law, Mode mode);

    Mode mode() const { return mode_; }
    const OffspringLaw& law() const { return law_; }
    double mean() const { return mean_; }

    // z in [0,1].
    double f(double z) const;
    double fprime(double z) const;

    // Largest admissible truncation error of a series evaluation.
    static constexpr double kSeriesTolerance = 1e-12;

private:
    double series(double z, bool derivative) const;

    OffspringLaw law_;
    Mode mode_;
    double mean_;
};

// P(P > 1 | P > 0) for P ~ Poisson(beta).
double h_of_beta(double beta);

// E[Y_beta] = (1-h) (1-e^-beta) f'(e^-beta + (1-e^-beta)(1-h)).
double expected_Y(double beta, const GeneratingFunction& f);

// Per eps: sqrt(eps) f'(1-eps) > 1/sqrt(2).
std::vector<bool> theoremB_condition(const GeneratingFunction& f, std::span<const double> eps_grid);

// -log(1 - 1/mean); +infinity when mean <= 1.
double link_threshold(double mean_offspring);

// beta e^-beta lambda > 1.
bool poisson_sufficient(double beta, double lambda);

// "law,beta,h,expected_Y,thmB_eps,thmB_holds,link_threshold,poisson_sufficient"
// rows: one per (beta, eps) pair.
void write_gwt_csv(std::ostream& out, const GeneratingFunction& f, std::span<const double> betas,
                   std::span<const double> eps_grid);

} // namespace loopperc
