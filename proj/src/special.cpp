#include "conewhit/special.hpp"

#include <cmath>

#include "conewhit/errors.hpp"

namespace conewhit {

double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma: x must be positive");
    double result = 0.0;
    while (x < 12.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double w = 1.0 / (x * x);
    // Bernoulli asymptotic series.
    result += std::log(x) - 0.5 / x -
              w * (1.0 / 12.0 -
                   w * (1.0 / 120.0 -
                        w * (1.0 / 252.0 - w * (1.0 / 240.0 - w * (1.0 / 132.0)))));
    return result;
}

}  // namespace conewhit
