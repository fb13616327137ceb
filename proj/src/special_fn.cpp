#include "special_fn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nomasec::special_fn {

namespace {

constexpr double kEulerGamma = 0.5772156649015328606065120900824024;

void require_positive(double x, const char* fn)
{
    if (!std::isfinite(x) || x <= 0.0)
        throw std::domain_error(std::string(fn) + ": argument must be finite and > 0, got " +
                                std::to_string(x));
}

// Alternating series E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k/(k k!).
// Used for x <= 1 where at most ~20 terms matter.
double e1_series(double x)
{
    double sum = 0.0;
    double pow_term = 1.0; // x^k / k!
    for (int k = 1; k <= 48; ++k) {
        pow_term *= x / k;
        const double add = ((k & 1) ? pow_term : -pow_term) / k;
        sum += add;
        if (std::fabs(add) < 1e-18 * std::fabs(sum))
            break;
    }
    return -kEulerGamma - std::log(x) + sum;
}

// Modified Lentz evaluation of the continued fraction
//   e^x E1(x) = 1/(x+1-) 1/(x+3-) 4/(x+5-) 9/(x+7-) ...
// for x >= 1. Converges in a few dozen iterations near x = 1, faster beyond.
double e1_scaled_cf(double x)
{
    constexpr double kTiny = 1e-300;
    // 2*eps: a tighter stop is unreachable once delta rounds to 1 +- 1 ulp
    // and every extra pass just multiplies rounding noise into h.
    constexpr double kStop = 4.441e-16;
    double b = x + 1.0;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 400; ++i) {
        const double a = -static_cast<double>(i) * static_cast<double>(i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double delta = c * d;
        h *= delta;
        if (std::fabs(delta - 1.0) < kStop)
            break;
    }
    return h;
}

} // namespace

double e1(double x)
{
    require_positive(x, "e1");
    if (x <= 1.0)
        return e1_series(x);
    return e1_scaled_cf(x) * std::exp(-x);
}

double e1_scaled(double x)
{
    require_positive(x, "e1_scaled");
    if (x <= 1.0)
        return std::exp(x) * e1_series(x);
    return e1_scaled_cf(x);
}

double ei_neg(double x)
{
    require_positive(x, "ei_neg");
    return -e1(x);
}

} // namespace nomasec::special_fn
