#pragma once

namespace nomasec::special_fn {

// E1(x) = int_x^inf e^{-t}/t dt, x > 0.
//
// Power series below x = 1, modified Lentz continued fraction above (the
// standard stable regimes). Relative accuracy better than 1e-12 on
// [1e-300, 700]; underflows smoothly to 0 past x ~ 745.
// Throws std::domain_error for x <= 0 or non-finite x.
double e1(double x);

// e^x * E1(x) computed without ever forming e^x, so it stays finite for
// arbitrarily large x. Satisfies 1/(x+1) < e1_scaled(x) < 1/x.
double e1_scaled(double x);

// Ei(-x) = -E1(x) for x > 0. Every Ei in the rate expressions has a strictly
// negative argument, so this is the only Ei entry point.
double ei_neg(double x);

} // namespace nomasec::special_fn
