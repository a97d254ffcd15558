#pragma once

namespace ebessel {

// Integer-order Bessel function of the first kind, extended to negative
// orders and arguments via J_{-m}(x) = (-1)^m J_m(x) and
// J_m(-x) = (-1)^m J_m(x).
double bessel_j(int m, double x);

}  // namespace ebessel
