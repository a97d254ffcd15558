#include "ebessel/besselfn.hpp"

#include <cmath>
#include <cstdlib>

namespace ebessel {

double bessel_j(int m, double x) {
    double sign = 1.0;
    if (m < 0) {
        m = -m;
        if (m & 1) sign = -sign;
    }
    if (x < 0.0) {
        x = -x;
        if (m & 1) sign = -sign;
    }
    return sign * std::cyl_bessel_j(static_cast<double>(m), x);
}

}  // namespace ebessel
