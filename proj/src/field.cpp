#include "ebessel/field.hpp"

#include "ebessel/parallel.hpp"

namespace ebessel {

double total_power(const Field2D& field) {
    const int nx = field.grid.nx;
    const double sum = sum_over_indices(field.grid.ny, [&](int row) {
        const std::complex<double>* p = field.values.data() + static_cast<size_t>(row) * nx;
        double s = 0.0;
        for (int i = 0; i < nx; ++i) s += std::norm(p[i]);
        return s;
    });
    return sum * field.grid.pitch_m * field.grid.pitch_m;
}

}  // namespace ebessel
