#include "nefa/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nefa {

TimeGrid::TimeGrid(double xi, std::size_t n_max) : xi_(xi), n_max_(n_max) {
    if (!(xi >= 0.0)) throw std::invalid_argument("time grid: xi must be >= 0");
    if (n_max == 0) throw std::invalid_argument("time grid: n_max must be >= 1");
    T_.resize(n_max + 1);
    Y_.resize(n_max + 1);
    delta_.resize(n_max + 1);
    T_[0] = Y_[0] = delta_[0] = 0.0;
    for (std::size_t i = 1; i <= n_max; ++i) {
        T_[i] = time_at(xi, i);
        Y_[i] = bound_at(xi, i);
        delta_[i] = delta_at(xi, i);
    }
}

double TimeGrid::exposure(std::size_t n, double theta) const {
    if (n < 1 || n > n_max_) throw std::out_of_range("exposure: n out of horizon");
    if (!(theta >= 0.0)) throw std::invalid_argument("exposure: theta must be >= 0");
    if (theta > Y_[n]) return 0.0;
    std::size_t i_star = std::max<std::size_t>(1, first_exposed(theta));
    return T_[n] - T_[i_star - 1];
}

std::size_t TimeGrid::first_exposed(double theta) const {
    auto it = std::lower_bound(Y_.begin() + 1, Y_.end(), theta);
    return static_cast<std::size_t>(it - Y_.begin());  // n_max + 1 when past the end
}

std::size_t TimeGrid::interval_index(double theta) const {
    if (!(theta >= 0.0)) throw std::invalid_argument("interval_index: theta must be >= 0");
    if (theta > Y_[n_max_]) throw std::out_of_range("interval_index: theta beyond Y_{n_max}");
    if (theta == 0.0) return 1;
    return first_exposed(theta);
}

double TimeGrid::time_at(double xi, std::size_t n) {
    return std::pow(static_cast<double>(n), 1.0 / (xi + 1.0));
}

double TimeGrid::bound_at(double xi, std::size_t n) {
    return std::pow(static_cast<double>(n), xi / (xi + 1.0));
}

double TimeGrid::delta_at(double xi, std::size_t n) {
    if (n == 0) return 0.0;
    if (n == 1) return 1.0;
    double a = 1.0 / (xi + 1.0);
    double nd = static_cast<double>(n);
    return std::pow(nd, a) * (-std::expm1(a * std::log1p(-1.0 / nd)));
}

}  // namespace nefa
