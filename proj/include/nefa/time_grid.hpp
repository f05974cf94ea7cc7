#pragma once

#include <cstddef>
#include <vector>

namespace nefa {

// Deterministic observation-time and exposure-bound sequences
//   T_n = n^{1/(xi+1)},  Y_n = n^{xi/(xi+1)},  Delta_n = T_n - T_{n-1},
// with T_0 = Y_0 = 0, cached up to a declared horizon.  T_n * Y_n = n, and
// xi = 0 collapses to T_n = n, Y_n = Delta_n = 1.
class TimeGrid {
public:
    TimeGrid(double xi, std::size_t n_max);

    double xi() const { return xi_; }
    std::size_t n_max() const { return n_max_; }

    double T(std::size_t i) const { return T_[i]; }
    double Y(std::size_t i) const { return Y_[i]; }
    double delta(std::size_t i) const { return delta_[i]; }

    // f_n(theta) = sum_{i<=n} Delta_i 1{theta <= Y_i} = T_n - T_{i*-1} with
    // i* the first exposed index; 0 when theta > Y_n, T_n when theta = 0.
    double exposure(std::size_t n, double theta) const;

    // The unique i in 1..n_max with Y_{i-1} < theta <= Y_i (1 for theta = 0).
    // Ties resolve to the closed right endpoint.  theta > Y_{n_max} is an error.
    std::size_t interval_index(double theta) const;

    // min{i >= 1 : Y_i >= theta}; n_max + 1 when theta > Y_{n_max}.
    std::size_t first_exposed(double theta) const;

    // Streaming forms, valid for any n without a cached grid.
    static double time_at(double xi, std::size_t n);
    static double bound_at(double xi, std::size_t n);
    // Cancellation-safe Delta_n = n^a (1 - (1-1/n)^a), a = 1/(xi+1).
    static double delta_at(double xi, std::size_t n);

private:
    double xi_;
    std::size_t n_max_;
    std::vector<double> T_, Y_, delta_;
};

}  // namespace nefa
