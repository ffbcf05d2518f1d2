#pragma once

#include "searcheq/numerics.hpp"
#include "searcheq/stahl.hpp"

namespace searcheq::detail {

template <class Benefit>
ReservationSolution solve_reservation(Benefit&& benefit, double cap, double s,
                                      const SolverOptions& opt) {
    double s_bar = benefit(cap);
    if (s >= s_bar) {
        return {cap, cap, s_bar, true};
    }
    double lo = 1e-12 * cap;
    auto gap = [&](double r) { return benefit(r) - s; };
    double r = numerics::find_root(gap, lo, cap, {opt.root_tol, 400});
    return {r, r, s_bar, false};
}

} // namespace searcheq::detail
