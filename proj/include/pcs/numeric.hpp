#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace pcs {

using Cplx = std::complex<double>;

/// One leg of an explicit local path near a node, as a parametrization of a
/// chart coordinate together with its derivative. Incoming legs run on
/// [-len, 0] and reach the node at 0, outgoing legs run on [0, len] and
/// leave it at 0. The one-sided derivative at 0 must be nonzero.
struct NumericChart {
    std::function<Cplx(double)> pos;
    std::function<Cplx(double)> vel;
    double len = 1.0;
};

/// An explicit crossing scenario in local coordinates with node equation
/// x*y = 0: the 1-form is res_in/x dx plus a smooth part on the incoming
/// branch, res_out/y dy plus a smooth part on the outgoing branch, and a
/// node profile h(xi, w) whose second slot receives the matched logarithm
/// of the cutoff positions.
struct NumericCrossing {
    NumericChart in;
    NumericChart out;
    Cplx res_in{};
    Cplx res_out{};
    std::function<Cplx(Cplx)> smooth_in;   // may be empty
    std::function<Cplx(Cplx)> smooth_out;  // may be empty
    std::function<Cplx(double, Cplx)> h;   // may be empty
};

/// The truncated integral at cutoff eps: both legs are integrated up to
/// distance eps in the parameter, and the node contributes the profile
/// integrated over [0,1] at the matched logarithm. Adaptive quadrature;
/// throws std::runtime_error when it fails to converge.
Cplx numeric_epsilon_integral(const NumericCrossing& c, double eps);

/// The default cutoff grid, largest first.
std::vector<double> numeric_default_grid();

struct NumericResult {
    Cplx limit{};
    std::vector<Cplx> values;  // one per grid entry
};

/// Evaluates the truncated integral on the grid (entries run concurrently)
/// and removes the eps*log(eps) and eps error terms by a least-squares fit,
/// leaving the regularized limit.
NumericResult numeric_extrapolate(const NumericCrossing& c,
                                  const std::vector<double>& grid = numeric_default_grid());

}  // namespace pcs
