#include "pcs/numeric.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

namespace pcs {

namespace {

using Fn = std::function<Cplx(double)>;

Cplx simpson(double a, double b, Cplx fa, Cplx fm, Cplx fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

Cplx adaptive(const Fn& f, double a, double b, Cplx fa, Cplx fm, Cplx fb, Cplx whole,
              double tol, int depth) {
    if (depth > 48) throw std::runtime_error("quadrature did not converge");
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    Cplx flm = f(lm), frm = f(rm);
    Cplx left = simpson(a, m, fa, flm, fm);
    Cplx right = simpson(m, b, fm, frm, fb);
    if (std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

Cplx integrate(const Fn& f, double a, double b, double tol = 1e-11) {
    if (a == b) return Cplx{};
    Cplx fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    Cplx whole = simpson(a, b, fa, fm, fb);
    return adaptive(f, a, b, fa, fm, fb, whole, tol, 0);
}

}  // namespace

Cplx numeric_epsilon_integral(const NumericCrossing& c, double eps) {
    if (!(eps > 0.0) || eps >= c.in.len || eps >= c.out.len)
        throw std::invalid_argument("the cutoff must lie inside both charts");

    Fn incoming = [&](double t) {
        Cplx z = c.in.pos(t);
        Cplx v = c.in.vel(t);
        Cplx val = c.res_in / z;
        if (c.smooth_in) val += c.smooth_in(z);
        return val * v;
    };
    Fn outgoing = [&](double t) {
        Cplx z = c.out.pos(t);
        Cplx v = c.out.vel(t);
        Cplx val = c.res_out / z;
        if (c.smooth_out) val += c.smooth_out(z);
        return val * v;
    };

    Cplx total = integrate(incoming, -c.in.len, -eps);
    total += integrate(outgoing, eps, c.out.len);

    Cplx slot = std::log(c.in.pos(-eps) * c.out.pos(eps));
    if (c.h) {
        Fn node = [&](double xi) { return c.h(xi, slot); };
        total += integrate(node, 0.0, 1.0);
    }
    return total;
}

std::vector<double> numeric_default_grid() { return {1e-2, 1e-3, 1e-4, 1e-5}; }

NumericResult numeric_extrapolate(const NumericCrossing& c, const std::vector<double>& grid) {
    if (grid.size() < 3)
        throw std::invalid_argument("extrapolation needs at least three cutoffs");

    std::vector<std::future<Cplx>> jobs;
    jobs.reserve(grid.size());
    for (double eps : grid)
        jobs.push_back(std::async(std::launch::async,
                                  [&c, eps] { return numeric_epsilon_integral(c, eps); }));

    NumericResult out;
    out.values.reserve(grid.size());
    for (auto& j : jobs) out.values.push_back(j.get());

    // Least squares fit of I(eps) = L + a*eps*log(eps) + b*eps; the constant
    // term is the regularized limit.
    const int n = 3;
    Cplx ata[n][n] = {};
    Cplx atb[n] = {};
    for (size_t i = 0; i < grid.size(); ++i) {
        double e = grid[i];
        Cplx row[n] = {Cplx(1.0), Cplx(e * std::log(e)), Cplx(e)};
        for (int p = 0; p < n; ++p) {
            for (int q = 0; q < n; ++q) ata[p][q] += row[p] * row[q];
            atb[p] += row[p] * out.values[i];
        }
    }

    // Gaussian elimination with partial pivoting on the 3x3 normal system.
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(ata[r][col]) > std::abs(ata[piv][col])) piv = r;
        if (std::abs(ata[piv][col]) < 1e-300)
            throw std::runtime_error("extrapolation system is singular");
        if (piv != col) {
            for (int q = 0; q < n; ++q) std::swap(ata[col][q], ata[piv][q]);
            std::swap(atb[col], atb[piv]);
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            Cplx factor = ata[r][col] / ata[col][col];
            for (int q = col; q < n; ++q) ata[r][q] -= factor * ata[col][q];
            atb[r] -= factor * atb[col];
        }
    }
    out.limit = atb[0] / ata[0][0];
    return out;
}

}  // namespace pcs
