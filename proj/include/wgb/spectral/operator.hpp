#pragma once

#include "wgb/errors.hpp"
#include "wgb/geometry/waveguide.hpp"

#include <Eigen/SparseCore>

#include <cmath>
#include <numbers>
#include <vector>

namespace wgb::spectral {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Finite-difference grid on the truncated straightened strip [-S, S] x [-a, a].
/// Only interior nodes are unknowns; all four sides carry Dirichlet conditions.
struct GridSpec {
    double s_trunc = 0.0;
    int n_s = 256;
    int n_u = 32;

    double h_s() const { return 2.0 * s_trunc / (n_s + 1); }
    double h_u(double a) const { return 2.0 * a / (n_u + 1); }
    double s(int i) const { return -s_trunc + (i + 1) * h_s(); }
    double u(int j, double a) const { return -a + (j + 1) * h_u(a); }
    long long size() const { return static_cast<long long>(n_s) * n_u; }

    /// The grid with both mesh steps halved; coarse nodes are a subset of its nodes.
    GridSpec refined() const { return {s_trunc, 2 * n_s + 1, 2 * n_u + 1}; }
};

inline void validate_grid(const GridSpec& g, double b) {
    require(g.s_trunc > b, "grid half-length S_trunc must exceed the support radius b");
    require(g.n_s >= 8 && g.n_u >= 8, "grid needs at least 8 interior nodes per direction");
}

/// Lowest eigenvalue of the three-point Dirichlet Laplacian on the transverse interval,
/// (4 / h^2) sin^2(pi h / 4a): the threshold seen by the discretized operator.
inline double discrete_threshold(double a, int n_u) {
    const double h = 2.0 * a / (n_u + 1);
    const double s = std::sin(std::numbers::pi * h / (4.0 * a));
    return 4.0 / (h * h) * s * s;
}

/// Five-point discretization of -d_s (1 + u gamma)^-2 d_s - d_u^2 + V(s, u).
///
/// The longitudinal term is in divergence form with the coefficient taken at
/// the half-steps s_{i +- 1/2}, so the matrix is symmetric by construction.
/// Unknown (i, j) is stored at row i * n_u + j.
inline SparseMatrix assemble_h1(const Waveguide& guide, const GridSpec& grid) {
    validate_grid(grid, guide.b());
    const double a = guide.a();
    const double hs = grid.h_s(), hu = grid.h_u(a);
    const double ws = 1.0 / (hs * hs), wu = 1.0 / (hu * hu);
    const auto& profile = guide.profile();
    const int ns = grid.n_s, nu = grid.n_u;

    // gamma on nodes and half-steps; index k stands for s_{k - 1/2}, k = 0..n_s.
    std::vector<double> gamma_half(ns + 1);
    for (int k = 0; k <= ns; ++k) gamma_half[k] = profile(-grid.s_trunc + (k + 0.5) * hs);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(grid.size()) * 5);
    auto coeff = [&](int k, double u) {
        const double f = 1.0 + u * gamma_half[k];
        return 1.0 / (f * f);
    };
    for (int i = 0; i < ns; ++i) {
        const double s = grid.s(i);
        for (int j = 0; j < nu; ++j) {
            const double u = grid.u(j, a);
            const int row = i * nu + j;
            const double c_left = coeff(i, u), c_right = coeff(i + 1, u);
            const double diag = (c_left + c_right) * ws + 2.0 * wu + guide.effective_potential(s, u);
            triplets.emplace_back(row, row, diag);
            if (i > 0) triplets.emplace_back(row, row - nu, -c_left * ws);
            if (i + 1 < ns) triplets.emplace_back(row, row + nu, -c_right * ws);
            if (j > 0) triplets.emplace_back(row, row - 1, -wu);
            if (j + 1 < nu) triplets.emplace_back(row, row + 1, -wu);
        }
    }
    SparseMatrix A(grid.size(), grid.size());
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();
    return A;
}

} // namespace wgb::spectral
