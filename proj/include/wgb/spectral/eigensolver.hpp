#pragma once

#include "wgb/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <memory>
#include <string>
#include <vector>

namespace wgb::spectral {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct EigenSolverConfig {
    double rel_tol = 1e-8;          ///< residual ||A x - lambda x|| <= rel_tol * max(|lambda|, 1)
    long long dense_max = 2000;     ///< dense solve at or below this dimension
    int min_basis = 30;
    int max_basis = 90;             ///< Lanczos vectors kept per round
    int max_rounds = 40;
    std::uint64_t seed = 0x5eed5eedULL;
};

namespace detail {

/// Sparse LDL^T of (A - shift I). By Sylvester's law of inertia the number of
/// negative pivots equals the number of eigenvalues of A below the shift.
class ShiftedFactor {
public:
    ShiftedFactor(const SparseMatrix& A, double shift) : shift_(shift) {
        SparseMatrix I(A.rows(), A.cols());
        I.setIdentity();
        const SparseMatrix shifted = A - shift * I;
        ldlt_.compute(shifted);
        if (ldlt_.info() != Eigen::Success)
            throw NumericalError("sparse LDL^T factorization failed at shift " + std::to_string(shift));
        const Eigen::VectorXd d = ldlt_.vectorD();
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            if (!std::isfinite(d[i]) || d[i] == 0.0)
                throw NumericalError("singular or non-finite pivot at shift " + std::to_string(shift));
            if (d[i] < 0.0) ++negative_;
        }
    }

    double shift() const noexcept { return shift_; }
    long long negative_pivots() const noexcept { return negative_; }
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return ldlt_.solve(b); }

private:
    double shift_;
    long long negative_ = 0;
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
};

inline std::pair<double, double> gershgorin_bounds(const SparseMatrix& A) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(A.rows());
    Eigen::VectorXd radius = Eigen::VectorXd::Zero(A.rows());
    for (int col = 0; col < A.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(A, col); it; ++it) {
            if (it.row() == it.col()) diag[it.row()] += it.value();
            else radius[it.row()] += std::abs(it.value());
        }
    return {(diag - radius).minCoeff(), (diag + radius).maxCoeff()};
}

} // namespace detail

/// Number of eigenvalues of the symmetric matrix A strictly below `shift`.
inline long long count_below(const SparseMatrix& A, double shift) {
    return detail::ShiftedFactor(A, shift).negative_pivots();
}

/// The k smallest eigenvalues of a symmetric sparse matrix, ascending.
///
/// Small problems go to a dense solver. Otherwise: shift-invert Lanczos with
/// full reorthogonalization and locking. The shift always stays below the
/// spectrum (checked by inertia), so the largest Ritz values of the inverse
/// map to the lowest eigenvalues; after each round the shift moves up towards
/// the unresolved cluster. A final inertia count guards against missed
/// eigenvalues, e.g. from multiplicities.
inline std::vector<double> lowest_eigenvalues(const SparseMatrix& A, int k, const EigenSolverConfig& cfg = {}) {
    require(A.rows() == A.cols(), "eigensolver needs a square matrix");
    require(k >= 1 && k < A.rows(), "eigensolver needs 1 <= k < dimension");
    const Eigen::Index n = A.rows();

    if (n <= cfg.dense_max) {
        const Eigen::MatrixXd dense = Eigen::MatrixXd(A);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericalError("dense symmetric eigensolver failed");
        const Eigen::VectorXd& ev = es.eigenvalues();
        return {ev.data(), ev.data() + k};
    }

    const auto [lower, upper] = detail::gershgorin_bounds(A);
    const double spread = std::max(upper - lower, 1.0);
    double safe_shift = lower - 1e-3 * spread;
    auto factor = std::make_unique<detail::ShiftedFactor>(A, safe_shift);

    std::vector<Eigen::VectorXd> locked;
    std::vector<double> locked_values;
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal;
    int basis = std::min<long long>(std::max(cfg.min_basis, 2 * k + 10), n - 1);

    auto orthogonalize = [&](Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& Q) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& x : locked) v -= x.dot(v) * x;
            for (const auto& q : Q) v -= q.dot(v) * q;
        }
    };

    double last_residual = 0.0;
    for (int round = 0; round < cfg.max_rounds; ++round) {
        const int wanted = k - static_cast<int>(locked.size());
        if (wanted <= 0) {
            // Completeness: no eigenvalue below the largest locked one may be missing.
            std::vector<double> sorted = locked_values;
            std::sort(sorted.begin(), sorted.end());
            const double top = sorted[k - 1];
            const double probe = top + 10.0 * cfg.rel_tol * std::max(std::abs(top), 1.0);
            const long long below = count_below(A, probe);
            const long long have = std::count_if(sorted.begin(), sorted.end(), [&](double v) { return v < probe; });
            if (below <= have) return {sorted.begin(), sorted.begin() + k};
            // Missing eigenvalues exist below `top`; search again in the deflated space.
            locked.pop_back();
            locked_values.pop_back();
            continue;
        }

        std::vector<Eigen::VectorXd> Q;
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
        orthogonalize(v, Q);
        v.normalize();
        std::vector<double> alpha, beta;
        for (int j = 0; j < basis; ++j) {
            Q.push_back(v);
            Eigen::VectorXd w = factor->solve(v);
            const double aj = v.dot(w);
            w -= aj * v;
            if (j > 0) w -= beta.back() * Q[j - 1];
            orthogonalize(w, Q);
            alpha.push_back(aj);
            const double bj = w.norm();
            if (bj <= 1e-14 * std::abs(aj)) break;
            if (j + 1 < basis) {
                beta.push_back(bj);
                v = w / bj;
            }
        }
        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        if (es.info() != Eigen::Success) throw NumericalError("tridiagonal eigensolver failed");

        // Ritz pairs of the inverse in decreasing order of theta, i.e. increasing lambda.
        std::vector<double> ritz_lambda;
        int newly_locked = 0;
        bool prefix = true;
        for (int idx = m - 1; idx >= 0 && idx >= m - (wanted + 2); --idx) {
            const double theta = es.eigenvalues()[idx];
            if (!(theta > 0.0)) break;
            const double lambda = factor->shift() + 1.0 / theta;
            ritz_lambda.push_back(lambda);
            if (!prefix) continue;
            Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < m; ++i) x += es.eigenvectors()(i, idx) * Q[i];
            x.normalize();
            const double residual = (A * x - lambda * x).norm();
            last_residual = residual;
            if (residual <= cfg.rel_tol * std::max(std::abs(lambda), 1.0) && newly_locked < wanted) {
                locked.push_back(std::move(x));
                locked_values.push_back(lambda);
                ++newly_locked;
            } else {
                prefix = false;
            }
        }

        // Move the shift up towards the unresolved cluster, keeping it below the spectrum.
        // Ritz values of the inverse bound the lowest unresolved eigenvalue from above.
        bool shifted = false;
        if (!ritz_lambda.empty() && static_cast<int>(locked.size()) < k) {
            const double first = ritz_lambda.front();
            const double width = ritz_lambda.back() - first;
            const double offset = std::max(width, 1e-6 * std::max(std::abs(first), 1.0));
            double candidate = first - offset;
            for (int attempt = 0; attempt < 12 && candidate > safe_shift; ++attempt) {
                auto trial = std::make_unique<detail::ShiftedFactor>(A, candidate);
                if (trial->negative_pivots() == 0) {
                    factor = std::move(trial);
                    safe_shift = candidate;
                    shifted = true;
                    break;
                }
                candidate = 0.5 * (candidate + safe_shift);
            }
        }
        if (newly_locked == 0 && !shifted) basis = std::min<long long>(std::min(2 * basis, cfg.max_basis), n - 1);
    }
    throw NumericalError("shift-invert Lanczos did not converge: locked " + std::to_string(locked.size()) + " of " +
                             std::to_string(k) + " eigenpairs, last residual " + std::to_string(last_residual),
                         locked_values.empty() ? 0.0 : *std::min_element(locked_values.begin(), locked_values.end()));
}

} // namespace wgb::spectral
