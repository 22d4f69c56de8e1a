// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Feasibility of the max-min SINR cone system via a log-barrier method.
//
// With h_u(psi) = (c_u . psi - sqrt(gamma) ||z_u(psi)||) / kappa_u, where
// z_u = [A_u psi; B_u psi; 1] and kappa_u = sum_i c_ui sqrt(budget), the
// system is feasible iff max_{psi in budget set} min_u h_u(psi) >= 0. We
// maximize s subject to h_u >= s, written as the second-order cone
// w_u = c_u . psi / kappa_u - s >= sqrt(gamma) ||z_u|| / kappa_u, with the
// self-concordant barrier
//
//   phi_t = -t s - sum_u log(w_u^2 - gamma ||z_u||^2 / kappa_u^2)
//           - sum_a log(b_a - |psi_a|^2) - sum log psi
//
// and stop as soon as an iterate has min_u h_u > 0 (feasible) or the
// duality-gap bound s + m / t falls below zero (infeasible).

#define EIGEN_DONT_PARALLELIZE
#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "sectormimo/allocation.hpp"

namespace sectormimo {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

class BarrierProblem {
public:
    explicit BarrierProblem(const FeasibilityProblem &p)
        : p_(p), U_(p.n_users()), A_(p.n_arrays()), K_(p.K), apc_(p.arrays_per_cell), n_(p.n_psi()),
          gamma_(p.gamma), kappa_(static_cast<size_t>(U_))
    {
        for (int u = 0; u < U_; ++u) {
            const int j = u / K_;
            double s = 0.0;
            for (int i = 0; i < apc_; ++i)
                s += p.signal(u, i) * std::sqrt(p.budget[static_cast<size_t>(j * apc_ + i)]);
            kappa_[static_cast<size_t>(u)] = s > 0.0 ? s : 1.0;
        }
    }

    int n() const { return n_; }
    // Barrier parameter: 2 per cone, 1 per budget ball, 1 per positivity bound.
    int barrier_terms() const { return 2 * U_ + A_ + n_; }

    // Normalized signal c.psi / kappa and ||z||^2 per user; h = sig - sqrt(gamma) ||z|| / kappa.
    void margins(const VectorXd &psi, VectorXd &h, VectorXd &sig, VectorXd &zsq, VectorXd &sumsq) const
    {
        sumsq.setZero(A_);
        for (int a = 0; a < A_; ++a)
            sumsq[a] = psi.segment(a * K_, K_).squaredNorm();
        h.resize(U_);
        sig.resize(U_);
        zsq.resize(U_);
        for (int u = 0; u < U_; ++u) {
            const int j = u / K_, k = u % K_;
            const double kap = kappa_[static_cast<size_t>(u)];
            double c = 0.0;
            for (int i = 0; i < apc_; ++i)
                c += p_.signal(u, i) * psi[(j * apc_ + i) * K_ + k];
            double q = 1.0;
            for (int l = 0; l < p_.L; ++l) {
                if (l == j)
                    continue;
                double s = 0.0;
                for (int i = 0; i < apc_; ++i) {
                    const int a = l * apc_ + i;
                    s += p_.contamination(u, a) * psi[a * K_ + k];
                }
                q += s * s;
            }
            for (int a = 0; a < A_; ++a)
                q += p_.undirected(u, a) * sumsq[a];
            sig[u] = c / kap;
            zsq[u] = q;
            h[u] = sig[u] - std::sqrt(gamma_ * q) / kap;
        }
    }

    // Barrier value at (psi, s); +inf outside the domain.
    double value(const VectorXd &x, double t) const
    {
        const VectorXd psi = x.head(n_);
        const double s = x[n_];
        if ((psi.array() <= 0.0).any())
            return kInf;
        VectorXd h, sig, zsq, sumsq;
        margins(psi, h, sig, zsq, sumsq);
        double f = -t * s;
        for (int u = 0; u < U_; ++u) {
            const double kap = kappa_[static_cast<size_t>(u)];
            const double w = sig[u] - s;
            const double q = w * w - gamma_ * zsq[u] / (kap * kap);
            if (!(w > 0.0) || !(q > 0.0))
                return kInf;
            f -= std::log(q);
        }
        for (int a = 0; a < A_; ++a) {
            const double q = p_.budget[static_cast<size_t>(a)] - sumsq[a];
            if (!(q > 0.0))
                return kInf;
            f -= std::log(q);
        }
        f -= psi.array().log().sum();
        return f;
    }

    // Cone term per user: -log(w^2 - g2 ||z||^2), w = c.psi / kappa - s,
    // g2 = gamma / kappa^2. With J the (constant) Jacobian of z:
    //   grad q = 2 w grad w - 2 g2 J^T z
    //   hess   = grad q grad q^T / q^2 - (2/q) grad w grad w^T + (2 g2 / q) J^T J
    void derivatives(const VectorXd &x, double t, VectorXd &grad, MatrixXd &hess) const
    {
        const int N = n_ + 1;
        const VectorXd psi = x.head(n_);
        const double s = x[n_];
        VectorXd h, sig, zsq, sumsq;
        margins(psi, h, sig, zsq, sumsq);

        grad.setZero(N);
        hess.setZero(N, N);
        grad[n_] = -t;

        MatrixXd R1 = MatrixXd::Zero(N, U_);
        MatrixXd R2 = MatrixXd::Zero(N, U_);
        VectorXd diag_arr = VectorXd::Zero(A_);
        VectorXd g(n_);

        for (int u = 0; u < U_; ++u) {
            const int j = u / K_, k = u % K_;
            const double kap = kappa_[static_cast<size_t>(u)];
            const double g2 = gamma_ / (kap * kap);
            const double w = sig[u] - s;
            const double q = w * w - g2 * zsq[u];

            // g = J^T z
            for (int a = 0; a < A_; ++a) {
                const double wa = p_.undirected(u, a);
                for (int m = 0; m < K_; ++m)
                    g[a * K_ + m] = wa * psi[a * K_ + m];
            }
            for (int l = 0; l < p_.L; ++l) {
                if (l == j)
                    continue;
                double sl = 0.0;
                for (int i = 0; i < apc_; ++i) {
                    const int a = l * apc_ + i;
                    sl += p_.contamination(u, a) * psi[a * K_ + k];
                }
                for (int i = 0; i < apc_; ++i) {
                    const int a = l * apc_ + i;
                    g[a * K_ + k] += p_.contamination(u, a) * sl;
                }
            }

            auto gw = R2.col(u);
            for (int i = 0; i < apc_; ++i)
                gw[(j * apc_ + i) * K_ + k] = p_.signal(u, i) / kap;
            gw[n_] = -1.0;

            auto gq = R1.col(u);
            gq = (2.0 * w) * gw;
            gq.head(n_) -= (2.0 * g2) * g;
            gq /= q;
            grad -= gq;
            gw *= std::sqrt(2.0 / q);

            const double alpha = 2.0 * g2 / q;
            for (int a = 0; a < A_; ++a)
                diag_arr[a] += alpha * p_.undirected(u, a);
            for (int l = 0; l < p_.L; ++l) {
                if (l == j)
                    continue;
                for (int i1 = 0; i1 < apc_; ++i1) {
                    const int a1 = l * apc_ + i1;
                    const double v1 = alpha * p_.contamination(u, a1);
                    for (int i2 = 0; i2 < apc_; ++i2) {
                        const int a2 = l * apc_ + i2;
                        hess(a1 * K_ + k, a2 * K_ + k) += v1 * p_.contamination(u, a2);
                    }
                }
            }
        }

        hess.selfadjointView<Eigen::Lower>().rankUpdate(R1, 1.0);
        hess.selfadjointView<Eigen::Lower>().rankUpdate(R2, -1.0);

        for (int a = 0; a < A_; ++a) {
            const double q = p_.budget[static_cast<size_t>(a)] - sumsq[a];
            const auto seg = psi.segment(a * K_, K_);
            grad.segment(a * K_, K_) += (2.0 / q) * seg;
            for (int m1 = 0; m1 < K_; ++m1) {
                hess(a * K_ + m1, a * K_ + m1) += 2.0 / q + diag_arr[a];
                for (int m2 = 0; m2 <= m1; ++m2)
                    hess(a * K_ + m1, a * K_ + m2) += 4.0 * seg[m1] * seg[m2] / (q * q);
            }
        }
        for (int i = 0; i < n_; ++i) {
            grad[i] -= 1.0 / psi[i];
            hess(i, i) += 1.0 / (psi[i] * psi[i]);
        }
        // Lower triangle is authoritative; the contamination blocks were written
        // to both halves, so mirror before use.
        hess.triangularView<Eigen::StrictlyUpper>() = hess.transpose().triangularView<Eigen::StrictlyUpper>();
    }

private:
    const FeasibilityProblem &p_;
    int U_, A_, K_, apc_, n_;
    double gamma_;
    std::vector<double> kappa_;
};

}  // namespace

FeasibilityResult check_feasibility_barrier(const FeasibilityProblem &problem, const SolverOptions &opts)
{
    FeasibilityResult result;
    const int n = problem.n_psi();
    if (problem.gamma <= 0.0) {
        // Zero power already meets a zero target.
        result.point = make_feasible_point(problem, std::vector<double>(static_cast<size_t>(n), 0.0));
        result.residual = constraint_residual(problem, *result.point);
        return result;
    }

    BarrierProblem bp(problem);
    const int N = n + 1;
    const double m = bp.barrier_terms();

    VectorXd x(N);
    VectorXd h, sig, zsq, sumsq;
    for (int a = 0; a < problem.n_arrays(); ++a)
        x.segment(a * problem.K, problem.K)
            .setConstant(std::sqrt(0.5 * problem.budget[static_cast<size_t>(a)] / problem.K));
    bp.margins(x.head(n), h, sig, zsq, sumsq);
    x[n] = h.minCoeff() - 1.0;
    double t = 1.0;

    auto feasible_now = [&](const VectorXd &xx) {
        bp.margins(xx.head(n), h, sig, zsq, sumsq);
        return h.minCoeff() > 0.0;
    };
    auto accept = [&](const VectorXd &xx) {
        FeasiblePoint pt = make_feasible_point(problem, std::vector<double>(xx.data(), xx.data() + n));
        const double res = constraint_residual(problem, pt);
        if (res <= opts.feas_tol) {
            result.point = std::move(pt);
            result.residual = res;
            return true;
        }
        return false;
    };

    if (feasible_now(x) && accept(x))
        return result;

    VectorXd grad;
    MatrixXd hess;
    constexpr double kMu = 16.0;
    constexpr double kCenterTol = 1e-7;
    constexpr double kGapFloor = 1e-13;

    for (;;) {
        // Centering.
        for (;;) {
            if (result.newton_iterations >= opts.max_newton)
                return result;  // capped: reported as infeasible
            bp.derivatives(x, t, grad, hess);
            if (!grad.allFinite() || !hess.allFinite())
                throw NumericalBreakdown("check_feasibility_barrier: non-finite barrier derivatives");

            Eigen::LLT<MatrixXd> llt(hess);
            VectorXd dx;
            if (llt.info() == Eigen::Success) {
                dx = -llt.solve(grad);
            } else {
                const double ridge = 1e-12 * hess.diagonal().cwiseAbs().maxCoeff() + 1e-300;
                MatrixXd reg = hess;
                reg.diagonal().array() += ridge;
                dx = -reg.ldlt().solve(grad);
            }
            if (!dx.allFinite())
                throw NumericalBreakdown("check_feasibility_barrier: non-finite Newton step");
            const double decrement = -grad.dot(dx);
            ++result.newton_iterations;
            if (decrement < 0.0 || decrement * 0.5 <= kCenterTol)
                break;

            const double f0 = bp.value(x, t);
            double step = 1.0;
            VectorXd xn = x + dx;
            double f1 = bp.value(xn, t);
            int backtracks = 0;
            while (!(f1 <= f0 - 0.01 * step * decrement) && backtracks < 80) {
                step *= 0.5;
                xn = x + step * dx;
                f1 = bp.value(xn, t);
                ++backtracks;
            }
            if (!std::isfinite(f1) || f1 > f0)
                break;  // no progress possible at this t
            x = xn;
            if (feasible_now(x) && accept(x))
                return result;
        }

        if (x[n] + m / t < 0.0) {
            result.certified = true;
            return result;
        }
        if (m / t < kGapFloor)
            return result;
        t *= kMu;
    }
}

}  // namespace sectormimo
