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
//
// Primal-dual interior-point method (Nesterov-Todd scaling, Mehrotra
// predictor-corrector) for the max-min SINR feasibility system
//
//   maximize s  subject to
//     (c_u . psi - kappa_u s) / sqrt(gamma) >= || (C_u psi_k, sqrt(W_u) r, 1) ||
//     r_a >= ||psi_a||,   r_a <= sqrt(b_a),   psi >= 0
//
// in the standard form  min c^T x  s.t.  G x + s = h,  s in K,  with
// x = (psi, r, s). The system is feasible iff the optimum is >= 0; the loop
// returns as soon as an iterate proves the sign either way.

#define EIGEN_DONT_PARALLELIZE
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "sectormimo/allocation.hpp"

namespace sectormimo {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Soc {
    int offset = 0;          // first slack row
    int dim = 0;
    std::vector<int> cols;   // x indices with nonzero G entries
    MatrixXd G;              // dim x cols.size()
    MatrixXd GtG;
};

struct Scaling {
    VectorXd d;                     // LP: sqrt(s / z)
    std::vector<VectorXd> wbar;     // SOC: unit-determinant scaling point
    std::vector<double> beta;
};

class ConeProgram {
public:
    explicit ConeProgram(const FeasibilityProblem &p)
        : p_(p), n_(p.n_psi()), A_(p.n_arrays()), U_(p.n_users()), K_(p.K)
    {
        nx_ = n_ + A_ + 1;
        nlp_ = n_ + A_;
        const double sg = std::sqrt(p.gamma);
        kappa_.resize(static_cast<size_t>(U_));
        const int apc = p.arrays_per_cell;

        int off = nlp_;
        for (int a = 0; a < A_; ++a) {
            Soc c;
            c.offset = off;
            c.dim = K_ + 1;
            c.cols.push_back(r_index(a));
            for (int k = 0; k < K_; ++k)
                c.cols.push_back(a * K_ + k);
            c.G = -MatrixXd::Identity(c.dim, c.dim);
            off += c.dim;
            socs_.push_back(std::move(c));
        }
        for (int u = 0; u < U_; ++u) {
            const int j = u / K_, k = u % K_;
            double kap = 0.0;
            for (int i = 0; i < apc; ++i)
                kap += p.signal(u, i) * std::sqrt(p.budget[static_cast<size_t>(j * apc + i)]);
            kap = kap > 0.0 ? kap : 1.0;
            kappa_[static_cast<size_t>(u)] = kap;

            Soc c;
            c.offset = off;
            c.dim = 1 + (p.L - 1) + A_ + 1;
            for (int i = 0; i < apc; ++i)
                c.cols.push_back((j * apc + i) * K_ + k);
            for (int l = 0; l < p.L; ++l)
                if (l != j)
                    for (int i = 0; i < apc; ++i)
                        c.cols.push_back((l * apc + i) * K_ + k);
            const int r0 = static_cast<int>(c.cols.size());
            for (int a = 0; a < A_; ++a)
                c.cols.push_back(r_index(a));
            c.cols.push_back(s_index());
            c.G = MatrixXd::Zero(c.dim, static_cast<Eigen::Index>(c.cols.size()));

            for (int i = 0; i < apc; ++i)
                c.G(0, i) = -p.signal(u, i) / sg;
            c.G(0, static_cast<Eigen::Index>(c.cols.size()) - 1) = kap / sg;
            int row = 1, col = apc;
            for (int l = 0; l < p.L; ++l) {
                if (l == j)
                    continue;
                for (int i = 0; i < apc; ++i)
                    c.G(row, col++) = -p.contamination(u, l * apc + i);
                ++row;
            }
            for (int a = 0; a < A_; ++a)
                c.G(row++, r0 + a) = -std::sqrt(p.undirected(u, a));
            off += c.dim;
            socs_.push_back(std::move(c));
        }
        ns_ = off;
        for (auto &c : socs_)
            c.GtG = c.G.transpose() * c.G;

        h_ = VectorXd::Zero(ns_);
        for (int a = 0; a < A_; ++a)
            h_[n_ + a] = std::sqrt(p.budget[static_cast<size_t>(a)]);
        for (int u = 0; u < U_; ++u) {
            const Soc &c = socs_[static_cast<size_t>(A_ + u)];
            h_[c.offset + c.dim - 1] = 1.0;
        }
        cost_ = VectorXd::Zero(nx_);
        cost_[s_index()] = -1.0;
        degree_ = nlp_ + static_cast<int>(socs_.size());
    }

    int nx() const { return nx_; }
    int ns() const { return ns_; }
    int n_psi() const { return n_; }
    int degree() const { return degree_; }
    int r_index(int a) const { return n_ + a; }
    int s_index() const { return n_ + A_; }
    const VectorXd &h() const { return h_; }
    const VectorXd &cost() const { return cost_; }
    double kappa(int u) const { return kappa_[static_cast<size_t>(u)]; }

    VectorXd G_mul(const VectorXd &x) const
    {
        VectorXd y(ns_);
        for (int i = 0; i < n_; ++i)
            y[i] = -x[i];
        for (int a = 0; a < A_; ++a)
            y[n_ + a] = x[r_index(a)];
        for (const auto &c : socs_) {
            VectorXd xc(static_cast<Eigen::Index>(c.cols.size()));
            for (size_t q = 0; q < c.cols.size(); ++q)
                xc[static_cast<Eigen::Index>(q)] = x[c.cols[q]];
            y.segment(c.offset, c.dim) = c.G * xc;
        }
        return y;
    }

    VectorXd Gt_mul(const VectorXd &z) const
    {
        VectorXd x = VectorXd::Zero(nx_);
        for (int i = 0; i < n_; ++i)
            x[i] -= z[i];
        for (int a = 0; a < A_; ++a)
            x[r_index(a)] += z[n_ + a];
        for (const auto &c : socs_) {
            const VectorXd v = c.G.transpose() * z.segment(c.offset, c.dim);
            for (size_t q = 0; q < c.cols.size(); ++q)
                x[c.cols[q]] += v[static_cast<Eigen::Index>(q)];
        }
        return x;
    }

    // ---- cone algebra ----------------------------------------------------

    VectorXd identity() const
    {
        VectorXd e = VectorXd::Zero(ns_);
        e.head(nlp_).setOnes();
        for (const auto &c : socs_)
            e[c.offset] = 1.0;
        return e;
    }

    static double soc_det(const VectorXd &v)
    {
        const double t = v.tail(v.size() - 1).norm();
        return (v[0] - t) * (v[0] + t);
    }

    bool interior(const VectorXd &v) const
    {
        for (int i = 0; i < nlp_; ++i)
            if (!(v[i] > 0.0))
                return false;
        for (const auto &c : socs_) {
            const VectorXd b = v.segment(c.offset, c.dim);
            if (!(b[0] > 0.0) || !(soc_det(b) > 0.0))
                return false;
        }
        return true;
    }

    Scaling scaling(const VectorXd &s, const VectorXd &z) const
    {
        Scaling w;
        w.d = (s.head(nlp_).array() / z.head(nlp_).array()).sqrt();
        for (const auto &c : socs_) {
            VectorXd sb = s.segment(c.offset, c.dim), zb = z.segment(c.offset, c.dim);
            const double sn = std::sqrt(soc_det(sb)), zn = std::sqrt(soc_det(zb));
            sb /= sn;
            zb /= zn;
            const double g = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
            VectorXd wb = sb;
            wb[0] += zb[0];
            wb.tail(c.dim - 1) -= zb.tail(c.dim - 1);
            wb /= 2.0 * g;
            // wb is the NT point of the squared scaling; W itself uses its
            // Jordan square root.
            const double r = std::sqrt(2.0 * (wb[0] + 1.0));
            wb[0] += 1.0;
            wb /= r;
            w.wbar.push_back(std::move(wb));
            w.beta.push_back(std::sqrt(sn / zn));
        }
        return w;
    }

    VectorXd apply_W(const Scaling &w, const VectorXd &v) const
    {
        VectorXd y(ns_);
        y.head(nlp_) = w.d.cwiseProduct(v.head(nlp_));
        for (size_t b = 0; b < socs_.size(); ++b) {
            const Soc &c = socs_[b];
            const VectorXd &wb = w.wbar[b];
            const auto vb = v.segment(c.offset, c.dim);
            auto yb = y.segment(c.offset, c.dim);
            yb = (2.0 * wb.dot(vb)) * wb;
            yb[0] -= vb[0];
            yb.tail(c.dim - 1) += vb.tail(c.dim - 1);
            yb *= w.beta[b];
        }
        return y;
    }

    VectorXd apply_Winv(const Scaling &w, const VectorXd &v) const
    {
        VectorXd y(ns_);
        y.head(nlp_) = v.head(nlp_).cwiseQuotient(w.d);
        for (size_t b = 0; b < socs_.size(); ++b) {
            const Soc &c = socs_[b];
            const VectorXd &wb = w.wbar[b];
            const auto vb = v.segment(c.offset, c.dim);
            // (2 J w w^T J - J) v
            const double jwv = wb[0] * vb[0] - wb.tail(c.dim - 1).dot(vb.tail(c.dim - 1));
            auto yb = y.segment(c.offset, c.dim);
            yb[0] = 2.0 * jwv * wb[0] - vb[0];
            yb.tail(c.dim - 1) = (-2.0 * jwv) * wb.tail(c.dim - 1) + vb.tail(c.dim - 1);
            yb /= w.beta[b];
        }
        return y;
    }

    VectorXd circ(const VectorXd &u, const VectorXd &v) const
    {
        VectorXd y(ns_);
        y.head(nlp_) = u.head(nlp_).cwiseProduct(v.head(nlp_));
        for (const auto &c : socs_) {
            const auto ub = u.segment(c.offset, c.dim), vb = v.segment(c.offset, c.dim);
            y[c.offset] = ub.dot(vb);
            y.segment(c.offset + 1, c.dim - 1) = ub[0] * vb.tail(c.dim - 1) + vb[0] * ub.tail(c.dim - 1);
        }
        return y;
    }

    // Solves lambda o x = d.
    VectorXd circ_solve(const VectorXd &lambda, const VectorXd &d) const
    {
        VectorXd x(ns_);
        x.head(nlp_) = d.head(nlp_).cwiseQuotient(lambda.head(nlp_));
        for (const auto &c : socs_) {
            const auto lb = lambda.segment(c.offset, c.dim), db = d.segment(c.offset, c.dim);
            const double x0 = (lb[0] * db[0] - lb.tail(c.dim - 1).dot(db.tail(c.dim - 1))) / soc_det(lb);
            x[c.offset] = x0;
            x.segment(c.offset + 1, c.dim - 1) = (db.tail(c.dim - 1) - x0 * lb.tail(c.dim - 1)) / lb[0];
        }
        return x;
    }

    // Largest alpha with v + alpha dv in the cone (may be +inf).
    double max_step(const VectorXd &v, const VectorXd &dv) const
    {
        double alpha = kInf;
        for (int i = 0; i < nlp_; ++i)
            if (dv[i] < 0.0)
                alpha = std::min(alpha, -v[i] / dv[i]);
        for (const auto &c : socs_) {
            const auto x = v.segment(c.offset, c.dim), d = dv.segment(c.offset, c.dim);
            const double qa = d[0] * d[0] - d.tail(c.dim - 1).squaredNorm();
            const double qb = x[0] * d[0] - x.tail(c.dim - 1).dot(d.tail(c.dim - 1));
            const double qc = soc_det(VectorXd(x));
            // q(alpha) = qa alpha^2 + 2 qb alpha + qc, q(0) > 0.
            double root = kInf;
            if (qa == 0.0) {
                if (qb < 0.0)
                    root = -qc / (2.0 * qb);
            } else {
                const double disc = qb * qb - qa * qc;
                if (disc >= 0.0) {
                    const double sq = std::sqrt(disc);
                    const double q = -(qb + std::copysign(sq, qb));
                    for (double r : {q / qa, q != 0.0 ? qc / q : kInf})
                        if (r > 0.0)
                            root = std::min(root, r);
                }
            }
            if (d[0] < 0.0)
                root = std::min(root, -x[0] / d[0]);
            alpha = std::min(alpha, root);
        }
        return alpha;
    }

    // H = G^T W^{-2} G, lower triangle.
    void normal_matrix(const Scaling &w, MatrixXd &H) const
    {
        H.setZero(nx_, nx_);
        for (int i = 0; i < n_; ++i)
            H(i, i) += 1.0 / (w.d[i] * w.d[i]);
        for (int a = 0; a < A_; ++a)
            H(r_index(a), r_index(a)) += 1.0 / (w.d[n_ + a] * w.d[n_ + a]);
        for (size_t b = 0; b < socs_.size(); ++b) {
            const Soc &c = socs_[b];
            const VectorXd &wb = w.wbar[b];
            VectorXd jw = -wb;
            jw[0] = wb[0];
            const VectorXd p = c.G.transpose() * jw;
            const VectorXd q = c.G.transpose() * wb;
            const double wn = wb.norm();
            const VectorXd av = (2.0 * wn) * p - q / wn;
            const double ib2 = 1.0 / (w.beta[b] * w.beta[b]);
            const auto m = static_cast<Eigen::Index>(c.cols.size());
            for (Eigen::Index i = 0; i < m; ++i) {
                const int gi = c.cols[static_cast<size_t>(i)];
                for (Eigen::Index k = 0; k < m; ++k) {
                    const int gk = c.cols[static_cast<size_t>(k)];
                    if (gk > gi)
                        continue;
                    H(gi, gk) += ib2 * (c.GtG(i, k) + av[i] * av[k] - q[i] * q[k] / (wn * wn));
                }
            }
        }
    }

    // Min over users of the exact normalized margin at psi (r taken tight).
    std::vector<double> witness_psi(const VectorXd &x) const
    {
        std::vector<double> psi(static_cast<size_t>(n_));
        for (int i = 0; i < n_; ++i)
            psi[static_cast<size_t>(i)] = std::max(x[i], 0.0);
        for (int a = 0; a < A_; ++a) {
            double q = 0.0;
            for (int k = 0; k < K_; ++k)
                q += psi[static_cast<size_t>(a * K_ + k)] * psi[static_cast<size_t>(a * K_ + k)];
            const double b = p_.budget[static_cast<size_t>(a)];
            if (q > b) {
                const double f = std::sqrt(b / q);
                for (int k = 0; k < K_; ++k)
                    psi[static_cast<size_t>(a * K_ + k)] *= f;
            }
        }
        return psi;
    }

private:
    const FeasibilityProblem &p_;
    int n_, A_, U_, K_;
    int nx_ = 0, nlp_ = 0, ns_ = 0, degree_ = 0;
    std::vector<Soc> socs_;
    std::vector<double> kappa_;
    VectorXd h_, cost_;
};

bool strictly_interior(const FeasibilityProblem &p, const std::vector<double> &psi)
{
    if (static_cast<int>(psi.size()) != p.n_psi())
        return false;
    for (int a = 0; a < p.n_arrays(); ++a) {
        double q = 0.0;
        for (int k = 0; k < p.K; ++k) {
            const double v = psi[static_cast<size_t>(a * p.K + k)];
            if (!(v > 0.0))
                return false;
            q += v * v;
        }
        if (!(q < p.budget[static_cast<size_t>(a)]))
            return false;
    }
    return true;
}

}  // namespace

FeasibilityResult check_feasibility(const FeasibilityProblem &problem, const SolverOptions &opts,
                                    const std::vector<double> *warm_start)
{
    FeasibilityResult result;
    const int n = problem.n_psi();
    if (problem.gamma <= 0.0) {
        // Zero power already meets a zero target.
        result.point = make_feasible_point(problem, std::vector<double>(static_cast<size_t>(n), 0.0));
        result.residual = constraint_residual(problem, *result.point);
        return result;
    }

    const ConeProgram cp(problem);
    const int A = problem.n_arrays(), K = problem.K;

    auto try_accept = [&](std::vector<double> psi) {
        FeasiblePoint pt = make_feasible_point(problem, std::move(psi));
        const auto s = problem_sinr(problem, pt.psi);
        if (*std::min_element(s.begin(), s.end()) < problem.gamma)
            return false;
        const double res = constraint_residual(problem, pt);
        if (res > opts.feas_tol)
            return false;
        result.point = std::move(pt);
        result.residual = res;
        return true;
    };

    // Strictly feasible primal start.
    VectorXd x = VectorXd::Zero(cp.nx());
    if (warm_start && strictly_interior(problem, *warm_start)) {
        for (int i = 0; i < n; ++i)
            x[i] = (*warm_start)[static_cast<size_t>(i)];
        if (try_accept(*warm_start))
            return result;
    } else {
        for (int a = 0; a < A; ++a)
            x.segment(a * K, K).setConstant(std::sqrt(0.5 * problem.budget[static_cast<size_t>(a)] / K));
    }
    for (int a = 0; a < A; ++a) {
        const double lo = x.segment(a * K, K).norm(), hi = std::sqrt(problem.budget[static_cast<size_t>(a)]);
        x[cp.r_index(a)] = 0.5 * (lo + hi);
    }
    {
        // Choose s so every user cone has unit slack.
        x[cp.s_index()] = 0.0;
        const VectorXd v = cp.h() - cp.G_mul(x);
        const double sg = std::sqrt(problem.gamma);
        double s0 = kInf;
        for (int u = 0; u < problem.n_users(); ++u) {
            const int off = cp.ns() - (problem.n_users() - u) * (1 + (problem.L - 1) + A + 1);
            const int dim = 1 + (problem.L - 1) + A + 1;
            const double lead = v[off], rest = v.segment(off + 1, dim - 1).norm();
            s0 = std::min(s0, (lead - rest - 1.0) * sg / cp.kappa(u));
        }
        x[cp.s_index()] = s0;
    }
    VectorXd s = cp.h() - cp.G_mul(x);
    VectorXd z = cp.identity();
    if (!cp.interior(s))
        throw NumericalBreakdown("check_feasibility: start point is not interior");

    // Bound used by the infeasibility certificate: |psi_i|, r_a <= sqrt(b_a).
    VectorXd xbound = VectorXd::Zero(cp.nx());
    for (int a = 0; a < A; ++a) {
        const double sb = std::sqrt(problem.budget[static_cast<size_t>(a)]);
        xbound.segment(a * K, K).setConstant(sb);
        xbound[cp.r_index(a)] = sb;
    }

    MatrixXd H;
    const VectorXd e = cp.identity();
    const double deg = cp.degree();

    for (int iter = 0; iter < opts.max_newton; ++iter) {
        const VectorXd rx = cp.Gt_mul(z) + cp.cost();
        const VectorXd rz = cp.G_mul(x) + s - cp.h();
        const double mu = s.dot(z) / deg;

        // Feasible: the primal iterate already clears every cone with s > 0.
        if (x[cp.s_index()] > 0.0 && try_accept(cp.witness_psi(x)))
            return result;
        // Infeasible: weak duality bounds the optimal s below zero.
        {
            const double denom = 1.0 + rx[cp.s_index()];
            double num = cp.h().dot(z);
            for (int i = 0; i < cp.s_index(); ++i)
                num += std::abs(rx[i]) * xbound[i];
            if (denom > 0.0 && num < 0.0 && rz.lpNorm<Eigen::Infinity>() < 1e-6) {
                result.certified = true;
                return result;
            }
        }
        if (mu < 1e-14 && rx.lpNorm<Eigen::Infinity>() < 1e-12)
            return result;  // optimum numerically at zero: undecided, reported infeasible

        const Scaling w = cp.scaling(s, z);
        const VectorXd lambda = cp.apply_W(w, z);
        cp.normal_matrix(w, H);
        Eigen::LLT<MatrixXd> llt(H);
        if (llt.info() != Eigen::Success) {
            MatrixXd reg = H;
            reg.diagonal().array() += 1e-14 * H.diagonal().cwiseAbs().maxCoeff();
            llt.compute(reg);
            if (llt.info() != Eigen::Success)
                throw NumericalBreakdown("check_feasibility: normal matrix is not positive definite");
        }
        ++result.newton_iterations;

        auto solve = [&](const VectorXd &bx, const VectorXd &bz, const VectorXd &ds, VectorXd &dx, VectorXd &dz,
                         VectorXd &dsl) {
            const VectorXd u = cp.circ_solve(lambda, ds);
            const VectorXd rhs = bx + cp.Gt_mul(cp.apply_Winv(w, cp.apply_Winv(w, bz) - u));
            dx = llt.solve(rhs);
            dz = cp.apply_Winv(w, cp.apply_Winv(w, cp.G_mul(dx) - bz) + u);
            dsl = cp.apply_W(w, u - cp.apply_W(w, dz));
        };

        VectorXd dxa, dza, dsa;
        const VectorXd ll = cp.circ(lambda, lambda);
        solve(-rx, -rz, -ll, dxa, dza, dsa);
        const double aa = std::min(1.0, std::min(cp.max_step(s, dsa), cp.max_step(z, dza)));
        const double mu_aff = (s + aa * dsa).dot(z + aa * dza) / deg;
        const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

        const VectorXd corr = cp.circ(cp.apply_Winv(w, dsa), cp.apply_W(w, dza));
        VectorXd dx, dz, dsl;
        solve(-rx, -rz, -ll - corr + (sigma * mu) * e, dx, dz, dsl);
        if (!dx.allFinite() || !dz.allFinite() || !dsl.allFinite())
            throw NumericalBreakdown("check_feasibility: non-finite search direction");
        const double amax = std::min(cp.max_step(s, dsl), cp.max_step(z, dz));
        const double alpha = std::min(1.0, 0.99 * amax);
        x += alpha * dx;
        s += alpha * dsl;
        z += alpha * dz;
    }
    return result;  // capped: reported as infeasible
}

}  // namespace sectormimo
