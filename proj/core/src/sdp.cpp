// SPDX-License-Identifier: Apache-2.0
//
// txbeam - transmit beamspace design and direction finding for colocated MIMO radar
// Copyright (C) 2026 txbeam contributors
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

#include "txbeam/sdp.hpp"

#include <cmath>
#include <stdexcept>

namespace txbeam
{

SdpProblem build_sdp(const TransmitArray &arr, const SectorSpec &spec, const AngularGrid &grid, arma::uword waveforms,
                     double total_power)
{
    if (waveforms < 2 || waveforms % 2 != 0)
        throw std::invalid_argument("build_sdp: waveform count must be even and at least 2");
    if (waveforms > arr.elements)
        throw std::invalid_argument("build_sdp: more waveforms than antennas");
    if (!(total_power > 0.0))
        throw std::invalid_argument("build_sdp: total power must be positive");

    SdpProblem p;
    p.array = arr;
    p.spec = spec;
    p.grid = grid;
    p.pairs = waveforms / 2;
    p.total_power = total_power;
    p.d = beam_response_matrix(arr, grid);

    const double level = spec.resolved_level(total_power, arr.elements);
    const arma::uvec in = grid.mask(spec);
    if (in.n_elem == 0)
        throw std::invalid_argument("build_sdp: no grid point falls inside the sector");
    p.half_level.zeros(grid.points());
    p.half_level(in).fill(0.5 * level);

    const arma::uword m = arr.elements;
    const arma::uword ne = (m + 1) / 2;
    p.eq_rhs.set_size(ne);
    for (arma::uword i = 0; i < ne; i++)
    {
        const arma::uword mirror = m - 1 - i;
        if (mirror == i)
        {
            // middle antenna of an odd array: both half-matrices contribute
            // the same magnitude, so the free half carries half the share
            p.eq_diag.push_back(arma::uvec{i});
            p.eq_rhs[i] = 0.5 * total_power / double(m);
        }
        else
        {
            p.eq_diag.push_back(arma::uvec{i, mirror});
            p.eq_rhs[i] = total_power / double(m);
        }
    }
    return p;
}

arma::vec relaxed_pattern(const SdpProblem &prob, const std::vector<arma::cx_mat> &x)
{
    if (x.size() != prob.pairs)
        throw std::invalid_argument("relaxed_pattern: block count mismatch");
    arma::vec acc(prob.grid.points(), arma::fill::zeros);
    for (const auto &xk : x)
    {
        const arma::cx_mat xd = xk * prob.d;
        acc += arma::real(arma::sum(arma::conj(prob.d) % xd, 0)).t();
    }
    return acc;
}

double relaxed_objective(const SdpProblem &prob, const std::vector<arma::cx_mat> &x)
{
    return arma::abs(prob.half_level - relaxed_pattern(prob, x)).max();
}

double equality_residual(const SdpProblem &prob, const std::vector<arma::cx_mat> &x)
{
    double worst = 0.0;
    for (arma::uword i = 0; i < prob.eq_rhs.n_elem; i++)
    {
        double v = 0.0;
        for (const auto &xk : x)
            for (arma::uword r : prob.eq_diag[i])
                v += xk(r, r).real();
        worst = std::max(worst, std::abs(v - prob.eq_rhs[i]));
    }
    return worst;
}

namespace
{

// Iterate of the product cone: Hermitian blocks plus the nonnegative part
// (two slack groups and the epigraph variable at the end)
struct Iterate
{
    std::vector<arma::cx_mat> mats;
    arma::vec lin;
};

double cone_dot(const Iterate &a, const Iterate &b)
{
    double v = arma::dot(a.lin, b.lin);
    for (size_t k = 0; k < a.mats.size(); k++)
        v += std::real(arma::cdot(arma::vectorise(a.mats[k]), arma::vectorise(b.mats[k])));
    return v;
}

double cone_norm(const Iterate &a)
{
    double v = arma::dot(a.lin, a.lin);
    for (const auto &m : a.mats)
        v += std::norm(arma::norm(m, "fro"));
    return std::sqrt(v);
}

arma::cx_mat herm_part(const arma::cx_mat &a)
{
    return 0.5 * (a + a.t());
}

// Largest t with x + t*dx >= 0 on the product cone (inf when unconstrained)
double max_step(const Iterate &x, const Iterate &dx)
{
    double t = arma::datum::inf;
    for (arma::uword i = 0; i < x.lin.n_elem; i++)
        if (dx.lin[i] < 0.0)
            t = std::min(t, -x.lin[i] / dx.lin[i]);
    for (size_t k = 0; k < x.mats.size(); k++)
    {
        arma::vec s;
        arma::cx_mat v;
        arma::eig_sym(s, v, herm_part(x.mats[k]));
        const double floor = std::max(s.max(), 1.0) * 1e-14;
        const arma::vec isq = 1.0 / arma::sqrt(arma::clamp(s, floor, arma::datum::inf));
        const arma::cx_mat w = v * arma::diagmat(isq); // x^{-1/2} columns
        const arma::cx_mat m = herm_part(w.t() * dx.mats[k] * w);
        const double lmin = arma::eig_sym(m).min();
        if (lmin < 0.0)
            t = std::min(t, -1.0 / lmin);
    }
    return t;
}

} // namespace

SdpSolution solve_sdp(const SdpProblem &prob, const SdpOptions &opts)
{
    const arma::uword m_ant = prob.antennas();
    const arma::uword q = prob.grid.points();
    const arma::uword ne = prob.equality_rows();
    const arma::uword m_rows = 2 * q + ne;    // constraint count
    const arma::uword n_lin = 2 * q + 1;      // slack pair groups + epigraph
    const arma::uword dslot = 2 * q;          // epigraph index within lin
    const arma::uword pairs = prob.pairs;
    const double nu = double(pairs * m_ant + n_lin); // total cone dimension
    const arma::cx_mat &d = prob.d;

    arma::vec b(m_rows);
    b.subvec(0, q - 1) = prob.half_level;
    b.subvec(q, 2 * q - 1) = -prob.half_level;
    b.subvec(2 * q, m_rows - 1) = prob.eq_rhs;
    const double bnorm = arma::norm(b);

    // apply A to a general (not necessarily Hermitian) cone element
    auto a_op = [&](const std::vector<arma::cx_mat> &mats, const arma::vec &lin) {
        arma::vec psum(q, arma::fill::zeros);
        arma::vec eq(ne, arma::fill::zeros);
        for (arma::uword k = 0; k < pairs; k++)
        {
            const arma::cx_mat md = mats[k] * d;
            psum += arma::real(arma::sum(arma::conj(d) % md, 0)).t();
            for (arma::uword i = 0; i < ne; i++)
                for (arma::uword r : prob.eq_diag[i])
                    eq[i] += mats[k](r, r).real();
        }
        arma::vec out(m_rows);
        out.subvec(0, q - 1) = psum + lin.subvec(0, q - 1) - lin[dslot];
        out.subvec(q, 2 * q - 1) = -psum + lin.subvec(q, 2 * q - 1) - lin[dslot];
        out.subvec(2 * q, m_rows - 1) = eq;
        return out;
    };

    // adjoint of A; the matrix part is the same for every block
    auto at_op = [&](const arma::vec &y) {
        Iterate out;
        const arma::vec g = y.subvec(0, q - 1) - y.subvec(q, 2 * q - 1);
        arma::cx_mat common = d * arma::diagmat(arma::cx_vec(g, arma::vec(q, arma::fill::zeros))) * d.t();
        common = herm_part(common);
        for (arma::uword i = 0; i < ne; i++)
            for (arma::uword r : prob.eq_diag[i])
                common(r, r) += y[2 * q + i];
        out.mats.assign(pairs, common);
        out.lin.set_size(n_lin);
        out.lin.subvec(0, q - 1) = y.subvec(0, q - 1);
        out.lin.subvec(q, 2 * q - 1) = y.subvec(q, 2 * q - 1);
        out.lin[dslot] = -arma::accu(y.subvec(0, 2 * q - 1));
        return out;
    };

    // primal start: interior, exactly feasible
    Iterate x;
    x.mats.assign(pairs, arma::cx_mat(m_ant, m_ant, arma::fill::eye) * (prob.total_power / double(2 * pairs * m_ant)));
    x.lin.set_size(n_lin);
    {
        arma::vec psum(q, arma::fill::zeros);
        for (arma::uword k = 0; k < pairs; k++)
        {
            const arma::cx_mat md = x.mats[k] * d;
            psum += arma::real(arma::sum(arma::conj(d) % md, 0)).t();
        }
        const double d0 = 2.0 * arma::abs(prob.half_level - psum).max() + 1.0;
        x.lin[dslot] = d0;
        x.lin.subvec(0, q - 1) = prob.half_level - psum + d0;
        x.lin.subvec(q, 2 * q - 1) = psum - prob.half_level + d0;
    }

    // dual start
    arma::vec y(m_rows, arma::fill::zeros);
    Iterate z;
    const double eta = std::max(1.0, prob.half_level.max());
    z.mats.assign(pairs, arma::cx_mat(m_ant, m_ant, arma::fill::eye) * eta);
    z.lin.set_size(n_lin);
    z.lin.fill(eta);

    SdpSolution sol;
    sol.x = x.mats;

    auto dual_residual = [&](const arma::vec &yy, const Iterate &zz) {
        // R_d = C - Z - At(y); C is the epigraph objective
        Iterate rd = at_op(yy);
        for (arma::uword k = 0; k < pairs; k++)
            rd.mats[k] = -rd.mats[k] - zz.mats[k];
        rd.lin = -rd.lin - zz.lin;
        rd.lin[dslot] += 1.0;
        return rd;
    };

    for (arma::uword iter = 0; iter < opts.max_iters; iter++)
    {
        // inverses of the dual blocks
        std::vector<arma::cx_mat> zi(pairs);
        for (arma::uword k = 0; k < pairs; k++)
        {
            arma::cx_mat zik;
            if (!arma::inv_sympd(zik, herm_part(z.mats[k])))
            {
                arma::cx_mat reg = herm_part(z.mats[k]);
                reg.diag() += arma::cx_double(1e-13 * std::abs(arma::trace(reg)) + 1e-300, 0.0);
                if (!arma::inv_sympd(zik, reg))
                    return sol; // converged stays false
            }
            zi[k] = zik;
        }
        const arma::vec zlin_i = 1.0 / z.lin;

        const double mu = cone_dot(x, z) / nu;
        const arma::vec rp = b - a_op(x.mats, x.lin);
        const Iterate rd = dual_residual(y, z);

        const double pobj = x.lin[dslot];
        const double dobj = arma::dot(b, y);
        sol.delta = pobj;
        sol.dual_objective = dobj;
        sol.primal_infeasibility = arma::norm(rp) / (1.0 + bnorm);
        sol.dual_infeasibility = cone_norm(rd) / 2.0;
        sol.relative_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        sol.iterations = iter;
        for (arma::uword k = 0; k < pairs; k++)
            sol.x[k] = herm_part(x.mats[k]);

        if (sol.primal_infeasibility <= opts.tol && sol.dual_infeasibility <= opts.tol &&
            sol.relative_gap <= opts.tol)
        {
            sol.converged = true;
            return sol;
        }
        if (mu < 1e-300)
            return sol;

        // Schur complement of the normal equations, built from the
        // rank-one structure of the pattern constraints:
        //   tr(D_q X D_p Z^-1) = (d_q^H X d_p) (d_p^H Z^-1 d_q)
        arma::mat spp(q, q, arma::fill::zeros);
        arma::mat cpe(q, ne, arma::fill::zeros);
        arma::mat see(ne, ne, arma::fill::zeros);
        std::vector<arma::cx_mat> xd(pairs), zid(pairs);
        for (arma::uword k = 0; k < pairs; k++)
        {
            xd[k] = x.mats[k] * d;
            zid[k] = zi[k] * d;
            const arma::cx_mat pk = d.t() * xd[k];
            const arma::cx_mat nk = d.t() * zid[k];
            spp += arma::real(pk % arma::conj(nk));
            const arma::cx_mat t = arma::conj(xd[k]) % zid[k];
            for (arma::uword i = 0; i < ne; i++)
                for (arma::uword r : prob.eq_diag[i])
                    cpe.col(i) += arma::real(t.row(r)).t();
            for (arma::uword i = 0; i < ne; i++)
                for (arma::uword j = 0; j < ne; j++)
                {
                    double v = 0.0;
                    for (arma::uword r : prob.eq_diag[i])
                        for (arma::uword s : prob.eq_diag[j])
                            v += std::real(x.mats[k](r, s) * std::conj(zi[k](r, s)));
                    see(i, j) += v;
                }
        }

        arma::mat schur(m_rows, m_rows);
        const double dd = x.lin[dslot] / z.lin[dslot];
        schur.submat(0, 0, q - 1, q - 1) = spp + dd;
        schur.submat(0, q, q - 1, 2 * q - 1) = -spp + dd;
        schur.submat(q, 0, 2 * q - 1, q - 1) = -spp + dd;
        schur.submat(q, q, 2 * q - 1, 2 * q - 1) = spp + dd;
        schur.submat(0, 2 * q, q - 1, m_rows - 1) = cpe;
        schur.submat(q, 2 * q, 2 * q - 1, m_rows - 1) = -cpe;
        schur.submat(2 * q, 0, m_rows - 1, q - 1) = cpe.t();
        schur.submat(2 * q, q, m_rows - 1, 2 * q - 1) = -cpe.t();
        schur.submat(2 * q, 2 * q, m_rows - 1, m_rows - 1) = see;
        for (arma::uword i = 0; i < 2 * q; i++)
            schur(i, i) += x.lin[i] / z.lin[i];
        schur = 0.5 * (schur + schur.t());

        arma::mat schur_chol;
        double ridge = 1e-13 * arma::mean(schur.diag());
        while (!arma::chol(schur_chol, schur, "lower"))
        {
            schur.diag() += ridge;
            ridge *= 100.0;
            if (ridge > 1e-4 * arma::mean(schur.diag()))
                return sol;
        }
        auto schur_solve = [&](const arma::vec &rhs) {
            const arma::vec t = arma::solve(arma::trimatl(schur_chol), rhs);
            return arma::vec(arma::solve(arma::trimatu(schur_chol.t()), t));
        };

        // A(X R_d Z^-1) enters both predictor and corrector right-hand sides
        std::vector<arma::cx_mat> xrdzi(pairs);
        for (arma::uword k = 0; k < pairs; k++)
            xrdzi[k] = x.mats[k] * rd.mats[k] * zi[k];
        const arma::vec xrdzi_lin = x.lin % rd.lin % zlin_i;
        const arma::vec a_xrdzi = a_op(xrdzi, xrdzi_lin);

        // direction for a given centering target and correction term
        auto direction = [&](double sigmu, const std::vector<arma::cx_mat> *corr_m, const arma::vec *corr_l) {
            std::vector<arma::cx_mat> g1(pairs);
            arma::vec g1l(n_lin);
            for (arma::uword k = 0; k < pairs; k++)
            {
                g1[k] = sigmu * zi[k] - x.mats[k];
                if (corr_m)
                    g1[k] -= (*corr_m)[k] * zi[k];
            }
            g1l = sigmu * zlin_i - x.lin;
            if (corr_l)
                g1l -= (*corr_l) % zlin_i;

            const arma::vec rhs = rp - a_op(g1, g1l) + a_xrdzi;
            const arma::vec dy = schur_solve(rhs);

            Iterate dz = at_op(dy);
            for (arma::uword k = 0; k < pairs; k++)
                dz.mats[k] = rd.mats[k] - dz.mats[k];
            dz.lin = rd.lin - dz.lin;

            Iterate dx;
            dx.mats.resize(pairs);
            for (arma::uword k = 0; k < pairs; k++)
                dx.mats[k] = herm_part(g1[k] - x.mats[k] * dz.mats[k] * zi[k]);
            dx.lin = g1l - x.lin % dz.lin % zlin_i;
            return std::tuple<Iterate, arma::vec, Iterate>(std::move(dx), dy, std::move(dz));
        };

        // predictor
        auto [dxp, dyp, dzp] = direction(0.0, nullptr, nullptr);
        const double ap = std::min(1.0, opts.step_fraction * max_step(x, dxp));
        const double ad = std::min(1.0, opts.step_fraction * max_step(z, dzp));
        Iterate xt = x, zt = z;
        for (arma::uword k = 0; k < pairs; k++)
        {
            xt.mats[k] += ap * dxp.mats[k];
            zt.mats[k] += ad * dzp.mats[k];
        }
        xt.lin += ap * dxp.lin;
        zt.lin += ad * dzp.lin;
        const double mu_aff = cone_dot(xt, zt) / nu;
        double sigma = std::pow(mu_aff / mu, 3.0);
        sigma = std::clamp(sigma, 0.0, 1.0);

        // corrector
        std::vector<arma::cx_mat> corr(pairs);
        for (arma::uword k = 0; k < pairs; k++)
            corr[k] = dxp.mats[k] * dzp.mats[k];
        const arma::vec corr_lin = dxp.lin % dzp.lin;
        auto [dx, dy, dz] = direction(sigma * mu, &corr, &corr_lin);

        const double sp = std::min(1.0, opts.step_fraction * max_step(x, dx));
        const double sd = std::min(1.0, opts.step_fraction * max_step(z, dz));
        for (arma::uword k = 0; k < pairs; k++)
        {
            x.mats[k] = herm_part(x.mats[k] + sp * dx.mats[k]);
            z.mats[k] = herm_part(z.mats[k] + sd * dz.mats[k]);
        }
        x.lin += sp * dx.lin;
        z.lin += sd * dz.lin;
        y += sd * dy;

        if (sp < 1e-8 && sd < 1e-8)
            return sol; // stalled
    }
    return sol;
}

} // namespace txbeam
