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

#include "txbeam/rotation.hpp"

#include <stdexcept>

#include "txbeam/numerics.hpp"

namespace txbeam
{

namespace
{

arma::cx_mat herm_part(const arma::cx_mat &a)
{
    return 0.5 * (a + a.t());
}

arma::cx_mat skew_part(const arma::cx_mat &a)
{
    return 0.5 * (a - a.t());
}

// QR retraction with the phase convention that makes it smooth:
// diag(R) rotated to the positive real axis
arma::cx_mat qr_retract(const arma::cx_mat &v)
{
    arma::cx_mat q, r;
    if (!arma::qr_econ(q, r, v))
        throw std::runtime_error("optimize_rotation: QR retraction failed");
    arma::cx_vec s(r.n_rows);
    for (arma::uword i = 0; i < r.n_rows; i++)
    {
        const auto rii = r(i, i);
        s[i] = (std::abs(rii) > 0.0) ? rii / std::abs(rii) : arma::cx_double(1.0, 0.0);
    }
    return q * arma::diagmat(s);
}

} // namespace

arma::cx_mat nearest_unitary(const arma::cx_mat &v)
{
    if (v.n_rows != v.n_cols || v.n_rows == 0)
        throw std::invalid_argument("nearest_unitary: matrix must be square");
    arma::cx_mat a, b;
    arma::vec s;
    if (!arma::svd(a, s, b, v))
        throw std::runtime_error("nearest_unitary: SVD projection failed");
    if (s[s.n_elem - 1] <= 0.0)
        throw std::invalid_argument("nearest_unitary: matrix is singular");
    return a * b.t();
}

double unitarity_residual(const arma::cx_mat &u)
{
    return arma::norm(u.t() * u - arma::cx_mat(u.n_cols, u.n_cols, arma::fill::eye), "fro");
}

RotationProblem build_rotation_problem(const BeamspaceMatrix &bm, const TransmitArray &arr, const SectorSpec &spec,
                                       double step_deg)
{
    if (bm.waveforms() < 4)
        throw std::invalid_argument("build_rotation_problem: need at least four waveforms");
    if (!bm.is_paired(1e-8))
        throw std::invalid_argument("build_rotation_problem: matrix is not in paired layout");
    if (bm.antennas() != arr.elements)
        throw std::invalid_argument("build_rotation_problem: matrix rows do not match array elements");

    const arma::uword pairs = bm.pairs();
    const arma::cx_mat wf = bm.free_columns();

    RotationProblem prob;
    prob.base = bm;
    prob.d_mat.zeros(pairs, pairs);
    for (const auto &g : sector_grids(spec, step_deg))
    {
        const arma::cx_mat resp = wf.t() * beam_response_matrix(arr, g); // pairs x Q
        const arma::vec wts = trapezoid_weights(g.rad());
        prob.d_mat += resp * arma::diagmat(arma::cx_vec(wts, arma::vec(wts.n_elem, arma::fill::zeros))) * resp.t();
    }
    prob.d_mat = herm_part(prob.d_mat);
    prob.trace_d = arma::trace(prob.d_mat).real();

    // (K/2) I - 1 1^H; equals the difference-vector penalty e e^H at K = 4
    prob.e_mat = double(pairs) * arma::cx_mat(pairs, pairs, arma::fill::eye) -
                 arma::cx_mat(pairs, pairs, arma::fill::ones);
    return prob;
}

double rotation_objective(const RotationProblem &prob, const arma::cx_mat &u)
{
    return arma::trace(u * prob.e_mat * u.t() * prob.d_mat).real();
}

RotationResult optimize_rotation(const RotationProblem &prob, arma::uword max_iters, double tol)
{
    const arma::uword p = prob.d_mat.n_rows;
    arma::cx_mat u(p, p, arma::fill::eye);

    RotationResult res;
    res.initial_objective = rotation_objective(prob, u);
    double f = res.initial_objective;
    const double gscale = std::max(1.0, arma::norm(prob.d_mat, "fro"));

    arma::uword it = 0;
    for (; it < max_iters; it++)
    {
        // Euclidean gradient of tr(U E U^H D) is 2 D U E; project onto the
        // tangent space U * skew to get the Riemannian gradient
        const arma::cx_mat egrad = 2.0 * prob.d_mat * u * prob.e_mat;
        const arma::cx_mat rgrad = u * skew_part(u.t() * egrad);
        const double gnorm = arma::norm(rgrad, "fro");
        res.gradient_norm = gnorm;
        if (gnorm <= tol * gscale)
        {
            res.converged = true;
            break;
        }

        // Armijo backtracking from unit step
        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; bt++)
        {
            const arma::cx_mat trial = qr_retract(u - alpha * rgrad);
            const double ft = rotation_objective(prob, trial);
            if (ft <= f - 1e-4 * alpha * gnorm * gnorm)
            {
                u = trial;
                f = ft;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted)
        {
            res.converged = true; // no descent left at line-search resolution
            break;
        }
        if (unitarity_residual(u) > 1e-8)
            u = nearest_unitary(u);
    }

    res.u = nearest_unitary(u);
    res.objective = rotation_objective(prob, res.u);
    res.iterations = it;
    return res;
}

double integrated_coherent_gain(const BeamspaceMatrix &bm, const TransmitArray &arr, const SectorSpec &spec,
                                double step_deg)
{
    if (bm.waveforms() % 2 != 0)
        throw std::invalid_argument("integrated_coherent_gain: odd waveform count");
    const arma::cx_mat wf = bm.free_columns();
    double acc = 0.0;
    for (const auto &g : sector_grids(spec, step_deg))
    {
        const arma::cx_mat resp = wf.t() * beam_response_matrix(arr, g); // pairs x Q
        const arma::vec coh = arma::square(arma::abs(arma::sum(resp, 0))).t();
        acc += trapezoid(g.rad(), coh);
    }
    return acc;
}

BeamspaceMatrix apply_rotation(const BeamspaceMatrix &bm, const arma::cx_mat &u)
{
    if (u.n_rows != bm.pairs() || u.n_cols != bm.pairs())
        throw std::invalid_argument("apply_rotation: rotation size must match the beam pair count");
    if (unitarity_residual(u) > 1e-8)
        throw std::invalid_argument("apply_rotation: matrix is not unitary");
    if (!bm.is_paired(1e-8))
        throw std::invalid_argument("apply_rotation: matrix is not in paired layout");
    return BeamspaceMatrix::from_free_columns(bm.free_columns() * u, bm.total_power);
}

BeamspaceMatrix right_multiply(const BeamspaceMatrix &bm, const arma::cx_mat &u)
{
    if (u.n_rows != bm.waveforms() || u.n_cols != bm.waveforms())
        throw std::invalid_argument("right_multiply: matrix size must match the waveform count");
    if (unitarity_residual(u) > 1e-8)
        throw std::invalid_argument("right_multiply: matrix is not unitary");
    return BeamspaceMatrix(bm.w * u, bm.total_power);
}

} // namespace txbeam
