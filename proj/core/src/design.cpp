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

#include "txbeam/design.hpp"

#include <cmath>
#include <stdexcept>

#include "txbeam/numerics.hpp"

namespace txbeam
{

double minmax_deviation(const SdpProblem &prob, const arma::cx_mat &free_cols)
{
    if (free_cols.n_rows != prob.antennas() || free_cols.n_cols != prob.pairs)
        throw std::invalid_argument("minmax_deviation: beam matrix shape mismatch");
    const arma::cx_mat resp = free_cols.t() * prob.d; // pairs x Q
    const arma::vec level = arma::sum(arma::square(arma::abs(resp)), 0).t();
    return arma::abs(prob.half_level - level).max();
}

RoundedDesign randomize_round(const SdpProblem &prob, const SdpSolution &sol, arma::uword n_candidates, RngStream &rng)
{
    if (n_candidates == 0)
        throw std::invalid_argument("randomize_round: need at least one candidate");
    if (sol.x.size() != prob.pairs)
        throw std::invalid_argument("randomize_round: block count mismatch");

    const arma::uword m = prob.antennas();
    const arma::uword pairs = prob.pairs;

    // factor each block; rank-one blocks skip the random draw
    std::vector<arma::cx_mat> factor(pairs);
    std::vector<arma::cx_vec> principal(pairs);
    std::vector<bool> rank_one(pairs);
    bool all_rank_one = true;
    for (arma::uword k = 0; k < pairs; k++)
    {
        arma::vec vals;
        arma::cx_mat vecs;
        herm_eig(sol.x[k], vals, vecs);
        vals = arma::clamp(vals, 0.0, arma::datum::inf);
        if (vals[0] <= 0.0)
            throw std::runtime_error("randomize_round: relaxation block is identically zero");
        rank_one[k] = (vals[1] / vals[0] <= 1e-8);
        all_rank_one = all_rank_one && rank_one[k];
        principal[k] = vecs.col(0) * std::sqrt(vals[0]);
        factor[k] = vecs * arma::diagmat(arma::sqrt(vals));
    }

    RoundedDesign best;
    best.objective = arma::datum::inf;
    best.principal_only = all_rank_one;
    arma::cx_mat cand(m, pairs);
    arma::cx_mat best_cols;

    const arma::uword draws = all_rank_one ? 1 : n_candidates;
    for (arma::uword c = 0; c < draws; c++)
    {
        for (arma::uword k = 0; k < pairs; k++)
            cand.col(k) = rank_one[k] ? principal[k] : arma::cx_vec(factor[k] * unit_circle_vector(m, rng));

        // rescale antenna pairs so the power equalities hold exactly
        bool valid = true;
        for (arma::uword i = 0; i < prob.eq_rhs.n_elem && valid; i++)
        {
            double cur = 0.0;
            for (arma::uword k = 0; k < pairs; k++)
                for (arma::uword r : prob.eq_diag[i])
                    cur += std::norm(cand(r, k));
            if (cur <= 0.0)
            {
                valid = false; // no candidate energy on this antenna pair
                break;
            }
            const double s = std::sqrt(prob.eq_rhs[i] / cur);
            for (arma::uword r : prob.eq_diag[i])
                cand.row(r) *= s;
        }
        if (!valid)
            continue;

        const double obj = minmax_deviation(prob, cand);
        if (obj < best.objective)
        {
            best.objective = obj;
            best.candidate_index = c;
            best_cols = cand;
        }
    }
    if (!best_cols.n_elem)
        throw std::runtime_error("randomize_round: no candidate had energy on every antenna pair");

    best.matrix = BeamspaceMatrix::from_free_columns(best_cols, prob.total_power);
    return best;
}

BeamspaceDesign design_joint(const TransmitArray &arr, const SectorSpec &spec, const AngularGrid &grid,
                             arma::uword waveforms, double total_power, arma::uword n_candidates, RngStream &rng,
                             const SdpOptions &opts)
{
    const SdpProblem prob = build_sdp(arr, spec, grid, waveforms, total_power);
    const SdpSolution sol = solve_sdp(prob, opts);
    const RoundedDesign round = randomize_round(prob, sol, n_candidates, rng);

    BeamspaceDesign out;
    out.matrix = round.matrix;
    out.sdp_delta = sol.delta;
    out.rounded_objective = round.objective;
    out.sdp_converged = sol.converged;
    out.sdp_iterations = sol.iterations;
    return out;
}

BeamspaceDesign design_sdd(const TransmitArray &arr, const SectorSpec &spec, const AngularGrid &grid,
                           arma::uword waveforms, double total_power, arma::uword n_candidates, RngStream &rng,
                           const SdpOptions &opts)
{
    if (waveforms < 2 || waveforms % 2 != 0)
        throw std::invalid_argument("design_sdd: waveform count must be even and at least 2");
    const arma::uword pairs = waveforms / 2;

    // one subsector per beam pair
    std::vector<Sector> subs;
    if (spec.sectors.size() == pairs)
        subs = spec.sectors;
    else if (spec.sectors.size() == 1)
    {
        const Sector s = spec.sectors[0];
        const double step = (s.hi_deg - s.lo_deg) / double(pairs);
        for (arma::uword i = 0; i < pairs; i++)
            subs.push_back({s.lo_deg + step * double(i), s.lo_deg + step * double(i + 1)});
    }
    else
        throw std::invalid_argument("design_sdd: sector count matches neither 1 nor the beam pair count");

    // every pair aims at the level of the full spec so the assembled
    // pattern is level consistent across subsectors
    const double level = spec.resolved_level(total_power, arr.elements);
    const double pair_power = total_power / double(pairs);

    arma::cx_mat free_cols(arr.elements, pairs);
    BeamspaceDesign out;
    out.sdp_converged = true;
    for (arma::uword i = 0; i < pairs; i++)
    {
        const SectorSpec sub({subs[i]}, level);
        const SdpProblem prob = build_sdp(arr, sub, grid, 2, pair_power);
        const SdpSolution sol = solve_sdp(prob, opts);
        const RoundedDesign round = randomize_round(prob, sol, n_candidates, rng);
        free_cols.col(i) = round.matrix.free_columns().col(0);
        out.sdp_delta = std::max(out.sdp_delta, sol.delta);
        out.rounded_objective = std::max(out.rounded_objective, round.objective);
        out.sdp_converged = out.sdp_converged && sol.converged;
        out.sdp_iterations = std::max(out.sdp_iterations, sol.iterations);
    }
    out.matrix = BeamspaceMatrix::from_free_columns(free_cols, total_power);
    return out;
}

} // namespace txbeam
