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

#pragma once

#include <armadillo>

#include "txbeam/beamspace.hpp"
#include "txbeam/rng.hpp"
#include "txbeam/sdp.hpp"

namespace txbeam
{

// max_q | half_level_q - sum_k |w_k^H d_q|^2 | for explicit beams (the
// columns of free_cols); the objective randomized rounding minimizes
double minmax_deviation(const SdpProblem &prob, const arma::cx_mat &free_cols);

struct RoundedDesign
{
    BeamspaceMatrix matrix;
    double objective = 0.0;          // minmax deviation of the selected beams
    arma::uword candidate_index = 0; // which draw won
    bool principal_only = false;     // every block was rank one, no randomization needed
};

// Extract beams from the relaxation blocks: draw unit-circle vectors v,
// map them through the block factors U * sqrt(S), rescale antenna pairs to
// meet the power equalities exactly, keep the draw with the smallest
// minmax deviation. Rank-one blocks contribute their principal eigenvector
// directly. With a fixed rng state the candidate sequence is nested, so the
// objective is non-increasing in n_candidates.
RoundedDesign randomize_round(const SdpProblem &prob, const SdpSolution &sol, arma::uword n_candidates,
                              RngStream &rng);

struct BeamspaceDesign
{
    BeamspaceMatrix matrix;
    double sdp_delta = 0.0;         // relaxation optimum (max over subproblems for the decomposed flow)
    double rounded_objective = 0.0; // minmax deviation of the final beams
    bool sdp_converged = false;
    arma::uword sdp_iterations = 0;
};

// Joint design: one relaxation over all beam pairs, then rounding
BeamspaceDesign design_joint(const TransmitArray &arr, const SectorSpec &spec, const AngularGrid &grid,
                             arma::uword waveforms, double total_power, arma::uword n_candidates, RngStream &rng,
                             const SdpOptions &opts = {});

// Sector-decomposed design: each beam pair is designed on its own subsector
// with power budget P_t/(K/2), via the two-waveform pipeline, and the pairs
// are assembled in paired column order. Subsectors are the spec's sectors
// when their count equals K/2, or an equal split of a single sector.
BeamspaceDesign design_sdd(const TransmitArray &arr, const SectorSpec &spec, const AngularGrid &grid,
                           arma::uword waveforms, double total_power, arma::uword n_candidates, RngStream &rng,
                           const SdpOptions &opts = {});

} // namespace txbeam
