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

#include <vector>

#include <armadillo>

#include "txbeam/arrays.hpp"

namespace txbeam
{

// Semidefinite relaxation of the minmax beampattern fit.
//
// Variables are K/2 Hermitian M x M blocks X_k (one per free beam; the
// conjugate-flip halves contribute the same magnitudes, hence the desired
// level enters halved) plus an epigraph slack delta. Constraints:
//
//   | level(theta_q)/2 - sum_k d_q^H X_k d_q | <= delta     (Q grid angles)
//   sum_k tr(X_k A_i) = P_t/M                               (antenna pairs)
//   X_k >= 0
//
// where A_i selects diagonal entries (i, i) and (M+1-i, M+1-i). A rank-one
// optimum X_k = w_k w_k^H solves the original beam design exactly; otherwise
// randomized rounding extracts beams from the blocks.
struct SdpProblem
{
    TransmitArray array;
    SectorSpec spec;
    AngularGrid grid;
    arma::uword pairs = 0;
    double total_power = 0.0;

    arma::cx_mat d;            // M x Q beam responses at grid angles
    arma::vec half_level;      // Q desired levels, already halved, 0 out of sector
    std::vector<arma::uvec> eq_diag; // diagonal index sets of the A_i
    arma::vec eq_rhs;          // right-hand sides of the power equalities

    arma::uword antennas() const { return array.elements; }
    arma::uword pattern_rows() const { return 2 * grid.points(); }
    arma::uword equality_rows() const { return eq_rhs.n_elem; }
};

SdpProblem build_sdp(const TransmitArray &arr, const SectorSpec &spec, const AngularGrid &grid, arma::uword waveforms,
                     double total_power);

struct SdpOptions
{
    double tol = 1e-7;      // relative gap and infeasibility target
    arma::uword max_iters = 100;
    double step_fraction = 0.95; // fraction of the distance to the cone boundary
};

struct SdpSolution
{
    std::vector<arma::cx_mat> x; // K/2 Hermitian PSD blocks
    double delta = 0.0;          // primal epigraph value (minmax fit of the relaxation)
    double dual_objective = 0.0; // certified lower bound when dual_infeasibility is small
    double primal_infeasibility = 0.0;
    double dual_infeasibility = 0.0;
    double relative_gap = 0.0;
    arma::uword iterations = 0;
    bool converged = false;
};

// Primal-dual path-following interior point method (predictor-corrector,
// XZ linearization) on the block-diagonal standard form above
SdpSolution solve_sdp(const SdpProblem &prob, const SdpOptions &opts = {});

// sum_k Re(d_q^H X_k d_q) for every grid angle
arma::vec relaxed_pattern(const SdpProblem &prob, const std::vector<arma::cx_mat> &x);

// max_q | half_level_q - sum_k d_q^H X_k d_q |, the objective any feasible
// block set attains; delta* of a solved relaxation lower-bounds it
double relaxed_objective(const SdpProblem &prob, const std::vector<arma::cx_mat> &x);

// Residual of the power equalities, max_i |sum_k tr(X_k A_i) - rhs_i|
double equality_residual(const SdpProblem &prob, const std::vector<arma::cx_mat> &x);

} // namespace txbeam
