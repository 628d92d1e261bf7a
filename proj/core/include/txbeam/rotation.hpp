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

#include "txbeam/arrays.hpp"
#include "txbeam/beamspace.hpp"

namespace txbeam
{

// Right-multiplying the free beams by a unitary U leaves the beampattern
// and the per-antenna powers unchanged, but redistributes response phase
// across beams. Choosing U to maximize the in-sector coherent half sum
//   integral over sectors of |sum_k (rotated w_k)^H-response|^2
// sharpens the summed channels direction finding works on. Minimizing
// tr(U E U^H D) with E = (K/2) I - 1 1^H is the same objective up to the
// constant (K/2) tr(D); at K = 4, E equals e e^H with e = (1, -1)^T.
struct RotationProblem
{
    arma::cx_mat d_mat; // integral of (Wf^H d)(d^H Wf) over the sector union
    arma::cx_mat e_mat; // coherence penalty, Hermitian PSD
    BeamspaceMatrix base;
    double trace_d = 0.0;
};

RotationProblem build_rotation_problem(const BeamspaceMatrix &bm, const TransmitArray &arr, const SectorSpec &spec,
                                       double step_deg = 0.05);

struct RotationResult
{
    arma::cx_mat u;                  // (K/2) x (K/2) unitary
    double objective = 0.0;          // tr(U E U^H D) at the returned U
    double initial_objective = 0.0;  // same at U = I
    double gradient_norm = 0.0;
    arma::uword iterations = 0;
    bool converged = false;
};

// Steepest descent on the unitary group: Riemannian gradient projection,
// QR retraction, Armijo backtracking from unit step. The objective is
// non-increasing across accepted steps.
RotationResult optimize_rotation(const RotationProblem &prob, arma::uword max_iters = 500, double tol = 1e-8);

// tr(U E U^H D), the quantity optimize_rotation minimizes
double rotation_objective(const RotationProblem &prob, const arma::cx_mat &u);

// Integral of |sum over free beams of the beam response|^2 over the sector
// union; grows when the rotation succeeds
double integrated_coherent_gain(const BeamspaceMatrix &bm, const TransmitArray &arr, const SectorSpec &spec,
                                double step_deg = 0.05);

// Apply a (K/2) x (K/2) unitary to the free beams and rebuild the flips.
// Throws if U is not unitary within 1e-8 or the matrix is not paired.
BeamspaceMatrix apply_rotation(const BeamspaceMatrix &bm, const arma::cx_mat &u);

// Right-multiply all K columns by a K x K unitary. Keeps beampattern and
// per-antenna powers; generally breaks the paired layout.
BeamspaceMatrix right_multiply(const BeamspaceMatrix &bm, const arma::cx_mat &u);

// Frobenius distance of U^H U from the identity
double unitarity_residual(const arma::cx_mat &u);

// Closest unitary matrix in Frobenius norm (polar projection). Used to relift
// numerically drifted or low-precision rotation matrices back onto the group.
arma::cx_mat nearest_unitary(const arma::cx_mat &v);

} // namespace txbeam
