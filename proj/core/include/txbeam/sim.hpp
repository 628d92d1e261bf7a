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

#include <utility>
#include <vector>

#include <armadillo>

#include "txbeam/arrays.hpp"
#include "txbeam/beamspace.hpp"
#include "txbeam/rng.hpp"

namespace txbeam
{

// Point targets with fluctuating reflections: every target's coefficient is
// drawn fresh per pulse (circular complex Gaussian, variance beta_var),
// constant within the pulse. noise_var = 0 simulates noise-free data.
struct TargetScene
{
    std::vector<double> angles_deg;
    double beta_var = 1.0;
    double noise_var = 1.0;
    arma::uword pulses = 1;

    TargetScene() = default;
    TargetScene(std::vector<double> angles_deg_, double beta_var_, double noise_var_, arma::uword pulses_);
};

// Matched-filtered receive data: slice t holds the N x K matrix whose
// column k is the component extracted by waveform k at pulse t
struct SnapshotSet
{
    arma::cx_cube y; // N x K x pulses

    arma::uword rx_elements() const { return y.n_rows; }
    arma::uword waveforms() const { return y.n_cols; }
    arma::uword pulses() const { return y.n_slices; }
};

// y_k(t) = sum_l beta_l(t) (d^H(theta_l) w_k) b(theta_l) + z_k(t)
//
// Draw order per pulse: target coefficients first (in scene order), then
// one noise vector per waveform; fixed so a given stream always produces
// the same data set.
SnapshotSet simulate(const TargetScene &scene, const BeamspaceMatrix &bm, const TransmitArray &tx,
                     const ReceiveArray &rx, RngStream &rng);

// Sum the first K/2 and last K/2 waveform channels per pulse; the paired
// layout makes the two sums equal in magnitude and offset in phase by the
// angle-dependent profile direction finding inverts
std::pair<arma::cx_mat, arma::cx_mat> accumulate_halves(const SnapshotSet &snap);

} // namespace txbeam
