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

#include "txbeam/sim.hpp"

#include <stdexcept>

namespace txbeam
{

TargetScene::TargetScene(std::vector<double> angles_deg_, double beta_var_, double noise_var_, arma::uword pulses_)
    : angles_deg(std::move(angles_deg_)), beta_var(beta_var_), noise_var(noise_var_), pulses(pulses_)
{
    if (angles_deg.empty())
        throw std::invalid_argument("TargetScene: no targets");
    for (double a : angles_deg)
        if (!(a >= -90.0 && a <= 90.0))
            throw std::invalid_argument("TargetScene: target angle outside [-90, 90]");
    if (!(beta_var > 0.0))
        throw std::invalid_argument("TargetScene: reflection variance must be positive");
    if (noise_var < 0.0)
        throw std::invalid_argument("TargetScene: noise variance must be nonnegative");
    if (pulses == 0)
        throw std::invalid_argument("TargetScene: need at least one pulse");
}

SnapshotSet simulate(const TargetScene &scene, const BeamspaceMatrix &bm, const TransmitArray &tx,
                     const ReceiveArray &rx, RngStream &rng)
{
    if (bm.antennas() != tx.elements)
        throw std::invalid_argument("simulate: beamspace rows do not match transmit elements");

    const arma::uword n = rx.elements();
    const arma::uword k = bm.waveforms();
    const arma::uword nl = scene.angles_deg.size();

    // per-target beam responses d^H(theta_l) w_k and receive steering
    arma::cx_mat resp(k, nl);
    arma::cx_mat steer(n, nl);
    for (arma::uword l = 0; l < nl; l++)
    {
        resp.col(l) = arma::conj(bm.w.t() * beam_response(tx, scene.angles_deg[l]));
        steer.col(l) = rx_steering(rx, scene.angles_deg[l]);
    }

    SnapshotSet snap;
    snap.y.set_size(n, k, scene.pulses);
    for (arma::uword t = 0; t < scene.pulses; t++)
    {
        arma::cx_vec beta(nl);
        for (arma::uword l = 0; l < nl; l++)
            beta[l] = rng.cgauss(scene.beta_var);

        arma::cx_mat yt = steer * arma::diagmat(beta) * resp.st(); // N x K
        if (scene.noise_var > 0.0)
            for (arma::uword w = 0; w < k; w++)
                yt.col(w) += rng.cgauss_vec(n, scene.noise_var);
        snap.y.slice(t) = yt;
    }
    return snap;
}

std::pair<arma::cx_mat, arma::cx_mat> accumulate_halves(const SnapshotSet &snap)
{
    const arma::uword k = snap.waveforms();
    if (k < 2 || k % 2 != 0)
        throw std::invalid_argument("accumulate_halves: waveform count must be even");
    const arma::uword h = k / 2;

    arma::cx_mat g1(snap.rx_elements(), snap.pulses());
    arma::cx_mat g2(snap.rx_elements(), snap.pulses());
    for (arma::uword t = 0; t < snap.pulses(); t++)
    {
        const auto &yt = snap.y.slice(t);
        g1.col(t) = arma::sum(yt.head_cols(h), 1);
        g2.col(t) = arma::sum(yt.tail_cols(h), 1);
    }
    return {std::move(g1), std::move(g2)};
}

} // namespace txbeam
