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

#include "txbeam/beamspace.hpp"
#include "txbeam/rng.hpp"

namespace txbeam
{

// Uniform linear transmit array; spacing in wavelengths
struct TransmitArray
{
    arma::uword elements = 0;
    double spacing = 0.5;

    TransmitArray() = default;
    TransmitArray(arma::uword elements_, double spacing_);
};

// Receive array with arbitrary element positions in half-wavelength units
struct ReceiveArray
{
    arma::vec positions;

    ReceiveArray() = default;
    explicit ReceiveArray(arma::vec positions_);
    arma::uword elements() const { return positions.n_elem; }
};

// Positions drawn uniformly on [0, aperture] half-wavelengths, sorted
ReceiveArray random_receive_array(arma::uword n, double aperture, RngStream &rng);

struct Sector
{
    double lo_deg = 0.0;
    double hi_deg = 0.0;
};

// Union of non-overlapping angular sectors plus the desired in-sector level.
//
// The level is expressed in beam-domain units: it is compared against the
// summed squared beam responses sum_k |w_k^H d(theta)|^2 inside the design
// problem. The physical beampattern equals that sum divided by 4*pi, so a
// level L corresponds to an in-sector beampattern of L/(4*pi).
// level <= 0 selects the default P_t*M / (4*pi*total width in radians).
struct SectorSpec
{
    std::vector<Sector> sectors;
    double level = 0.0;

    SectorSpec() = default;
    SectorSpec(std::vector<Sector> sectors_, double level_ = 0.0);

    double total_width_deg() const;
    double total_width_rad() const;
    bool contains(double theta_deg) const;
    double resolved_level(double total_power, arma::uword antennas) const;
};

// Sampling grid in degrees, strictly increasing
struct AngularGrid
{
    arma::vec deg;

    AngularGrid() = default;
    explicit AngularGrid(arma::vec deg_);

    static AngularGrid uniform(double lo_deg, double hi_deg, arma::uword points);
    // Full visible region [-90, 90] with the given point count (181 -> 1 degree)
    static AngularGrid full(arma::uword points = 181);

    arma::uword points() const { return deg.n_elem; }
    arma::vec rad() const { return deg * (arma::datum::pi / 180.0); }

    // Indices of grid points inside the sector union
    arma::uvec mask(const SectorSpec &spec) const;
};

// Grid covering each sector at fine_step and the rest of the visible
// region at coarse_step; sector edges are always included
AngularGrid scan_grid(const SectorSpec &spec, double fine_step_deg = 0.05, double coarse_step_deg = 0.5);

// Grid over the sector union only (for integrals restricted to it)
AngularGrid sector_grid(const SectorSpec &spec, double step_deg);

// One grid per sector, each containing both sector edges; integrals over a
// sector union must be taken per sector and summed, never across the gaps
std::vector<AngularGrid> sector_grids(const SectorSpec &spec, double step_deg);

// Transmit steering vector a(theta), entry m = exp(+j*2*pi*d*m*sin(theta))
arma::cx_vec tx_steering(const TransmitArray &arr, double theta_deg);

// Beam response vector d(theta) = conj(a(theta)); |w^H d| is the beam gain
arma::cx_vec beam_response(const TransmitArray &arr, double theta_deg);

// M x Q matrix whose columns are d(theta_q)
arma::cx_mat beam_response_matrix(const TransmitArray &arr, const AngularGrid &grid);

// Receive steering vector b(theta), entry n = exp(-j*pi*p_n*sin(theta))
arma::cx_vec rx_steering(const ReceiveArray &arr, double theta_deg);

// Physical transmit beampattern (1/(4*pi)) * sum_k |w_k^H d(theta)|^2
arma::vec beampattern(const BeamspaceMatrix &bm, const TransmitArray &arr, const AngularGrid &grid);

// Q x K matrix of per-waveform patterns (1/(4*pi)) |w_k^H d(theta)|^2
arma::mat beampattern_per_waveform(const BeamspaceMatrix &bm, const TransmitArray &arr, const AngularGrid &grid);

// Correlation of transmit steering vectors over the sector union,
// A = integral_sectors a(theta) a(theta)^H dtheta  (theta in radians)
arma::cx_mat sector_correlation(const TransmitArray &arr, const SectorSpec &spec, double step_deg = 0.05);

struct WaveformCountResult
{
    arma::uword waveforms = 0; // even count to transmit
    arma::uword dominant = 0;  // eigenvalue count before rounding up
    arma::vec energy_fraction; // cumulative eigenvalue energy fractions
};

// Smallest count of dominant eigenvalues of the sector correlation capturing
// at least energy_fraction of its trace, rounded up to the next even number
WaveformCountResult select_waveform_count(const TransmitArray &arr, const SectorSpec &spec,
                                          double energy_fraction = 0.9, double step_deg = 0.05);

// Uniform baseline: W = sqrt(P_t/M) * I, every waveform on its own antenna
BeamspaceMatrix uniform_basis_design(const TransmitArray &arr, double total_power);

} // namespace txbeam
