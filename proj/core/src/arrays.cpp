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

#include "txbeam/arrays.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "txbeam/numerics.hpp"

namespace txbeam
{

namespace
{

constexpr double deg2rad = std::numbers::pi / 180.0;

void check_angle(double theta_deg, const char *who)
{
    if (!(theta_deg >= -90.0 && theta_deg <= 90.0))
        throw std::invalid_argument(std::string(who) + ": angle must lie in [-90, 90] degrees");
}

} // namespace

TransmitArray::TransmitArray(arma::uword elements_, double spacing_) : elements(elements_), spacing(spacing_)
{
    if (elements < 2)
        throw std::invalid_argument("TransmitArray: need at least two elements");
    if (!(spacing > 0.0))
        throw std::invalid_argument("TransmitArray: spacing must be positive");
}

ReceiveArray::ReceiveArray(arma::vec positions_) : positions(std::move(positions_))
{
    if (positions.n_elem == 0)
        throw std::invalid_argument("ReceiveArray: no elements");
    if (!positions.is_finite())
        throw std::invalid_argument("ReceiveArray: positions must be finite");
}

ReceiveArray random_receive_array(arma::uword n, double aperture, RngStream &rng)
{
    if (n == 0)
        throw std::invalid_argument("random_receive_array: need at least one element");
    if (!(aperture > 0.0))
        throw std::invalid_argument("random_receive_array: aperture must be positive");
    arma::vec p(n);
    for (arma::uword i = 0; i < n; i++)
        p[i] = rng.uniform(0.0, aperture);
    return ReceiveArray(arma::sort(p));
}

SectorSpec::SectorSpec(std::vector<Sector> sectors_, double level_) : sectors(std::move(sectors_)), level(level_)
{
    if (sectors.empty())
        throw std::invalid_argument("SectorSpec: no sectors");
    auto sorted = sectors;
    std::sort(sorted.begin(), sorted.end(), [](const Sector &a, const Sector &b) { return a.lo_deg < b.lo_deg; });
    for (size_t i = 0; i < sorted.size(); i++)
    {
        if (!(sorted[i].lo_deg < sorted[i].hi_deg))
            throw std::invalid_argument("SectorSpec: sector bounds must satisfy lo < hi");
        check_angle(sorted[i].lo_deg, "SectorSpec");
        check_angle(sorted[i].hi_deg, "SectorSpec");
        if (i > 0 && sorted[i].lo_deg < sorted[i - 1].hi_deg)
            throw std::invalid_argument("SectorSpec: sectors overlap");
    }
    sectors = std::move(sorted);
}

double SectorSpec::total_width_deg() const
{
    double w = 0.0;
    for (const auto &s : sectors)
        w += s.hi_deg - s.lo_deg;
    return w;
}

double SectorSpec::total_width_rad() const
{
    return total_width_deg() * deg2rad;
}

bool SectorSpec::contains(double theta_deg) const
{
    for (const auto &s : sectors)
        if (theta_deg >= s.lo_deg - 1e-12 && theta_deg <= s.hi_deg + 1e-12)
            return true;
    return false;
}

double SectorSpec::resolved_level(double total_power, arma::uword antennas) const
{
    if (level > 0.0)
        return level;
    return total_power * double(antennas) / (4.0 * arma::datum::pi * total_width_rad());
}

AngularGrid::AngularGrid(arma::vec deg_) : deg(std::move(deg_))
{
    if (deg.n_elem == 0)
        throw std::invalid_argument("AngularGrid: empty grid");
    for (arma::uword i = 0; i + 1 < deg.n_elem; i++)
        if (deg[i + 1] <= deg[i])
            throw std::invalid_argument("AngularGrid: angles must be strictly increasing");
    check_angle(deg[0], "AngularGrid");
    check_angle(deg[deg.n_elem - 1], "AngularGrid");
}

AngularGrid AngularGrid::uniform(double lo_deg, double hi_deg, arma::uword points)
{
    if (points < 2)
        throw std::invalid_argument("AngularGrid: need at least two points");
    if (!(lo_deg < hi_deg))
        throw std::invalid_argument("AngularGrid: need lo < hi");
    return AngularGrid(arma::linspace(lo_deg, hi_deg, points));
}

AngularGrid AngularGrid::full(arma::uword points)
{
    return uniform(-90.0, 90.0, points);
}

arma::uvec AngularGrid::mask(const SectorSpec &spec) const
{
    std::vector<arma::uword> idx;
    for (arma::uword i = 0; i < deg.n_elem; i++)
        if (spec.contains(deg[i]))
            idx.push_back(i);
    return arma::uvec(idx);
}

std::vector<AngularGrid> sector_grids(const SectorSpec &spec, double step_deg)
{
    if (!(step_deg > 0.0))
        throw std::invalid_argument("sector_grids: step must be positive");
    std::vector<AngularGrid> grids;
    for (const auto &s : spec.sectors)
    {
        const double width = s.hi_deg - s.lo_deg;
        const arma::uword n = std::max<arma::uword>(2, arma::uword(std::lround(width / step_deg)) + 1);
        grids.push_back(AngularGrid::uniform(s.lo_deg, s.hi_deg, n));
    }
    return grids;
}

AngularGrid sector_grid(const SectorSpec &spec, double step_deg)
{
    arma::vec all;
    for (const auto &g : sector_grids(spec, step_deg))
        all = arma::join_cols(all, g.deg);
    return AngularGrid(std::move(all));
}

AngularGrid scan_grid(const SectorSpec &spec, double fine_step_deg, double coarse_step_deg)
{
    if (!(fine_step_deg > 0.0) || !(coarse_step_deg > 0.0))
        throw std::invalid_argument("scan_grid: steps must be positive");
    std::vector<double> pts;
    const arma::uword nc = arma::uword(std::lround(180.0 / coarse_step_deg)) + 1;
    const arma::vec coarse = arma::linspace(-90.0, 90.0, nc);
    for (double v : coarse)
        if (!spec.contains(v))
            pts.push_back(v);
    for (const auto &g : sector_grids(spec, fine_step_deg))
        for (double v : g.deg)
            pts.push_back(v);
    std::sort(pts.begin(), pts.end());
    std::vector<double> uniq;
    for (double v : pts)
        if (uniq.empty() || v - uniq.back() > 1e-9)
            uniq.push_back(v);
    return AngularGrid(arma::vec(uniq));
}

arma::cx_vec tx_steering(const TransmitArray &arr, double theta_deg)
{
    check_angle(theta_deg, "tx_steering");
    const double u = 2.0 * arma::datum::pi * arr.spacing * std::sin(theta_deg * deg2rad);
    arma::cx_vec a(arr.elements);
    for (arma::uword m = 0; m < arr.elements; m++)
        a[m] = std::polar(1.0, u * double(m));
    return a;
}

arma::cx_vec beam_response(const TransmitArray &arr, double theta_deg)
{
    return arma::conj(tx_steering(arr, theta_deg));
}

arma::cx_mat beam_response_matrix(const TransmitArray &arr, const AngularGrid &grid)
{
    arma::cx_mat d(arr.elements, grid.points());
    for (arma::uword q = 0; q < grid.points(); q++)
        d.col(q) = beam_response(arr, grid.deg[q]);
    return d;
}

arma::cx_vec rx_steering(const ReceiveArray &arr, double theta_deg)
{
    check_angle(theta_deg, "rx_steering");
    const double u = -arma::datum::pi * std::sin(theta_deg * deg2rad);
    arma::cx_vec b(arr.elements());
    for (arma::uword n = 0; n < arr.elements(); n++)
        b[n] = std::polar(1.0, u * arr.positions[n]);
    return b;
}

arma::mat beampattern_per_waveform(const BeamspaceMatrix &bm, const TransmitArray &arr, const AngularGrid &grid)
{
    if (bm.antennas() != arr.elements)
        throw std::invalid_argument("beampattern: matrix rows do not match array elements");
    const arma::cx_mat d = beam_response_matrix(arr, grid);  // M x Q
    const arma::cx_mat resp = bm.w.t() * d;                  // K x Q
    arma::mat g = arma::square(arma::abs(resp)).t();         // Q x K
    g /= 4.0 * arma::datum::pi;
    return g;
}

arma::vec beampattern(const BeamspaceMatrix &bm, const TransmitArray &arr, const AngularGrid &grid)
{
    return arma::sum(beampattern_per_waveform(bm, arr, grid), 1);
}

arma::cx_mat sector_correlation(const TransmitArray &arr, const SectorSpec &spec, double step_deg)
{
    arma::cx_mat acc(arr.elements, arr.elements, arma::fill::zeros);
    for (const auto &g : sector_grids(spec, step_deg))
    {
        const arma::vec w = trapezoid_weights(g.rad());
        for (arma::uword q = 0; q < g.points(); q++)
        {
            const arma::cx_vec a = tx_steering(arr, g.deg[q]);
            acc += w[q] * (a * a.t());
        }
    }
    return acc;
}

WaveformCountResult select_waveform_count(const TransmitArray &arr, const SectorSpec &spec, double energy_fraction,
                                          double step_deg)
{
    if (!(energy_fraction > 0.0 && energy_fraction <= 1.0))
        throw std::invalid_argument("select_waveform_count: energy fraction must lie in (0, 1]");
    const arma::cx_mat A = sector_correlation(arr, spec, step_deg);
    arma::vec vals;
    arma::cx_mat vecs;
    herm_eig(A, vals, vecs);

    WaveformCountResult res;
    res.energy_fraction = arma::cumsum(vals) / arma::sum(vals);
    arma::uword k0 = vals.n_elem;
    for (arma::uword i = 0; i < vals.n_elem; i++)
        if (res.energy_fraction[i] >= energy_fraction)
        {
            k0 = i + 1;
            break;
        }
    res.dominant = k0;
    res.waveforms = k0 + (k0 % 2);
    if (res.waveforms > arr.elements)
        throw std::runtime_error("select_waveform_count: required waveform count exceeds antenna count");
    return res;
}

BeamspaceMatrix uniform_basis_design(const TransmitArray &arr, double total_power)
{
    arma::cx_mat w(arr.elements, arr.elements, arma::fill::eye);
    w *= std::sqrt(total_power / double(arr.elements));
    return BeamspaceMatrix(std::move(w), total_power);
}

} // namespace txbeam
