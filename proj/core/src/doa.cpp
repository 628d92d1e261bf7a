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

#include "txbeam/doa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <stdexcept>

namespace txbeam
{

namespace
{

constexpr double TWO_PI = 2.0 * std::numbers::pi;

// Wraps to [-pi, pi]
double wrap_phase(double x) { return x - TWO_PI * std::round(x / TWO_PI); }

} // namespace

double PhaseProfile::value_at(double angle_deg) const
{
    for (std::size_t s = 0; s < angles_deg.size(); s++)
    {
        const arma::vec &ang = angles_deg[s];
        if (ang.n_elem < 2 || angle_deg < ang[0] - 1e-9 || angle_deg > ang[ang.n_elem - 1] + 1e-9)
            continue;
        const arma::vec &psi = dpsi[s];
        arma::uword q = 0;
        while (q + 2 < ang.n_elem && angle_deg > ang[q + 1])
            q++;
        const double t = std::clamp((angle_deg - ang[q]) / (ang[q + 1] - ang[q]), 0.0, 1.0);
        return psi[q] + t * (psi[q + 1] - psi[q]);
    }
    throw std::invalid_argument("PhaseProfile::value_at: angle outside every sector");
}

PhaseProfile build_phase_profile(const BeamspaceMatrix &bm, const TransmitArray &tx, const SectorSpec &spec,
                                 double step_deg)
{
    if (bm.antennas() != tx.elements)
        throw std::invalid_argument("build_phase_profile: matrix rows do not match transmit elements");
    if (bm.waveforms() < 2 || bm.waveforms() % 2 != 0)
        throw std::invalid_argument("build_phase_profile: waveform count must be even");

    const arma::uword h = bm.pairs();
    const double thresh = 1e-6 * std::sqrt(bm.total_power * static_cast<double>(bm.antennas()));

    PhaseProfile prof;
    for (const AngularGrid &grid : sector_grids(spec, step_deg))
    {
        arma::vec psi(grid.points());
        for (arma::uword q = 0; q < grid.points(); q++)
        {
            const arma::cx_vec resp = arma::conj(bm.w.t() * beam_response(tx, grid.deg[q]));
            const std::complex<double> s1 = arma::accu(resp.head(h));
            const std::complex<double> s2 = arma::accu(resp.tail(h));
            if (std::abs(s1) < thresh || std::abs(s2) < thresh)
                prof.degenerate = true;
            psi[q] = std::arg(s1) - std::arg(s2);
        }
        for (arma::uword q = 1; q < psi.n_elem; q++)
            psi[q] = psi[q - 1] + wrap_phase(psi[q] - psi[q - 1]);
        prof.angles_deg.push_back(grid.deg);
        prof.dpsi.push_back(std::move(psi));
    }
    return prof;
}

std::vector<double> invert_phase(const PhaseProfile &profile, double dpsi)
{
    std::vector<double> out;
    for (std::size_t s = 0; s < profile.angles_deg.size(); s++)
    {
        const arma::vec &ang = profile.angles_deg[s];
        const arma::vec &psi = profile.dpsi[s];
        if (ang.n_elem < 2)
            continue;

        const long n_lo = static_cast<long>(std::ceil((psi.min() - dpsi) / TWO_PI - 1e-12));
        const long n_hi = static_cast<long>(std::floor((psi.max() - dpsi) / TWO_PI + 1e-12));
        for (long n = n_lo; n <= n_hi; n++)
        {
            const double target = dpsi + TWO_PI * static_cast<double>(n);
            for (arma::uword q = 0; q + 1 < psi.n_elem; q++)
            {
                const double a = psi[q] - target;
                const double b = psi[q + 1] - target;
                if (a == 0.0)
                    out.push_back(ang[q]);
                else if (a * b < 0.0)
                    out.push_back(ang[q] + a / (a - b) * (ang[q + 1] - ang[q]));
            }
            if (psi[psi.n_elem - 1] == target)
                out.push_back(ang[ang.n_elem - 1]);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              out.end());
    return out;
}

EspritEstimate estimate_esprit(const arma::cx_mat &g1, const arma::cx_mat &g2, arma::uword sources,
                               const PhaseProfile &profile, const SpectrumEvaluator &disambiguator)
{
    if (g1.n_rows != g2.n_rows || g1.n_cols != g2.n_cols)
        throw std::invalid_argument("estimate_esprit: half-sum dimensions differ");
    if (sources == 0)
        throw std::invalid_argument("estimate_esprit: need at least one source");
    if (g1.n_cols < sources)
        throw std::invalid_argument("estimate_esprit: fewer snapshots than sources");
    if (profile.angles_deg.empty())
        throw std::invalid_argument("estimate_esprit: empty phase profile");

    const arma::uword n = g1.n_rows;
    const arma::uword t = g1.n_cols;

    arma::cx_mat z(2 * n, t);
    z.head_rows(n) = g1;
    z.tail_rows(n) = g2;
    arma::cx_mat r = (z * z.t()) / static_cast<double>(t);
    r = 0.5 * (r + r.t());

    arma::vec ev;
    arma::cx_mat evec;
    if (!arma::eig_sym(ev, evec, r))
        throw std::runtime_error("estimate_esprit: covariance eigendecomposition failed");

    // eig_sym sorts ascending; signal subspace spans the last `sources` columns
    const arma::uword dim = 2 * n;
    if (!(ev[dim - sources] > 1e-12 * std::max(ev[dim - 1], 1e-300)))
        throw std::runtime_error("estimate_esprit: snapshots do not span the requested source count");

    const arma::cx_mat es = evec.tail_cols(sources);
    const arma::cx_mat e1 = es.head_rows(n);
    const arma::cx_mat e2 = es.tail_rows(n);

    arma::cx_mat psi_mat;
    if (!arma::solve(psi_mat, e1.t() * e1, e1.t() * e2))
        throw std::runtime_error("estimate_esprit: shift-invariance system is singular");

    arma::cx_vec lam;
    if (!arma::eig_gen(lam, psi_mat))
        throw std::runtime_error("estimate_esprit: invariance eigendecomposition failed");

    EspritEstimate est;
    std::vector<std::pair<double, double>> items; // (angle, dpsi)
    for (arma::uword l = 0; l < sources; l++)
    {
        const double dp = -std::arg(lam[l]);
        const std::vector<double> cand = invert_phase(profile, dp);
        double angle = 0.0;
        if (cand.empty())
        {
            // phase outside the profile range: take the closest tabulated angle
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s < profile.angles_deg.size(); s++)
                for (arma::uword q = 0; q < profile.dpsi[s].n_elem; q++)
                {
                    const double d = std::abs(wrap_phase(profile.dpsi[s][q] - dp));
                    if (d < best)
                    {
                        best = d;
                        angle = profile.angles_deg[s][q];
                    }
                }
            est.clamped = true;
        }
        else if (cand.size() == 1)
        {
            angle = cand.front();
        }
        else if (disambiguator)
        {
            double best = -std::numeric_limits<double>::infinity();
            for (double c : cand)
            {
                const double v = disambiguator(c);
                if (v > best)
                {
                    best = v;
                    angle = c;
                }
            }
        }
        else
        {
            angle = cand.front();
            est.ambiguous = true;
        }
        items.emplace_back(angle, dp);
    }

    std::sort(items.begin(), items.end());
    for (const auto &[a, d] : items)
    {
        est.angles_deg.push_back(a);
        est.dpsi.push_back(d);
    }
    return est;
}

MusicEvaluator::MusicEvaluator(const SnapshotSet &snap, const BeamspaceMatrix &bm, const TransmitArray &tx,
                               const ReceiveArray &rx, arma::uword sources)
    : m_w(bm.w), m_tx(tx), m_rx(rx)
{
    const arma::uword n = snap.rx_elements();
    const arma::uword k = snap.waveforms();
    if (n != rx.elements())
        throw std::invalid_argument("MusicEvaluator: snapshot rows do not match receive elements");
    if (k != bm.waveforms())
        throw std::invalid_argument("MusicEvaluator: snapshot channels do not match waveform count");
    if (bm.antennas() != tx.elements)
        throw std::invalid_argument("MusicEvaluator: matrix rows do not match transmit elements");
    if (sources == 0 || sources >= n * k)
        throw std::invalid_argument("MusicEvaluator: source count out of range");

    const arma::uword t = snap.pulses();
    arma::cx_mat x(n * k, t);
    for (arma::uword tt = 0; tt < t; tt++)
        x.col(tt) = arma::vectorise(snap.y.slice(tt));
    arma::cx_mat r = (x * x.t()) / static_cast<double>(t);
    r = 0.5 * (r + r.t());

    arma::vec ev;
    arma::cx_mat evec;
    if (!arma::eig_sym(ev, evec, r))
        throw std::runtime_error("MusicEvaluator: covariance eigendecomposition failed");
    m_es = evec.tail_cols(sources);
}

arma::cx_vec MusicEvaluator::steering(double angle_deg) const
{
    const arma::cx_vec resp = arma::conj(m_w.t() * beam_response(m_tx, angle_deg));
    return arma::kron(resp, rx_steering(m_rx, angle_deg));
}

double MusicEvaluator::operator()(double angle_deg) const
{
    const arma::cx_vec u = steering(angle_deg);
    const double uu = std::real(arma::cdot(u, u));
    if (!(uu > 0.0))
        return 0.0;
    // ||P_noise u||^2 = ||u||^2 - ||E_s^H u||^2; the floor guards cancellation
    const double sig = arma::accu(arma::square(arma::abs(m_es.t() * u)));
    const double den = std::max(uu - sig, 1e-12 * uu);
    return 1.0 / den;
}

MusicSpectrum music_spectrum(const MusicEvaluator &eval, const AngularGrid &grid)
{
    MusicSpectrum spec;
    spec.angles_deg = grid.deg;
    spec.value.set_size(grid.points());
    for (arma::uword q = 0; q < grid.points(); q++)
        spec.value[q] = eval(grid.deg[q]);
    return spec;
}

std::vector<arma::uword> spectrum_peaks(const arma::vec &value)
{
    std::vector<arma::uword> idx;
    const arma::uword q = value.n_elem;
    for (arma::uword i = 1; i + 1 < q; i++)
    {
        if (!(value[i] > value[i - 1]))
            continue;
        arma::uword j = i;
        while (j + 1 < q && value[j + 1] == value[i])
            j++;
        if (j + 1 < q && value[j + 1] < value[i])
            idx.push_back(i);
        i = j;
    }
    std::sort(idx.begin(), idx.end(), [&value](arma::uword a, arma::uword b) { return value[a] > value[b]; });
    return idx;
}

std::vector<double> music_estimate(const MusicSpectrum &spectrum, arma::uword sources)
{
    const std::vector<arma::uword> idx = spectrum_peaks(spectrum.value);
    std::vector<double> out;
    for (std::size_t i = 0; i < idx.size() && i < sources; i++)
        out.push_back(spectrum.angles_deg[idx[i]]);
    std::sort(out.begin(), out.end());
    return out;
}

bool resolved(const std::vector<double> &peaks_deg, const std::vector<double> &truth_deg)
{
    if (truth_deg.size() < 2)
        throw std::invalid_argument("resolved: need at least two true angles");
    if (peaks_deg.size() < truth_deg.size())
        return false;

    std::vector<double> tr = truth_deg;
    std::sort(tr.begin(), tr.end());
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < tr.size(); i++)
        sep = std::min(sep, tr[i + 1] - tr[i]);
    if (!(sep > 0.0))
        throw std::invalid_argument("resolved: true angles must be distinct");
    const double tol = 0.5 * sep;

    std::vector<std::size_t> used;
    for (double t : tr)
    {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < peaks_deg.size(); j++)
        {
            const double d = std::abs(peaks_deg[j] - t);
            if (d < bd)
            {
                bd = d;
                best = j;
            }
        }
        if (bd > tol || std::find(used.begin(), used.end(), best) != used.end())
            return false;
        used.push_back(best);
    }
    return true;
}

} // namespace txbeam
