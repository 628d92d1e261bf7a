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

#ifndef TXBEAM_DOA_HPP
#define TXBEAM_DOA_HPP

#include <functional>
#include <vector>

#include <armadillo>

#include "txbeam/arrays.hpp"
#include "txbeam/beamspace.hpp"
#include "txbeam/sim.hpp"

namespace txbeam
{

/*!
 * Mapping from direction to the phase difference between the two waveform
 * half-sums of a beamspace matrix.
 *
 * The half-sums S1(theta) = sum_{k <= K/2} d^H(theta) w_k and
 * S2(theta) = sum_{k > K/2} d^H(theta) w_k differ per target only by the
 * factor S2/S1, so a rotational-invariance estimator recovers the phase
 * difference dpsi(theta) = arg S1 - arg S2. For a paired matrix the two
 * half-sums also have equal magnitude at every direction; for an unpaired
 * one estimation still works but loses that guarantee. The profile tabulates
 * dpsi on a grid inside each sector, unwrapped sector by sector, and is
 * inverted to map estimated phase differences back to angles.
 */
struct PhaseProfile
{
    std::vector<arma::vec> angles_deg; //!< Grid angles, one vector per sector
    std::vector<arma::vec> dpsi;       //!< Unwrapped phase difference in radians, aligned with angles_deg
    bool degenerate = false;           //!< True when some half-sum magnitude fell below threshold

    //! Unwrapped phase difference at an angle inside a sector (linear interpolation)
    double value_at(double angle_deg) const;
};

/*!
 * Tabulates the half-sum phase difference across all sectors of a spec.
 *
 * Accepts any matrix with an even waveform count; pairing is not required.
 * Grid points where a half-sum magnitude drops below 1e-6 * sqrt(P_t * M)
 * give an unreliable phase; the profile is still built but flagged
 * degenerate.
 *
 * @param bm        Beamspace matrix with an even number of waveforms
 * @param tx        Transmit array
 * @param spec      Sector specification; profile covers each sector
 * @param step_deg  Tabulation step in degrees, default 1.0
 */
PhaseProfile build_phase_profile(const BeamspaceMatrix &bm, const TransmitArray &tx, const SectorSpec &spec,
                                 double step_deg = 1.0);

/*!
 * Angles whose profile phase equals `dpsi` up to an integer multiple of 2*pi.
 *
 * Scans every sector branch of the profile for crossings of dpsi + 2*pi*n and
 * interpolates linearly between grid points. Angles closer than 1e-9 degrees
 * are merged. The result may be empty when the requested phase lies outside
 * the profile range of every sector.
 */
std::vector<double> invert_phase(const PhaseProfile &profile, double dpsi);

//! Scores a direction hypothesis; larger is better. Used to pick among ambiguous inversions.
using SpectrumEvaluator = std::function<double(double angle_deg)>;

//! Result of the rotational-invariance estimator
struct EspritEstimate
{
    std::vector<double> angles_deg; //!< Estimated directions, ascending
    std::vector<double> dpsi;       //!< Recovered phase differences, aligned with angles_deg
    bool ambiguous = false;         //!< A phase inversion had several candidates and no evaluator decided
    bool clamped = false;           //!< A phase fell outside the profile range; nearest grid angle used
};

/*!
 * Search-free direction estimation from the two accumulated half-sums.
 *
 * Stacks z(t) = [g1(t); g2(t)], forms the sample covariance, extracts the
 * `sources`-dimensional signal subspace and solves the shift-invariance
 * equation between the two halves by least squares. Each eigenvalue's phase
 * is mapped back to an angle through the profile; when several sector angles
 * share the same phase modulo 2*pi the optional evaluator picks the best one,
 * otherwise the lowest candidate is kept and the estimate is flagged
 * ambiguous.
 *
 * @param g1            First half-sum snapshots, N x T
 * @param g2            Second half-sum snapshots, N x T
 * @param sources       Number of sources to estimate (must be <= T)
 * @param profile       Phase profile of the matrix used for transmission
 * @param disambiguator Optional spectrum callback for ambiguous inversions
 *
 * @throws std::invalid_argument on dimension mismatch or sources > snapshots
 * @throws std::runtime_error when the snapshots do not carry `sources` independent components
 */
EspritEstimate estimate_esprit(const arma::cx_mat &g1, const arma::cx_mat &g2, arma::uword sources,
                               const PhaseProfile &profile, const SpectrumEvaluator &disambiguator = {});

/*!
 * Subspace spectrum evaluator over the virtual transmit-receive array.
 *
 * Vectorizes each snapshot matrix into an N*K vector whose steering is
 * kron(conj(W^H d(theta)), b(theta)), extracts the signal subspace of the
 * sample covariance and exposes the reciprocal noise-subspace projection
 * 1 / (||u||^2 - ||E_s^H u||^2) as a callable spectrum.
 */
class MusicEvaluator
{
  public:
    /*!
     * @param snap     Simulated snapshots, N x K x T
     * @param bm       Beamspace matrix used for transmission
     * @param tx       Transmit array
     * @param rx       Receive array
     * @param sources  Signal-subspace dimension
     *
     * @throws std::invalid_argument on dimension mismatch or sources >= N*K
     */
    MusicEvaluator(const SnapshotSet &snap, const BeamspaceMatrix &bm, const TransmitArray &tx,
                   const ReceiveArray &rx, arma::uword sources);

    //! Spectrum value at one direction
    double operator()(double angle_deg) const;

    //! Steering vector of the virtual array at one direction, length N*K
    arma::cx_vec steering(double angle_deg) const;

  private:
    arma::cx_mat m_w;    // beamspace matrix copy
    TransmitArray m_tx;
    ReceiveArray m_rx;
    arma::cx_mat m_es;   // signal subspace, N*K x sources
};

//! Sampled subspace spectrum
struct MusicSpectrum
{
    arma::vec angles_deg;
    arma::vec value;
};

//! Evaluates the subspace spectrum on a grid
MusicSpectrum music_spectrum(const MusicEvaluator &eval, const AngularGrid &grid);

/*!
 * Indices of strict local maxima of `value`, tallest first.
 *
 * Interior points only; plateaus count once at their left edge.
 */
std::vector<arma::uword> spectrum_peaks(const arma::vec &value);

/*!
 * Angles of the `sources` tallest spectrum peaks, ascending.
 *
 * Returns fewer angles when the spectrum has fewer peaks.
 */
std::vector<double> music_estimate(const MusicSpectrum &spectrum, arma::uword sources);

/*!
 * Checks whether closely spaced sources were resolved.
 *
 * Requires at least as many peaks as true angles. Every true angle must have
 * a peak within half the smallest true angular separation, and no two true
 * angles may claim the same peak.
 *
 * @param peaks_deg  Estimated peak angles
 * @param truth_deg  True source angles (at least two)
 */
bool resolved(const std::vector<double> &peaks_deg, const std::vector<double> &truth_deg);

} // namespace txbeam

#endif
