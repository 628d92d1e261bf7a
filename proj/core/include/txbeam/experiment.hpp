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

#ifndef TXBEAM_EXPERIMENT_HPP
#define TXBEAM_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <armadillo>

#include "txbeam/arrays.hpp"
#include "txbeam/beamspace.hpp"

namespace txbeam
{

/*!
 * Full description of one Monte-Carlo experiment.
 *
 * The config maps one to one onto an INI-style file with sections [array],
 * [sector], [design], [scene] and [run]; see canonical_string() for the
 * exact shape. Every field except `threads` takes part in the config hash,
 * so two configs with equal hashes produce byte-identical outputs; `threads`
 * only schedules the work and never changes a result.
 */
struct ExperimentConfig
{
    // [array]
    arma::uword tx_elements = 10;     //!< Transmit elements (uniform linear array)
    double tx_spacing = 0.5;          //!< Transmit spacing in wavelengths
    arma::uword rx_elements = 10;     //!< Receive elements (random linear array)
    double rx_aperture = 9.0;         //!< Receive aperture in half wavelengths
    std::uint64_t geometry_seed = 7;  //!< Seed freezing the receive element positions

    // [sector]
    SectorSpec spec;                  //!< Sector union plus desired in-sector level

    // [design]
    double total_power = 10.0;        //!< Total transmit power P_t
    arma::uword waveforms = 0;        //!< Even waveform count; 0 selects from the sector width
    double energy_fraction = 0.9;     //!< Eigenvalue energy fraction for automatic selection
    arma::uword grid_points = 181;    //!< Design grid size over the visible region
    double sdp_tol = 1e-7;            //!< Relaxation solver tolerance
    arma::uword candidates = 500;     //!< Randomized rounding candidates
    arma::cx_mat mixing;              //!< K x K unitary for the "mixed" method; empty otherwise

    // [scene]
    std::vector<double> targets_deg;            //!< Target directions for accuracy runs
    std::vector<double> resolution_targets_deg; //!< Target directions for resolution runs
    double beta_var = 1.0;                      //!< Reflection coefficient variance
    arma::uword pulses = 50;                    //!< Pulses per trial

    // [run]
    std::vector<std::string> methods; //!< Subset of {traditional, joint, sdd, rotated, mixed}
    std::vector<double> snr_db;       //!< SNR grid in dB (reflection variance over noise variance)
    arma::uword trials = 500;         //!< Monte-Carlo trials per SNR point
    std::uint64_t seed = 1;           //!< Master seed; trials get derived streams
    arma::uword threads = 0;          //!< Worker threads; 0 uses the hardware count

    ExperimentConfig();

    //! Throws std::invalid_argument on any out-of-range field
    void validate() const;

    /*!
     * Canonical INI text: fixed section and key order, doubles printed with
     * 17 significant digits. parse(canonical_string()) reproduces the config
     * exactly, and the config hash is computed over this text.
     */
    std::string canonical_string() const;

    //! FNV-1a 64-bit hash of canonical_string()
    std::uint64_t hash() const;

    //! hash() as 16 lowercase hex digits, the form embedded in CSV outputs
    std::string hash_hex() const;

    //! Parses the INI form; unknown sections or keys are errors
    static ExperimentConfig parse(std::istream &is);
    static ExperimentConfig parse_file(const std::string &path);

    // Pinned study configurations. All use the same in-sector level 10^1.5,
    // the peak the reference designs are normalized to.
    // 1: one sector [-10, 10], two waveforms, designed matrix vs the same
    //    matrix mixed by a fixed 2x2 unitary that unbalances waveform power
    // 2: sectors [-40, -20] and [30, 50], four waveforms, traditional vs
    //    rotation-refined joint vs sector-decomposed design
    // 3: one sector [-10, 0], two waveforms, traditional vs joint
    // 4: one sector [-15, 15], four waveforms, traditional vs rotation-refined
    static ExperimentConfig example1();
    static ExperimentConfig example2();
    static ExperimentConfig example3();
    static ExperimentConfig example4();
};

//! Uniform baseline: W = sqrt(P_t/M) * I with K = M waveforms and a flat pattern P_t/(4*pi)
BeamspaceMatrix traditional_mimo(arma::uword antennas, double total_power);

//! Receive array frozen from the config's geometry seed
ReceiveArray configured_receive_array(const ExperimentConfig &cfg);

//! Waveform count after automatic selection (cfg.waveforms when nonzero)
arma::uword resolve_waveforms(const ExperimentConfig &cfg);

//! One method's design plus diagnostics
struct MethodDesign
{
    std::string method;
    BeamspaceMatrix matrix;
    double objective = 0.0;  //!< Rounded minmax pattern deviation; 0 for the baseline
    double sdp_delta = 0.0;  //!< Relaxation optimum; 0 for the baseline
    bool rotated = false;    //!< Coherence rotation was applied
};

/*!
 * Designs the transmit matrix one method uses.
 *
 * "traditional" is the uniform baseline; "joint" solves one relaxation over
 * all beam pairs; "sdd" designs each pair on its own subsector; "rotated" is
 * the joint design refined by the coherence rotation (needs four or more
 * waveforms); "mixed" is the joint design right-multiplied by cfg.mixing.
 * Designs are deterministic in (config, seed) and shared between experiment
 * kinds; "rotated" and "mixed" reuse the joint design's random stream so all
 * three share one base matrix.
 */
MethodDesign design_for_method(const ExperimentConfig &cfg, const std::string &method);

enum class ExperimentKind
{
    rmse,      //!< Accuracy: RMSE of search-free estimates against the scene targets
    resolution //!< Probability that spectrum peaks separate the resolution targets
};

//! One method's curve over the SNR grid
struct MethodCurve
{
    MethodDesign design;
    arma::vec snr_db;
    arma::vec value;     //!< RMSE in degrees, or resolution probability in [0, 1]
    arma::uvec failures; //!< Estimator failures per SNR point (excluded from RMSE, counted unresolved)
};

struct ExperimentResult
{
    ExperimentKind kind = ExperimentKind::rmse;
    std::uint64_t config_hash = 0;
    arma::uword trials = 0;
    std::vector<MethodCurve> curves;
};

/*!
 * Runs the Monte-Carlo study described by the config.
 *
 * Per method: design once, then for every SNR point run `trials` independent
 * trials. Accuracy trials estimate by the rotational-invariance method with
 * spectrum disambiguation and score sorted estimates against sorted truth;
 * resolution trials scan the subspace spectrum and apply the half-separation
 * criterion. Every trial draws from its own random stream derived from
 * (seed, method, SNR index, trial index), so results do not depend on the
 * parallel schedule. Per-trial estimator failures are counted, not fatal;
 * design failures propagate with method context.
 */
ExperimentResult run_experiment(const ExperimentConfig &cfg, ExperimentKind kind);

//! Curve table as CSV text: config-hash comment, header, one row per (method, SNR)
std::string curve_csv(const ExperimentResult &res);

//! Beampattern table as CSV text: angle, total pattern, one column per waveform
std::string beampattern_csv(const BeamspaceMatrix &bm, const TransmitArray &tx, std::uint64_t config_hash,
                            const AngularGrid &grid);

/*!
 * Writes all artifacts of a result into a directory (created when missing):
 * the curve table (rmse.csv or resolution.csv), one beampattern CSV and one
 * design matrix file per method. Returns the written paths in write order.
 * Identical (config, seed) reproduce every file byte for byte.
 */
std::vector<std::string> write_report(const ExperimentResult &res, const ExperimentConfig &cfg,
                                      const std::string &out_dir);

} // namespace txbeam

#endif
