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

#include <iosfwd>
#include <string>

#include <armadillo>

namespace txbeam
{

// Conjugate flip: entry i of the result is conj(v[M-1-i]).
// A beam w and its conjugate flip have the same response magnitude
// |w^H d(theta)| at every angle for a uniform linear array, which is the
// property the paired beamspace layout is built on.
arma::cx_vec flip_conjugate(const arma::cx_vec &v);

// M x K transmit beamspace matrix with its total power budget.
//
// Designed matrices use the paired layout: column pairs/2+k is the conjugate
// flip of column k, so the two halves have identical response magnitudes.
// The type also carries non-paired matrices (uniform baseline, matrices
// right-multiplied by a general unitary); pairedness is a query, not an
// invariant of the type.
struct BeamspaceMatrix
{
    arma::cx_mat w;     // M x K, columns are per-waveform beamforming vectors
    double total_power; // P_t

    BeamspaceMatrix() : total_power(0.0) {}
    BeamspaceMatrix(arma::cx_mat w_, double total_power_);

    arma::uword antennas() const { return w.n_rows; }
    arma::uword waveforms() const { return w.n_cols; }
    arma::uword pairs() const { return w.n_cols / 2; }

    // First K/2 columns (the designed beams; the rest are derived flips
    // when the matrix is paired)
    arma::cx_mat free_columns() const;

    // Rebuild columns K/2+1..K as conjugate flips of the first half
    static BeamspaceMatrix from_free_columns(const arma::cx_mat &free_cols, double total_power);

    // Per-antenna emitted power: sum_k |w(i,k)|^2
    arma::vec row_power() const;

    // max_i |row_power(i) - P_t/M|
    double row_power_residual() const;

    // max over column pairs and rows of |w(:,pairs+k) - flip_conjugate(w(:,k))|
    double pairing_residual() const;

    bool is_paired(double tol = 1e-12) const;
};

// Text serialization. Format:
//   line 1: "txbeam-w v1"
//   line 2: M K P_t
//   then K*M lines "re,im", column-major (column 1 rows 1..M, column 2, ...)
// Values are printed with 17 significant digits, so a save/load round trip
// reproduces every double bit for bit.
void save_beamspace(const BeamspaceMatrix &bm, std::ostream &os);
void save_beamspace(const BeamspaceMatrix &bm, const std::string &path);
BeamspaceMatrix load_beamspace(std::istream &is);
BeamspaceMatrix load_beamspace(const std::string &path);

// 17-significant-digit decimal form that strtod parses back to the same bits
std::string format_double(double v);

} // namespace txbeam
