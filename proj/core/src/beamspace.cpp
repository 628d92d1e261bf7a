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

#include "txbeam/beamspace.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace txbeam
{

arma::cx_vec flip_conjugate(const arma::cx_vec &v)
{
    return arma::conj(arma::reverse(v));
}

BeamspaceMatrix::BeamspaceMatrix(arma::cx_mat w_, double total_power_) : w(std::move(w_)), total_power(total_power_)
{
    if (w.n_rows == 0 || w.n_cols == 0)
        throw std::invalid_argument("BeamspaceMatrix: empty matrix");
    if (!(total_power > 0.0))
        throw std::invalid_argument("BeamspaceMatrix: total power must be positive");
}

arma::cx_mat BeamspaceMatrix::free_columns() const
{
    if (w.n_cols % 2 != 0)
        throw std::logic_error("BeamspaceMatrix: odd waveform count has no half split");
    return w.cols(0, w.n_cols / 2 - 1);
}

BeamspaceMatrix BeamspaceMatrix::from_free_columns(const arma::cx_mat &free_cols, double total_power)
{
    if (free_cols.n_cols == 0)
        throw std::invalid_argument("from_free_columns: no columns");
    arma::cx_mat full(free_cols.n_rows, 2 * free_cols.n_cols);
    full.head_cols(free_cols.n_cols) = free_cols;
    for (arma::uword k = 0; k < free_cols.n_cols; k++)
        full.col(free_cols.n_cols + k) = flip_conjugate(free_cols.col(k));
    return BeamspaceMatrix(std::move(full), total_power);
}

arma::vec BeamspaceMatrix::row_power() const
{
    return arma::sum(arma::square(arma::abs(w)), 1);
}

double BeamspaceMatrix::row_power_residual() const
{
    const double share = total_power / double(w.n_rows);
    return arma::abs(row_power() - share).max();
}

double BeamspaceMatrix::pairing_residual() const
{
    if (w.n_cols % 2 != 0)
        return arma::datum::inf;
    const arma::uword p = pairs();
    double worst = 0.0;
    for (arma::uword k = 0; k < p; k++)
    {
        const double r = arma::abs(w.col(p + k) - flip_conjugate(w.col(k))).max();
        worst = std::max(worst, r);
    }
    return worst;
}

bool BeamspaceMatrix::is_paired(double tol) const
{
    return w.n_cols % 2 == 0 && pairing_residual() <= tol;
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void save_beamspace(const BeamspaceMatrix &bm, std::ostream &os)
{
    os << "txbeam-w v1\n";
    os << bm.w.n_rows << " " << bm.w.n_cols << " " << format_double(bm.total_power) << "\n";
    for (arma::uword k = 0; k < bm.w.n_cols; k++)
        for (arma::uword i = 0; i < bm.w.n_rows; i++)
            os << format_double(bm.w(i, k).real()) << "," << format_double(bm.w(i, k).imag()) << "\n";
}

void save_beamspace(const BeamspaceMatrix &bm, const std::string &path)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("save_beamspace: cannot open '" + path + "' for writing");
    save_beamspace(bm, os);
    if (!os.good())
        throw std::runtime_error("save_beamspace: write to '" + path + "' failed");
}

namespace
{

double parse_double(const std::string &tok, const char *what)
{
    const char *begin = tok.c_str();
    char *end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || end != begin + tok.size())
        throw std::runtime_error(std::string("load_beamspace: malformed ") + what + " '" + tok + "'");
    return v;
}

} // namespace

BeamspaceMatrix load_beamspace(std::istream &is)
{
    std::string line;
    if (!std::getline(is, line) || line != "txbeam-w v1")
        throw std::runtime_error("load_beamspace: missing 'txbeam-w v1' header");

    arma::uword m = 0, k = 0;
    std::string power_tok;
    if (!(is >> m >> k >> power_tok))
        throw std::runtime_error("load_beamspace: malformed dimension line");
    if (m == 0 || k == 0)
        throw std::runtime_error("load_beamspace: zero dimensions");
    const double pt = parse_double(power_tok, "power");

    arma::cx_mat w(m, k);
    std::getline(is, line); // consume end of dimension line
    for (arma::uword col = 0; col < k; col++)
        for (arma::uword row = 0; row < m; row++)
        {
            if (!std::getline(is, line))
                throw std::runtime_error("load_beamspace: truncated entry list");
            const auto comma = line.find(',');
            if (comma == std::string::npos)
                throw std::runtime_error("load_beamspace: entry without comma: '" + line + "'");
            const double re = parse_double(line.substr(0, comma), "real part");
            const double im = parse_double(line.substr(comma + 1), "imaginary part");
            w(row, col) = {re, im};
        }
    return BeamspaceMatrix(std::move(w), pt);
}

BeamspaceMatrix load_beamspace(const std::string &path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("load_beamspace: cannot open '" + path + "'");
    return load_beamspace(is);
}

} // namespace txbeam
