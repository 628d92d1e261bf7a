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

#include "txbeam/numerics.hpp"

#include <stdexcept>

namespace txbeam
{

double hermitian_residual(const arma::cx_mat &X)
{
    const double scale = arma::norm(X, "fro");
    if (scale == 0.0)
        return 0.0;
    return arma::norm(X - X.t(), "fro") / scale;
}

bool is_hermitian(const arma::cx_mat &X, double tol)
{
    return X.is_square() && hermitian_residual(X) <= tol;
}

void herm_eig(const arma::cx_mat &X, arma::vec &vals, arma::cx_mat &vecs)
{
    if (!X.is_square())
        throw std::invalid_argument("herm_eig: matrix is not square");
    if (hermitian_residual(X) > 1e-10)
        throw std::invalid_argument("herm_eig: matrix is not Hermitian");

    // eig_sym wants an exactly Hermitian input; fold roundoff away
    arma::cx_mat H = 0.5 * (X + X.t());
    arma::vec v;
    arma::cx_mat Q;
    if (!arma::eig_sym(v, Q, H, "std"))
        throw std::runtime_error("herm_eig: eigendecomposition failed");

    // ascending -> descending
    vals = arma::reverse(v);
    vecs = arma::fliplr(Q);
}

arma::vec trapezoid_weights(const arma::vec &x)
{
    const arma::uword n = x.n_elem;
    if (n < 2)
        throw std::invalid_argument("trapezoid: need at least two abscissa points");
    for (arma::uword i = 0; i + 1 < n; i++)
        if (x[i + 1] <= x[i])
            throw std::invalid_argument("trapezoid: abscissa must be strictly increasing");

    arma::vec w(n, arma::fill::zeros);
    for (arma::uword i = 0; i + 1 < n; i++)
    {
        const double h = 0.5 * (x[i + 1] - x[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    return w;
}

double trapezoid(const arma::vec &x, const arma::vec &f)
{
    if (f.n_elem != x.n_elem)
        throw std::invalid_argument("trapezoid: abscissa/value length mismatch");
    return arma::dot(trapezoid_weights(x), f);
}

arma::cx_mat trapezoid(const arma::vec &x, const std::vector<arma::cx_mat> &F)
{
    if (F.size() != x.n_elem)
        throw std::invalid_argument("trapezoid: abscissa/value length mismatch");
    const arma::vec w = trapezoid_weights(x);
    arma::cx_mat acc(F[0].n_rows, F[0].n_cols, arma::fill::zeros);
    for (arma::uword i = 0; i < x.n_elem; i++)
        acc += w[i] * F[i];
    return acc;
}

} // namespace txbeam
