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

#include <armadillo>

namespace txbeam
{

// Relative Frobenius distance between X and its conjugate transpose
double hermitian_residual(const arma::cx_mat &X);

bool is_hermitian(const arma::cx_mat &X, double tol = 1e-10);

// Eigendecomposition of a Hermitian matrix, eigenvalues descending,
// columns of vecs are the matching orthonormal eigenvectors.
// Throws std::invalid_argument if X is not square or not Hermitian.
void herm_eig(const arma::cx_mat &X, arma::vec &vals, arma::cx_mat &vecs);

// Trapezoid rule on an arbitrary increasing abscissa
double trapezoid(const arma::vec &x, const arma::vec &f);

// Trapezoid rule for matrix-valued integrands: sum_i c_i * F[i]
// where c_i are the trapezoid weights of x
arma::cx_mat trapezoid(const arma::vec &x, const std::vector<arma::cx_mat> &F);

// Trapezoid weights of an increasing abscissa (w[i] multiplies f(x[i]))
arma::vec trapezoid_weights(const arma::vec &x);

} // namespace txbeam
