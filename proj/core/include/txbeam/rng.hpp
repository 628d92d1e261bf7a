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

#include <complex>
#include <cstdint>

#include <armadillo>

namespace txbeam
{

// Counter-seeded stream RNG (xoshiro256** with splitmix64 expansion).
//
// Two streams built from the same (seed, stream_id) produce identical draws
// bit for bit, on any platform, independent of how many other streams exist.
// That property is what makes Monte-Carlo runs reproducible under trial-level
// parallelism: every trial owns a stream derived from the master seed and the
// trial index, so the schedule cannot change the numbers.
class RngStream
{
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution
    double uniform();

    // Uniform on [lo, hi)
    double uniform(double lo, double hi);

    // Standard normal via Box-Muller (spare value cached)
    double gauss();

    // Circularly symmetric complex Gaussian with E|z|^2 = var
    std::complex<double> cgauss(double var);

    arma::vec gauss_vec(arma::uword n);
    arma::cx_vec cgauss_vec(arma::uword n, double var);

  private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Vector of unit-magnitude complex entries with phases uniform on [0, 2*pi)
arma::cx_vec unit_circle_vector(arma::uword n, RngStream &rng);

} // namespace txbeam
