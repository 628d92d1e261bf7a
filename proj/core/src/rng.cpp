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

#include "txbeam/rng.hpp"

#include <cmath>

namespace txbeam
{

namespace
{

std::uint64_t splitmix64(std::uint64_t &x)
{
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int k)
{
    return (v << k) | (v >> (64 - k));
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id)
{
    // Mix seed and stream id through separate splitmix chains so that
    // neighbouring stream ids do not yield correlated states.
    std::uint64_t x = seed ^ (0xD2B74407B1CE6E93ULL * (stream_id + 1));
    for (auto &s : s_)
        s = splitmix64(x);
    // xoshiro must not start at the all-zero state
    if (s_[0] == 0 && s_[1] == 0 && s_[2] == 0 && s_[3] == 0)
        s_[0] = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t RngStream::next_u64()
{
    // xoshiro256**
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::uniform()
{
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi)
{
    return lo + (hi - lo) * uniform();
}

double RngStream::gauss()
{
    if (has_spare_)
    {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; u1 shifted away from zero so the log is finite
    double u1 = uniform(), u2 = uniform();
    u1 = (u1 <= 0.0) ? 0x1.0p-53 : u1;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

std::complex<double> RngStream::cgauss(double var)
{
    const double s = std::sqrt(0.5 * var);
    const double re = gauss();
    const double im = gauss();
    return {s * re, s * im};
}

arma::vec RngStream::gauss_vec(arma::uword n)
{
    arma::vec v(n);
    for (arma::uword i = 0; i < n; i++)
        v[i] = gauss();
    return v;
}

arma::cx_vec RngStream::cgauss_vec(arma::uword n, double var)
{
    arma::cx_vec v(n);
    for (arma::uword i = 0; i < n; i++)
        v[i] = cgauss(var);
    return v;
}

arma::cx_vec unit_circle_vector(arma::uword n, RngStream &rng)
{
    arma::cx_vec v(n);
    for (arma::uword i = 0; i < n; i++)
    {
        const double phi = 2.0 * M_PI * rng.uniform();
        v[i] = {std::cos(phi), std::sin(phi)};
    }
    return v;
}

} // namespace txbeam
