// SPDX-License-Identifier: Apache-2.0
//
// beampred: multi-modal mmWave beam prediction toolkit
// Copyright (C) 2026 The beampred authors
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

#ifndef BEAMPRED_RNG_HPP
#define BEAMPRED_RNG_HPP

#include <cstdint>
#include <random>

namespace beampred
{
    using Rng = std::mt19937_64;

    // SplitMix64 finalizer
    constexpr std::uint64_t mix64(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Independent sub-seed for (stream, index). Generating item i from derive_seed(seed, stream, i)
    // makes the output independent of how an index range is partitioned across workers.
    constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0)
    {
        return mix64(mix64(mix64(seed) ^ (stream * 0xd6e8feb86659fd93ULL)) ^ index);
    }

    // Named streams
    namespace stream
    {
        inline constexpr std::uint64_t trajectory = 1;
        inline constexpr std::uint64_t gps = 2;
        inline constexpr std::uint64_t detection = 3;
        inline constexpr std::uint64_t split = 4;
        inline constexpr std::uint64_t subsample = 5;
        inline constexpr std::uint64_t init = 6;
        inline constexpr std::uint64_t shuffle = 7;
        inline constexpr std::uint64_t dropout = 8;
        inline constexpr std::uint64_t vision = 9;
        inline constexpr std::uint64_t position = 10;
        inline constexpr std::uint64_t fusion = 11;
    }
}

#endif
