/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#ifndef DSTREAM_STRATEGIES_MURMUR_HPP_
#define DSTREAM_STRATEGIES_MURMUR_HPP_

#include <dstream/core/value.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace dstream {

/// MurmurHash3, x86 32-bit variant.
std::uint32_t murmur3_x86_32(std::span<const std::byte> data, std::uint32_t seed);
std::uint32_t murmur3_x86_32(std::string_view data, std::uint32_t seed);

inline constexpr std::uint32_t kHashSeed0 = 0;
inline constexpr std::uint32_t kHashSeed1 = 0xB0F57EE3;
inline constexpr std::uint32_t kHashSeed2 = 0x9747B28C;

/// Seed of hash function h_i. h_3 onwards are derived from the index.
std::uint32_t hash_seed(std::size_t i);

/// h_i(key): strings hash their raw bytes, other values their canonical encoding.
std::uint32_t key_hash(const Value& key, std::size_t i = 0);

/// h_i(key) mod n.
inline std::size_t key_slot(const Value& key, std::size_t n, std::size_t i = 0) {
    return key_hash(key, i) % n;
}

}// namespace dstream

#endif// DSTREAM_STRATEGIES_MURMUR_HPP_
