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
#include <dstream/strategies/murmur.hpp>

#include <bit>
#include <cstring>

namespace dstream {

namespace {

std::uint32_t load32(const std::byte* p) {
    auto b = reinterpret_cast<const unsigned char*>(p);
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

std::uint32_t fmix32(std::uint32_t h) {
    h ^= h >> 16;
    h *= 0x85ebca6b;
    h ^= h >> 13;
    h *= 0xc2b2ae35;
    h ^= h >> 16;
    return h;
}

}// namespace

std::uint32_t murmur3_x86_32(std::span<const std::byte> data, std::uint32_t seed) {
    constexpr std::uint32_t c1 = 0xcc9e2d51;
    constexpr std::uint32_t c2 = 0x1b873593;

    const std::size_t len = data.size();
    const std::size_t nblocks = len / 4;
    std::uint32_t h1 = seed;

    for (std::size_t i = 0; i < nblocks; ++i) {
        std::uint32_t k1 = load32(data.data() + i * 4);
        k1 *= c1;
        k1 = std::rotl(k1, 15);
        k1 *= c2;
        h1 ^= k1;
        h1 = std::rotl(h1, 13);
        h1 = h1 * 5 + 0xe6546b64;
    }

    const auto* tail = reinterpret_cast<const unsigned char*>(data.data() + nblocks * 4);
    std::uint32_t k1 = 0;
    switch (len & 3) {
        case 3: k1 ^= static_cast<std::uint32_t>(tail[2]) << 16; [[fallthrough]];
        case 2: k1 ^= static_cast<std::uint32_t>(tail[1]) << 8; [[fallthrough]];
        case 1:
            k1 ^= tail[0];
            k1 *= c1;
            k1 = std::rotl(k1, 15);
            k1 *= c2;
            h1 ^= k1;
    }

    h1 ^= static_cast<std::uint32_t>(len);
    return fmix32(h1);
}

std::uint32_t murmur3_x86_32(std::string_view data, std::uint32_t seed) {
    return murmur3_x86_32(std::as_bytes(std::span(data.data(), data.size())), seed);
}

std::uint32_t hash_seed(std::size_t i) {
    switch (i) {
        case 0: return kHashSeed0;
        case 1: return kHashSeed1;
        case 2: return kHashSeed2;
        default: {
            auto idx = static_cast<std::uint32_t>(i);
            unsigned char le[4] = {static_cast<unsigned char>(idx), static_cast<unsigned char>(idx >> 8),
                                   static_cast<unsigned char>(idx >> 16), static_cast<unsigned char>(idx >> 24)};
            return murmur3_x86_32(std::string_view(reinterpret_cast<const char*>(le), 4), kHashSeed2);
        }
    }
}

std::uint32_t key_hash(const Value& key, std::size_t i) {
    if (key.is_string()) {
        return murmur3_x86_32(key.as_string(), hash_seed(i));
    }
    return murmur3_x86_32(key.encoded(), hash_seed(i));
}

}// namespace dstream
