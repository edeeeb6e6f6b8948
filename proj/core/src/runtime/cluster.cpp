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
#include <dstream/runtime/cluster.hpp>

#include <dstream/core/error.hpp>

namespace dstream {

namespace {

std::uint64_t hashPurpose(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h = (h ^ c) * 0x100000001b3ULL;
    }
    return h;
}

}// namespace

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose, std::uint64_t salt) {
    return mix64(mix64(seed ^ hashPurpose(purpose)) ^ mix64(salt + 0x632be59bd9b4e019ULL));
}

void ClusterConfig::validate() const {
    if (node_count == 0) {
        throw Error(ErrorCode::kInvalidConfig, "node_count must be positive");
    }
    if (executor_threads_per_node == 0) {
        throw Error(ErrorCode::kInvalidConfig, "executor_threads_per_node must be positive");
    }
    if (simulated_work.count() < 0) {
        throw Error(ErrorCode::kInvalidConfig, "simulated_work must not be negative");
    }
}

}// namespace dstream
