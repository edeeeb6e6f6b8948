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
#include <dstream/bench/zipf.hpp>
#include <dstream/core/error.hpp>

#include <algorithm>
#include <cmath>

namespace dstream::bench {

double harmonic(std::size_t n, double z) {
    double h = 0;
    for (std::size_t i = n; i >= 1; --i) {
        h += std::pow(static_cast<double>(i), -z);
    }
    return h;
}

ZipfSampler::ZipfSampler(std::size_t n, double z, std::uint64_t seed) : z_(z), rng_(seed) {
    if (n < 1) {
        throw Error(ErrorCode::kInvalidConfig, "zipf vocabulary must not be empty");
    }
    if (!std::isfinite(z) || z < 0) {
        throw Error(ErrorCode::kInvalidConfig, "zipf exponent must be finite and non-negative");
    }
    h_ = harmonic(n, z);
    cdf_.resize(n);
    double acc = 0;
    for (std::size_t r = 1; r <= n; ++r) {
        acc += std::pow(static_cast<double>(r), -z) / h_;
        cdf_[r - 1] = acc;
    }
    cdf_.back() = 1.0;
}

std::size_t ZipfSampler::next() {
    double u = uniform_(rng_);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1)) + 1;
}

double ZipfSampler::pmf(std::size_t rank) const {
    if (rank < 1 || rank > cdf_.size()) {
        return 0;
    }
    return std::pow(static_cast<double>(rank), -z_) / h_;
}

std::string zipf_word(std::size_t rank) {
    return "word" + std::to_string(rank);
}

std::vector<std::string> zipf_generate(const ZipfConfig& config) {
    ZipfSampler s(config.n, config.z, config.seed);
    std::vector<std::string> out;
    out.reserve(config.record_count);
    for (std::size_t i = 0; i < config.record_count; ++i) {
        out.push_back(zipf_word(s.next()));
    }
    return out;
}

}// namespace dstream::bench
