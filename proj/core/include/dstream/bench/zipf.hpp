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
#ifndef DSTREAM_BENCH_ZIPF_HPP_
#define DSTREAM_BENCH_ZIPF_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace dstream::bench {

struct ZipfConfig {
    std::size_t n = 10000;
    /// 0 gives the uniform distribution.
    double z = 1.0;
    std::size_t record_count = 0;
    std::uint64_t seed = 0;
};

/// H(n, z) = sum_{i=1..n} i^-z.
double harmonic(std::size_t n, double z);

/// Samples ranks 1..n with p(r) = r^-z / H(n, z).
class ZipfSampler {
  public:
    /// Throws InvalidConfig for n < 1 or a negative or non-finite z.
    ZipfSampler(std::size_t n, double z, std::uint64_t seed);

    std::size_t next();
    double pmf(std::size_t rank) const;
    std::size_t n() const { return cdf_.size(); }

  private:
    std::vector<double> cdf_;
    double h_;
    double z_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// "word<rank>".
std::string zipf_word(std::size_t rank);

/// record_count words drawn from the configured distribution.
std::vector<std::string> zipf_generate(const ZipfConfig& config);

}// namespace dstream::bench

#endif// DSTREAM_BENCH_ZIPF_HPP_
