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
#ifndef DSTREAM_TESTS_SUPPORT_HPP_
#define DSTREAM_TESTS_SUPPORT_HPP_

#include <dstream/core/value.hpp>
#include <dstream/core/workflow.hpp>
#include <dstream/operators/operators.hpp>
#include <dstream/runtime/application.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace dstream::testing {

/// Seeded generator for property tests.
class Gen {
  public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::int64_t int_in(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
    }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(int_in(0, static_cast<std::int64_t>(n) - 1)); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
    std::uint64_t u64() { return rng_(); }
    std::mt19937_64& engine() { return rng_; }

    /// Words "k<i>" with i drawn from [0, keys), skewed towards small i when skewed is set.
    std::vector<Value> words(std::size_t n, std::size_t keys, bool skewed = false) {
        std::vector<Value> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t k = skewed ? std::min(index(keys), index(keys)) : index(keys);
            out.emplace_back("k" + std::to_string(k));
        }
        return out;
    }

  private:
    std::mt19937_64 rng_;
};

/// Thread-safe sink consumer collecting payloads.
class Collector {
  public:
    ops::Consumer consumer() {
        return [this](const Value& v) {
            std::lock_guard lk(mu_);
            values_.push_back(v);
        };
    }
    std::vector<Value> values() const {
        std::lock_guard lk(mu_);
        return values_;
    }
    std::multiset<Value> multiset() const {
        auto v = values();
        return {v.begin(), v.end()};
    }
    std::size_t size() const {
        std::lock_guard lk(mu_);
        return values_.size();
    }

  private:
    mutable std::mutex mu_;
    std::vector<Value> values_;
};

/// Sequential word count fold: word -> final count.
inline std::map<Value, std::int64_t> word_count_oracle(const std::vector<Value>& words) {
    std::map<Value, std::int64_t> out;
    for (const auto& w : words) {
        ++out[w];
    }
    return out;
}

/// Multiset of (word, count) pairs as a merged WordCount run emits them.
inline std::multiset<Value> final_counts_oracle(const std::vector<Value>& words) {
    std::multiset<Value> out;
    for (const auto& [w, c] : word_count_oracle(words)) {
        out.insert(Value::list({w, c}));
    }
    return out;
}

/// Running (word, count) emissions of a key-grouped count.
inline std::multiset<Value> running_counts_oracle(const std::vector<Value>& words) {
    std::map<Value, std::int64_t> counts;
    std::multiset<Value> out;
    for (const auto& w : words) {
        out.insert(Value::list({w, ++counts[w]}));
    }
    return out;
}

/// Brute-force equi-join of two row lists.
inline std::multiset<Value> nested_loop_join(const std::vector<Value>& left, const std::vector<Value>& right,
                                             const std::function<Value(const Value&)>& left_key,
                                             const std::function<Value(const Value&)>& right_key,
                                             const std::function<Value(const Value&, const Value&)>& join) {
    std::multiset<Value> out;
    for (const auto& l : left) {
        for (const auto& r : right) {
            if (left_key(l) == right_key(r)) {
                out.insert(join(l, r));
            }
        }
    }
    return out;
}

inline ClusterConfig deterministic_cluster(std::size_t nodes, std::uint64_t seed = 0) {
    ClusterConfig c;
    c.node_count = nodes;
    c.seed = seed;
    c.executor = ExecutorMode::kDeterministic;
    return c;
}

inline ClusterConfig threaded_cluster(std::size_t nodes, std::size_t threads, std::uint64_t seed = 0,
                                      bool jitter = false) {
    ClusterConfig c;
    c.node_count = nodes;
    c.executor_threads_per_node = threads;
    c.seed = seed;
    c.executor = ExecutorMode::kThreaded;
    c.schedule_jitter = jitter;
    return c;
}

}// namespace dstream::testing

#endif// DSTREAM_TESTS_SUPPORT_HPP_
