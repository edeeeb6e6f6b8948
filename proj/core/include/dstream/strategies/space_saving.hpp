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
#ifndef DSTREAM_STRATEGIES_SPACE_SAVING_HPP_
#define DSTREAM_STRATEGIES_SPACE_SAVING_HPP_

#include <dstream/core/value.hpp>

#include <cstdint>
#include <set>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace dstream {

/**
 * Space-Saving frequency sketch with at most `capacity` counters.
 *
 * When full, an untracked key replaces a minimum counter (the least recently
 * updated one among equals) and inherits its count as error.
 */
class SpaceSaving {
  public:
    struct Counter {
        std::uint64_t count = 0;
        std::uint64_t error = 0;
    };

    explicit SpaceSaving(std::size_t capacity);

    void offer(const Value& key);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return counters_.size(); }
    std::uint64_t n_seen() const { return n_seen_; }
    bool contains(const Value& key) const { return counters_.contains(key); }
    /// Tracked counter or nullptr.
    const Counter* find(const Value& key) const;
    /// Keys with count >= theta * n_seen, ordered by key.
    std::vector<Value> heavy_hitters(double theta) const;
    bool is_heavy(const Value& key, double theta) const;
    /// Tracked keys and counters, ordered by key.
    std::vector<std::pair<Value, Counter>> counters() const;

  private:
    struct Entry {
        Counter counter;
        std::uint64_t touched = 0;
    };
    // (count, touched, key): the first element is the eviction candidate.
    using Order = std::tuple<std::uint64_t, std::uint64_t, Value>;

    std::size_t capacity_;
    std::uint64_t n_seen_ = 0;
    std::uint64_t clock_ = 0;
    std::unordered_map<Value, Entry> counters_;
    std::set<Order> order_;
};

/// Capacity for a heavy-hitter threshold: ceil(2 / theta).
std::size_t sketch_capacity_for(double theta);

}// namespace dstream

#endif// DSTREAM_STRATEGIES_SPACE_SAVING_HPP_
