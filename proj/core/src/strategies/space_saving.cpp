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
#include <dstream/core/error.hpp>
#include <dstream/strategies/space_saving.hpp>

#include <algorithm>
#include <cmath>

namespace dstream {

SpaceSaving::SpaceSaving(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) {
        throw Error(ErrorCode::kInvalidConfig, "space-saving capacity must be positive");
    }
    counters_.reserve(capacity);
}

void SpaceSaving::offer(const Value& key) {
    ++n_seen_;
    ++clock_;
    if (auto it = counters_.find(key); it != counters_.end()) {
        auto& e = it->second;
        order_.erase(Order{e.counter.count, e.touched, key});
        ++e.counter.count;
        e.touched = clock_;
        order_.emplace(e.counter.count, e.touched, key);
        return;
    }
    if (counters_.size() < capacity_) {
        counters_.emplace(key, Entry{Counter{1, 0}, clock_});
        order_.emplace(1, clock_, key);
        return;
    }
    auto victim = order_.begin();
    auto min_count = std::get<0>(*victim);
    counters_.erase(std::get<2>(*victim));
    order_.erase(victim);
    counters_.emplace(key, Entry{Counter{min_count + 1, min_count}, clock_});
    order_.emplace(min_count + 1, clock_, key);
}

const SpaceSaving::Counter* SpaceSaving::find(const Value& key) const {
    auto it = counters_.find(key);
    return it == counters_.end() ? nullptr : &it->second.counter;
}

bool SpaceSaving::is_heavy(const Value& key, double theta) const {
    auto c = find(key);
    return c && static_cast<double>(c->count) >= theta * static_cast<double>(n_seen_);
}

std::vector<Value> SpaceSaving::heavy_hitters(double theta) const {
    std::vector<Value> out;
    for (const auto& [key, e] : counters_) {
        if (static_cast<double>(e.counter.count) >= theta * static_cast<double>(n_seen_)) {
            out.push_back(key);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<Value, SpaceSaving::Counter>> SpaceSaving::counters() const {
    std::vector<std::pair<Value, Counter>> out;
    out.reserve(counters_.size());
    for (const auto& [key, e] : counters_) {
        out.emplace_back(key, e.counter);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

std::size_t sketch_capacity_for(double theta) {
    if (!(theta > 0 && theta < 1)) {
        throw Error(ErrorCode::kInvalidConfig, "heavy-hitter threshold must lie in (0, 1)");
    }
    return static_cast<std::size_t>(std::ceil(2.0 / theta - 1e-9));
}

}// namespace dstream
