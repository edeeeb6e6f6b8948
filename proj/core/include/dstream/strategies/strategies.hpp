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
#ifndef DSTREAM_STRATEGIES_STRATEGIES_HPP_
#define DSTREAM_STRATEGIES_STRATEGIES_HPP_

#include <dstream/core/strategy.hpp>

#include <cstddef>
#include <memory>
#include <vector>

namespace dstream {

/// One worker per cluster node; records stay on the node they arrive at.
StrategyPtr stateless_per_node_strategy();

struct ShuffleConfig {
    std::size_t worker_count = 1;
    bool merge_enabled = false;
};

/// Uniform seeded choice among worker_count buckets placed round-robin over the nodes.
StrategyPtr shuffle_strategy(ShuffleConfig config);
inline StrategyPtr shuffle_strategy(std::size_t worker_count) { return shuffle_strategy(ShuffleConfig{worker_count}); }

struct KeyedConfig {
    /// 0 places one aggregator per cluster node.
    std::size_t worker_count = 0;
};

/// Key grouping: every key is owned by the worker h_0(key) mod worker count.
StrategyPtr keyed_state_strategy(KeyedConfig config = {});

/// One forwarder routing decision, reported to a RoutingObserver.
struct RoutingDecision {
    WorkerRef forwarder;
    Value key;
    bool head = false;
    std::vector<std::size_t> candidates;
    std::vector<std::uint64_t> loads;  ///< forwarder-local counts of the candidates at decision time
    std::size_t chosen = 0;
};

class RoutingObserver {
  public:
    virtual ~RoutingObserver() = default;
    /// Called from forwarder process hooks; must be thread-safe.
    virtual void on_route(const RoutingDecision& decision) = 0;
};

struct SplitStrategyConfig {
    std::size_t worker_count = 2;
    /// Candidates for head keys under D-Choices.
    std::size_t d = 4;
    double head_threshold = 0.01;
    /// 0 derives ceil(2 / head_threshold).
    std::size_t sketch_capacity = 0;
    /// Records a forwarder must see before it reports head keys; 0 derives ceil(10 / head_threshold).
    std::size_t warmup = 0;
    bool merge_enabled = false;
    std::shared_ptr<RoutingObserver> observer;
};

/// Partial key grouping: two hash candidates, least loaded wins.
StrategyPtr pkg_strategy(SplitStrategyConfig config);
/// Head keys get d hash candidates, tail keys the two PKG candidates.
StrategyPtr d_choices_strategy(SplitStrategyConfig config);
/// Head keys may go to any bucket, tail keys to the two PKG candidates.
StrategyPtr w_choices_strategy(SplitStrategyConfig config);

/// Options understood by make_strategy.
struct StrategyOptions {
    std::size_t worker_count = 1;
    std::size_t d = 4;
    double head_threshold = 0.01;
    bool merge_enabled = false;
    std::shared_ptr<RoutingObserver> observer;
};

/// "sg", "kg", "pkg", "dc", "wc". Throws UnknownStrategy.
StrategyPtr make_strategy(std::string_view name, const StrategyOptions& options);

}// namespace dstream

#endif// DSTREAM_STRATEGIES_STRATEGIES_HPP_
