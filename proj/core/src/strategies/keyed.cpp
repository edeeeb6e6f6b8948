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
#include <dstream/strategies/murmur.hpp>
#include <dstream/strategies/strategies.hpp>

#include <unordered_map>

namespace dstream {

namespace {

struct KeyedRecord {
    Value key;
    DataRecord record;
};

struct AggregatorState {
    std::unordered_map<Value, Value> states;
};

}// namespace

StrategyPtr keyed_state_strategy(KeyedConfig config) {
    auto s = std::make_shared<StrategyDef>();
    s->name = "kg";
    s->required_callbacks = {"key", "react"};
    s->roles = {"aggregator"};
    s->config = Value::dict({{"worker_count", config.worker_count}});
    s->deploy = [config](const Value&, DeployContext& ctx) {
        Value::List aggregators;
        if (config.worker_count == 0) {
            for (const auto& [node, ref] : ctx.on_all_workers([](WorkerSpawner& local) {
                     return Value(local.local_worker(AggregatorState{}, "aggregator"));
                 })) {
                aggregators.push_back(ref);
            }
        } else {
            for (std::size_t i = 0; i < config.worker_count; ++i) {
                auto node = static_cast<NodeIndex>(i % ctx.node_count());
                aggregators.emplace_back(ctx.worker_on(node, AggregatorState{}, "aggregator"));
            }
        }
        return Value(std::move(aggregators));
    };
    s->deliver = [](const DataRecord& record, DeliverContext& ctx) {
        auto key = ctx.call("key", ctx.initial_state(), record).result;
        const auto& aggregators = ctx.deployment();
        auto idx = key_slot(key, aggregators.size(), 0);
        ctx.send(aggregators[idx].as_worker(), KeyedRecord{std::move(key), record});
    };
    s->process = [](Message msg, std::any state, const Role&, ProcessContext& ctx) {
        auto& st = std::any_cast<AggregatorState&>(state);
        auto& in = std::any_cast<KeyedRecord&>(msg);
        auto it = st.states.find(in.key);
        if (it == st.states.end()) {
            it = st.states.emplace(in.key, ctx.initial_state()).first;
            ctx.record_stored(1);
        }
        auto r = ctx.call("react", it->second, in.record);
        it->second = std::move(r.state);
        ctx.emit(r.emit);
        return state;
    };
    return s;
}

}// namespace dstream
