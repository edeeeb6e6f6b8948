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
#include <dstream/strategies/strategies.hpp>

namespace dstream {

namespace {

struct ExecutorState {
    Value state;
};

}// namespace

StrategyPtr stateless_per_node_strategy() {
    auto s = std::make_shared<StrategyDef>();
    s->name = "stateless_per_node";
    s->required_callbacks = {"react"};
    s->roles = {"executor"};
    s->deploy = [](const Value&, DeployContext& ctx) {
        Value::List workers;
        for (const auto& [node, ref] : ctx.on_all_workers([&ctx](WorkerSpawner& local) {
                 return Value(local.local_worker(ExecutorState{ctx.initial_state()}, "executor"));
             })) {
            workers.push_back(ref);
        }
        return Value(std::move(workers));
    };
    s->deliver = [](const DataRecord& record, DeliverContext& ctx) {
        ctx.send(ctx.deployment()[ctx.self_node()].as_worker(), record);
    };
    s->process = [](Message msg, std::any state, const Role&, ProcessContext& ctx) {
        auto& st = std::any_cast<ExecutorState&>(state);
        const auto& record = std::any_cast<const DataRecord&>(msg);
        auto r = ctx.call("react", st.state, record);
        st.state = std::move(r.state);
        ctx.emit(r.emit);
        return state;
    };
    return s;
}

}// namespace dstream
