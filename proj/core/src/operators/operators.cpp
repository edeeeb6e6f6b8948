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
#include <dstream/operators/operators.hpp>
#include <dstream/strategies/strategies.hpp>

namespace dstream::ops {

namespace {

NodeSpec specOf(OperationPtr op) {
    return NodeSpec{std::move(op), nullptr, Value(), ""};
}

OperationPtr unary(std::string name, std::function<void(CallbackScope&)> body) {
    OperationSpec s;
    s.name = std::move(name);
    s.in = {"in"};
    s.out = {"out"};
    s.default_strategy = stateless_per_node_strategy();
    s.callbacks.emplace("react", [body = std::move(body)](CallbackScope& sc) {
        body(sc);
        return Value();
    });
    return make_operation(std::move(s));
}

}// namespace

NodeSpec source() {
    OperationSpec s;
    s.name = "source";
    s.out = {"out"};
    s.default_strategy = stateless_per_node_strategy();
    s.callbacks.emplace("react", [](CallbackScope& sc) {
        sc.emit("out", sc.arg(0));
        return Value();
    });
    return specOf(make_operation(std::move(s)));
}

NodeSpec sink(Consumer consumer) {
    OperationSpec s;
    s.name = "sink";
    s.in = {"in"};
    s.default_strategy = stateless_per_node_strategy();
    s.callbacks.emplace("react", [consumer = std::move(consumer)](CallbackScope& sc) {
        if (consumer) {
            consumer(sc.arg(0));
        }
        return Value();
    });
    return specOf(make_operation(std::move(s)));
}

NodeSpec map(UnaryFn f) {
    return specOf(unary("map", [f = std::move(f)](CallbackScope& sc) { sc.emit("out", f(sc.arg(0))); }));
}

NodeSpec flat_map(ListFn f) {
    return specOf(unary("flat_map", [f = std::move(f)](CallbackScope& sc) {
        for (auto& v : f(sc.arg(0))) {
            sc.emit("out", std::move(v));
        }
    }));
}

NodeSpec filter(Predicate p) {
    return specOf(unary("filter", [p = std::move(p)](CallbackScope& sc) {
        if (p(sc.arg(0))) {
            sc.emit("out", sc.arg(0));
        }
    }));
}

Value add_values(const Value& a, const Value& b) {
    if (a.is_int() && b.is_int()) {
        return a.as_int() + b.as_int();
    }
    return a.as_double() + b.as_double();
}

OperationPtr keyed_reduce_operation(UnaryFn key_fn, UpdateFn update, Value initial, ReduceOptions options) {
    OperationSpec s;
    s.name = "keyed_reduce";
    s.in = {"in"};
    s.out = {"out"};
    s.initial_state = std::move(initial);
    s.default_strategy = keyed_state_strategy();
    s.work_callbacks = std::move(options.work_callbacks);
    s.callbacks.emplace("key", [key_fn](CallbackScope& sc) { return key_fn(sc.arg(0)); });
    s.callbacks.emplace("react", [key_fn, update = std::move(update)](CallbackScope& sc) {
        const auto& payload = sc.arg(0);
        auto next = update(sc.state(), payload);
        sc.emit("out", Value::list({key_fn(payload), next}));
        sc.set_state(std::move(next));
        return Value();
    });
    auto merge = options.merge ? std::move(options.merge) : MergeFn(add_values);
    s.callbacks.emplace("merge", [merge = std::move(merge)](CallbackScope& sc) {
        sc.set_state(merge(sc.state(), sc.arg(0)));
        return Value();
    });
    return make_operation(std::move(s));
}

NodeSpec keyed_reduce(UnaryFn key_fn, UpdateFn update, Value initial, ReduceOptions options) {
    return specOf(keyed_reduce_operation(std::move(key_fn), std::move(update), std::move(initial), std::move(options)));
}

NodeSpec keyed_reduce(UnaryFn key_fn, UnaryFn update, Value initial, ReduceOptions options) {
    return keyed_reduce(
        std::move(key_fn), [update = std::move(update)](const Value& state, const Value&) { return update(state); },
        std::move(initial), std::move(options));
}

}// namespace dstream::ops
