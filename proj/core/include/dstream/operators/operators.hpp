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
#ifndef DSTREAM_OPERATORS_OPERATORS_HPP_
#define DSTREAM_OPERATORS_OPERATORS_HPP_

#include <dstream/core/workflow.hpp>

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace dstream::ops {

using UnaryFn = std::function<Value(const Value&)>;
using ListFn = std::function<std::vector<Value>(const Value&)>;
using Predicate = std::function<bool(const Value&)>;
using UpdateFn = std::function<Value(const Value& state, const Value& payload)>;
using MergeFn = std::function<Value(const Value& a, const Value& b)>;
using Consumer = std::function<void(const Value&)>;

/// Zero in-ports, one out-port "out". Fed through Application::feed.
NodeSpec source();
/// One in-port "in", zero out-ports. The consumer runs on executor threads.
NodeSpec sink(Consumer consumer = {});

NodeSpec map(UnaryFn f);
NodeSpec flat_map(ListFn f);
NodeSpec filter(Predicate p);

struct ReduceOptions {
    /// Defaults to addition of numbers.
    MergeFn merge;
    /// Callbacks charged with simulated work, e.g. {"react", "merge"}.
    std::set<std::string, std::less<>> work_callbacks;
};

/**
 * Keyed running aggregate. Emits (key, new_state) after every update and
 * defaults to key grouping.
 */
OperationPtr keyed_reduce_operation(UnaryFn key_fn, UpdateFn update, Value initial, ReduceOptions options = {});
NodeSpec keyed_reduce(UnaryFn key_fn, UpdateFn update, Value initial, ReduceOptions options = {});
NodeSpec keyed_reduce(UnaryFn key_fn, UnaryFn update, Value initial, ReduceOptions options = {});

/// Sum of two numbers; integer when both are integers.
Value add_values(const Value& a, const Value& b);

}// namespace dstream::ops

#endif// DSTREAM_OPERATORS_OPERATORS_HPP_
