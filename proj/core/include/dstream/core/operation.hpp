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
#ifndef DSTREAM_CORE_OPERATION_HPP_
#define DSTREAM_CORE_OPERATION_HPP_

#include <dstream/core/error.hpp>
#include <dstream/core/value.hpp>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dstream {

struct StrategyDef;
using StrategyPtr = std::shared_ptr<const StrategyDef>;

enum class PortDirection { kIn, kOut };

struct Port {
    PortDirection direction = PortDirection::kIn;
    std::string name;
    std::size_t index = 0;

    friend bool operator==(const Port&, const Port&) = default;
};

/// Payloads emitted by a callback, grouped per out-port in first-emission order.
class Emissions {
  public:
    using Entry = std::pair<std::string, std::vector<Value>>;

    void add(std::string_view port, Value payload);
    bool empty() const { return entries_.empty(); }
    std::size_t total() const;
    /// Payloads emitted on `port`, empty if none.
    std::span<const Value> on(std::string_view port) const;

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    friend bool operator==(const Emissions&, const Emissions&) = default;

  private:
    std::vector<Entry> entries_;
};

/// Outcome of one callback invocation: post-callback state, return value and emissions.
struct CallbackResult {
    Value state;
    Value result;
    Emissions emit;

    friend bool operator==(const CallbackResult&, const CallbackResult&) = default;
};

/**
 * What a callback body sees while it runs.
 *
 * A callback reads the state it was given, may replace it, may emit payloads
 * on the operation's out-ports and returns a value. Nothing else is visible,
 * which keeps callbacks pure functions of (state, args, in_port).
 */
class CallbackScope {
  public:
    CallbackScope(const Value& state, std::span<const Value> args, std::string_view in_port)
        : state_(state), args_(args), in_port_(in_port) {}

    const Value& state() const { return written_ ? *written_ : state_; }
    void set_state(Value s) { written_ = std::move(s); }
    void emit(std::string_view port, Value payload) { emit_.add(port, std::move(payload)); }

    std::span<const Value> args() const { return args_; }
    /// Positional argument; throws if absent.
    const Value& arg(std::size_t i) const;
    /// Port the current record arrived on.
    std::string_view port() const { return in_port_; }

    CallbackResult finish(Value result) &&;

  private:
    const Value& state_;
    std::optional<Value> written_;
    std::span<const Value> args_;
    std::string_view in_port_;
    Emissions emit_;
};

using CallbackFn = std::function<Value(CallbackScope&)>;

struct OperationSpec {
    std::string name;
    std::vector<std::string> in;
    std::vector<std::string> out;
    Value initial_state;
    StrategyPtr default_strategy;
    std::map<std::string, CallbackFn, std::less<>> callbacks;
    /// Callbacks that model per-message CPU work (see ClusterConfig::simulated_work).
    std::set<std::string, std::less<>> work_callbacks;
};

/// Immutable operation definition: ports, initial state, callbacks and default strategy.
class OperationDef {
  public:
    /// Throws InvalidOperation on duplicate port names or undefined work callbacks.
    explicit OperationDef(OperationSpec spec);

    const std::string& name() const { return name_; }
    const std::vector<Port>& in_ports() const { return in_ports_; }
    const std::vector<Port>& out_ports() const { return out_ports_; }
    const Port* in_port(std::string_view name) const;
    const Port* out_port(std::string_view name) const;
    const Value& initial_state() const { return initial_state_; }
    const StrategyPtr& default_strategy() const { return default_strategy_; }

    bool has_callback(std::string_view name) const { return callbacks_.find(name) != callbacks_.end(); }
    std::set<std::string> callback_names() const;
    const CallbackFn* callback(std::string_view name) const;
    bool is_work_callback(std::string_view name) const { return work_callbacks_.contains(name); }

  private:
    std::string name_;
    std::vector<Port> in_ports_;
    std::vector<Port> out_ports_;
    Value initial_state_;
    StrategyPtr default_strategy_;
    std::map<std::string, CallbackFn, std::less<>> callbacks_;
    std::set<std::string, std::less<>> work_callbacks_;
};

using OperationPtr = std::shared_ptr<const OperationDef>;

inline OperationPtr make_operation(OperationSpec spec) {
    return std::make_shared<const OperationDef>(std::move(spec));
}

/// Structural identity: name, ports, callback names and initial state.
bool same_shape(const OperationDef& a, const OperationDef& b);

/// Raised when a callback body throws; `node` is filled in by the runtime.
class CallbackFailed : public Error {
  public:
    CallbackFailed(std::string node, std::string callback, std::string cause);
    const std::string& node() const { return node_; }
    const std::string& callback() const { return callback_; }
    const std::string& cause() const { return cause_; }

  private:
    std::string node_;
    std::string callback_;
    std::string cause_;
};

/**
 * Runs `callback` of `op` on (state, args, in_port).
 *
 * Throws UnknownCallback if the operation does not define it. Any exception
 * escaping the body is rethrown as CallbackFailed naming the operation.
 */
CallbackResult invoke_callback(const OperationDef& op, std::string_view callback, const Value& state,
                               std::span<const Value> args, std::string_view in_port = {});

}// namespace dstream

#endif// DSTREAM_CORE_OPERATION_HPP_
