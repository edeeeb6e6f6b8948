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
#ifndef DSTREAM_CORE_STRATEGY_HPP_
#define DSTREAM_CORE_STRATEGY_HPP_

#include <dstream/core/operation.hpp>
#include <dstream/core/record.hpp>
#include <dstream/core/value.hpp>

#include <any>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>

namespace dstream {

/// Intra-strategy message. Strategies define their own message types.
using Message = std::any;

/**
 * Primitives shared by every hook: the operation being distributed, the
 * node arguments, callback invocation and the identity of the current
 * cluster node.
 */
class HookContext {
  public:
    virtual ~HookContext() = default;

    /// Workflow node id of the operation instance.
    virtual const std::string& node_name() const = 0;
    virtual const OperationDef& operation() const = 0;
    /// Opaque arguments given to the workflow node.
    virtual const Value& args() const = 0;
    /// Cluster node this hook is executing on.
    virtual NodeIndex self_node() const = 0;
    virtual std::size_t node_count() const = 0;
    /// Deterministic seed for a named purpose, derived from the cluster seed and this node.
    virtual std::uint64_t seed_for(std::string_view purpose) const = 0;

    virtual CallbackResult call(std::string_view callback, const Value& state, std::span<const Value> args,
                                std::string_view in_port = {}) const = 0;

    /// Calls `callback` with the record payload as sole argument and its in-port.
    CallbackResult call(std::string_view callback, const Value& state, const DataRecord& record) const;
    const Value& initial_state() const { return operation().initial_state(); }
};

/// Worker placement and remote execution primitives.
class WorkerSpawner {
  public:
    using RemoteFn = std::function<Value(WorkerSpawner&)>;

    virtual ~WorkerSpawner() = default;

    virtual NodeIndex self_node() const = 0;
    virtual WorkerRef local_worker(std::any state, Role role) = 0;
    /// Worker on a node chosen by the runtime (seeded).
    virtual WorkerRef remote_worker(std::any state, Role role) = 0;
    virtual WorkerRef worker_on(NodeIndex node, std::any state, Role role) = 0;

    /// Runs `f` with `node` as the local node.
    virtual std::map<NodeIndex, Value> on(NodeIndex node, const RemoteFn& f) = 0;
    /// Runs `f` on `n` distinct, seed-selected nodes.
    virtual std::map<NodeIndex, Value> on_n(std::size_t n, const RemoteFn& f) = 0;
    virtual std::map<NodeIndex, Value> on_all_workers(const RemoteFn& f) = 0;
};

class DeployContext : public HookContext, public WorkerSpawner {
  public:
    using HookContext::call;
    NodeIndex self_node() const override = 0;
};

/**
 * Context of the deliver hook. Offers read access to the deployment data and
 * the ability to send or emit, but no worker state and no spawning.
 */
class DeliverContext : public HookContext {
  public:
    using HookContext::call;

    virtual const Value& deployment() const = 0;
    virtual void send(const WorkerRef& to, Message msg) = 0;
    virtual void emit(const Emissions& emissions) = 0;
    void emit(std::string_view port, Value payload);

    /**
     * Stateless seeded choice in [0, n) derived from the record stamp, the
     * cluster seed and `salt`. Equal inputs always give the same answer.
     */
    virtual std::size_t pick(const DataRecord& record, std::size_t n, std::uint64_t salt = 0) const = 0;
};

class ProcessContext : public DeliverContext, public WorkerSpawner {
  public:
    using DeliverContext::call;
    NodeIndex self_node() const override = 0;

    /// The worker currently processing a message.
    virtual const WorkerRef& self() const = 0;
    /// Adjusts the current worker's stored-tuple counter.
    virtual void record_stored(std::int64_t delta) = 0;
};

/// Context of the drain hook, which runs on the driver once upstream work has ceased.
class DrainContext : public DeliverContext {
  public:
    using DeliverContext::call;
};

/**
 * A distribution strategy: deploy, deliver and process hooks plus the
 * callbacks it needs from the operation and the worker roles it spawns.
 *
 * `drain` is optional. It runs when the application reaches quiescence,
 * after every upstream node has drained, and returns true to be called again
 * (with the next round number) once the messages it caused are processed.
 */
struct StrategyDef {
    using DeployHook = std::function<Value(const Value& args, DeployContext& ctx)>;
    using DeliverHook = std::function<void(const DataRecord& record, DeliverContext& ctx)>;
    using ProcessHook = std::function<std::any(Message msg, std::any state, const Role& role, ProcessContext& ctx)>;
    using DrainHook = std::function<bool(DrainContext& ctx, int round)>;

    std::string name;
    std::set<std::string> required_callbacks;
    std::set<Role> roles;
    DeployHook deploy;
    DeliverHook deliver;
    ProcessHook process;
    DrainHook drain;
    /// Descriptive parameters (worker counts, matrix shape, ...).
    Value config;
};

/// Name plus configuration; hooks are not comparable.
bool same_strategy(const StrategyDef& a, const StrategyDef& b);

}// namespace dstream

#endif// DSTREAM_CORE_STRATEGY_HPP_
