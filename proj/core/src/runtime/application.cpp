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
#include <dstream/runtime/application.hpp>

#include "log.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <numeric>
#include <random>
#include <shared_mutex>
#include <thread>
#include <unordered_map>

#if defined(__linux__)
#include <sys/prctl.h>
#endif

namespace dstream {

namespace {

constexpr std::size_t kBatch = 16;
constexpr SenderId kFeederBit = SenderId{1} << 63;
constexpr SenderId kDrainBit = SenderId{1} << 62;

std::int64_t nowNs() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now().time_since_epoch()).count();
}

Clock::time_point fromNs(std::int64_t ns) {
    return Clock::time_point(std::chrono::duration_cast<Clock::duration>(std::chrono::nanoseconds(ns)));
}

void atomicMax(std::atomic<std::int64_t>& a, std::int64_t v) {
    auto cur = a.load(std::memory_order_relaxed);
    while (cur < v && !a.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
    }
}

std::uint64_t hashString(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h = (h ^ c) * 0x100000001b3ULL;
    }
    return h;
}

}// namespace

PayloadGenerator from_values(std::vector<Value> values) {
    auto data = std::make_shared<std::vector<Value>>(std::move(values));
    auto pos = std::make_shared<std::size_t>(0);
    return [data, pos]() -> std::optional<Value> {
        if (*pos >= data->size()) {
            return std::nullopt;
        }
        return (*data)[(*pos)++];
    };
}

TimeoutError::TimeoutError(MetricsSnapshot partial)
    : Error(ErrorCode::kTimeout, "application did not reach quiescence before the deadline"),
      partial_(std::move(partial)) {}

// -----------------------------------------------------------------------------

struct Application::Impl {
    struct Route {
        std::size_t dst;
        std::string in_port;
    };

    struct NodeRt {
        std::string id;
        OperationPtr op;
        StrategyPtr strategy;
        Value args;
        Value deployment;
        std::map<std::string, std::vector<Route>, std::less<>> routes;
        std::uint64_t name_hash = 0;
        std::uint64_t drain_counter = 0;
    };

    struct Envelope {
        Message msg;
        SenderId from;
    };

    struct Slot {
        WorkerRef ref;
        std::size_t wf_node = 0;
        std::any state;
        std::mutex mu;
        std::deque<Envelope> mailbox;
        bool scheduled = false;
        std::atomic<std::uint64_t> processed{0};
        std::atomic<std::int64_t> stored{0};
        std::uint64_t emit_counter = 0;
    };

    /// Identity and stamp counter of whoever is emitting.
    struct Sender {
        SenderId id;
        std::uint64_t* counter;
    };

    struct Executor {
        std::mutex mu;
        std::condition_variable cv;
        std::deque<Slot*> ready;
        std::vector<std::thread> threads;
    };

    Workflow workflow;
    ClusterConfig cfg;
    bool spin = false;
    std::vector<NodeRt> nodes;
    std::map<std::string, std::size_t, std::less<>> index;
    std::vector<std::size_t> topo;

    mutable std::shared_mutex registry_mu;
    std::vector<std::unique_ptr<Slot>> slots;

    std::mutex rng_mu;
    std::mt19937_64 placement_rng;
    std::mt19937_64 remote_rng;

    // executors
    std::deque<Slot*> det_ready;
    std::vector<std::unique_ptr<Executor>> executors;
    std::atomic<bool> stopping{false};

    // quiescence and failure
    std::atomic<std::int64_t> pending{0};
    std::mutex quiet_mu;
    std::condition_variable quiet_cv;
    std::atomic<bool> aborted{false};
    std::mutex error_mu;
    std::exception_ptr error;
    bool drained = false;

    // metrics
    std::vector<std::unique_ptr<std::atomic<std::uint64_t>>> remote_sends;
    std::vector<std::unique_ptr<std::atomic<std::uint64_t>>> local_sends;
    std::atomic<std::uint64_t> injected{0};
    std::atomic<std::uint64_t> sink_records{0};
    std::atomic<std::int64_t> first_ns{0};
    std::atomic<std::int64_t> last_ns{0};

    std::map<std::pair<std::size_t, NodeIndex>, std::uint64_t> feeder_counters;

    Impl(const Workflow& wf, ClusterConfig config);
    ~Impl();

    bool deterministic() const { return cfg.executor == ExecutorMode::kDeterministic; }

    Slot& slot(const WorkerRef& ref) const {
        std::shared_lock lk(registry_mu);
        if (ref.id >= slots.size()) {
            throw Error(ErrorCode::kInvalidWorkerRef, "unknown worker " + Value(ref).to_string());
        }
        Slot& s = *slots[ref.id];
        if (s.ref != ref) {
            throw Error(ErrorCode::kInvalidWorkerRef, "stale or foreign worker reference " + Value(ref).to_string());
        }
        return s;
    }

    WorkerRef spawn(std::size_t wf_node, NodeIndex at, std::any state, Role role) {
        if (at >= cfg.node_count) {
            throw Error(ErrorCode::kUnknownNode, "no cluster node " + std::to_string(at));
        }
        const auto& strategy = *nodes[wf_node].strategy;
        if (!strategy.roles.empty() && !strategy.roles.contains(role)) {
            throw Error(ErrorCode::kUnknownRole, "strategy " + strategy.name + " does not declare role '" + role + "'");
        }
        auto s = std::make_unique<Slot>();
        s->wf_node = wf_node;
        s->state = std::move(state);
        std::unique_lock lk(registry_mu);
        s->ref = WorkerRef{at, static_cast<WorkerId>(slots.size()), std::move(role)};
        slots.push_back(std::move(s));
        return slots.back()->ref;
    }

    NodeIndex chooseRemote() {
        std::lock_guard lk(rng_mu);
        return static_cast<NodeIndex>(placement_rng() % cfg.node_count);
    }

    std::vector<NodeIndex> chooseNodes(std::size_t n) {
        if (n > cfg.node_count) {
            throw Error(ErrorCode::kInvalidConfig,
                        "on_n(" + std::to_string(n) + ") exceeds node count " + std::to_string(cfg.node_count));
        }
        std::vector<NodeIndex> all(cfg.node_count);
        std::iota(all.begin(), all.end(), NodeIndex{0});
        {
            std::lock_guard lk(rng_mu);
            std::shuffle(all.begin(), all.end(), remote_rng);
        }
        all.resize(n);
        std::sort(all.begin(), all.end());
        return all;
    }

    void doWork() const {
        auto d = cfg.simulated_work;
        if (d.count() <= 0) {
            return;
        }
        if (spin) {
            auto until = Clock::now() + d;
            while (Clock::now() < until) {
            }
        } else {
            std::this_thread::sleep_for(d);
        }
    }

    CallbackResult call(std::size_t wf_node, std::string_view cb, const Value& state, std::span<const Value> args,
                        std::string_view in_port) const {
        const auto& n = nodes[wf_node];
        CallbackResult r;
        try {
            r = invoke_callback(*n.op, cb, state, args, in_port);
        } catch (const CallbackFailed& e) {
            throw CallbackFailed(n.id, e.callback(), e.cause());
        }
        if (n.op->is_work_callback(cb)) {
            doWork();
        }
        if (cb == "react" && n.op->out_ports().empty()) {
            const_cast<Impl*>(this)->noteSinkRecord();
        }
        return r;
    }

    void noteSinkRecord() {
        sink_records.fetch_add(1, std::memory_order_relaxed);
        atomicMax(last_ns, nowNs());
    }

    void send(const Sender& from, NodeIndex at, const WorkerRef& to, Message msg) {
        Slot& s = slot(to);
        if (cfg.observer) {
            cfg.observer->on_send(from.id, to, msg);
        }
        (at == to.node ? local_sends : remote_sends)[at]->fetch_add(1, std::memory_order_relaxed);
        pending.fetch_add(1, std::memory_order_acq_rel);
        bool schedule = false;
        {
            std::lock_guard lk(s.mu);
            s.mailbox.push_back(Envelope{std::move(msg), from.id});
            if (!s.scheduled) {
                s.scheduled = true;
                schedule = true;
            }
        }
        if (schedule) {
            enqueue(&s);
        }
    }

    void enqueue(Slot* s) {
        if (deterministic()) {
            det_ready.push_back(s);
            return;
        }
        auto& ex = *executors[s->ref.node];
        {
            std::lock_guard lk(ex.mu);
            ex.ready.push_back(s);
        }
        ex.cv.notify_one();
    }

    void deliver(std::size_t dst, const DataRecord& record, NodeIndex at, const Sender& sender);

    void route(std::size_t src, const Emissions& emissions, NodeIndex at, const Sender& sender) {
        const auto& n = nodes[src];
        for (const auto& [port, payloads] : emissions) {
            auto it = n.routes.find(port);
            if (it == n.routes.end()) {
                throw Error(ErrorCode::kUnknownOutPort, "node " + n.id + " has no out-port '" + port + "'");
            }
            for (const auto& payload : payloads) {
                for (const auto& r : it->second) {
                    DataRecord rec(payload, r.in_port, SequenceStamp{sender.id, ++*sender.counter});
                    deliver(r.dst, rec, at, sender);
                }
            }
        }
    }

    void fail(std::exception_ptr e) {
        {
            std::lock_guard lk(error_mu);
            if (!error) {
                error = e;
            }
        }
        aborted.store(true);
        {
            std::lock_guard lk(quiet_mu);
        }
        quiet_cv.notify_all();
    }

    void finishOne() {
        if (pending.fetch_sub(1, std::memory_order_acq_rel) == 1) {
            std::lock_guard lk(quiet_mu);
            quiet_cv.notify_all();
        }
    }

    void processOne(Slot& s);

    /// Pops one message; returns false when the mailbox is now empty (and unscheduled).
    bool stepSlot(Slot& s) {
        processOne(s);
        std::lock_guard lk(s.mu);
        if (s.mailbox.empty()) {
            s.scheduled = false;
            return false;
        }
        return true;
    }

    void pump() {
        while (!det_ready.empty()) {
            Slot* s = det_ready.front();
            det_ready.pop_front();
            if (stepSlot(*s)) {
                det_ready.push_back(s);
            }
        }
    }

    void executorLoop(NodeIndex node, std::size_t thread_index);

    void startExecutors() {
        if (deterministic()) {
            return;
        }
        for (NodeIndex n = 0; n < cfg.node_count; ++n) {
            executors.push_back(std::make_unique<Executor>());
        }
        for (NodeIndex n = 0; n < cfg.node_count; ++n) {
            for (std::size_t t = 0; t < cfg.executor_threads_per_node; ++t) {
                executors[n]->threads.emplace_back([this, n, t] { executorLoop(n, t); });
            }
        }
    }

    void stopExecutors() {
        stopping.store(true);
        for (auto& ex : executors) {
            {
                std::lock_guard lk(ex->mu);
            }
            ex->cv.notify_all();
        }
        for (auto& ex : executors) {
            for (auto& t : ex->threads) {
                if (t.joinable()) {
                    t.join();
                }
            }
        }
    }

    void rethrowIfFailed() {
        if (aborted.load()) {
            std::lock_guard lk(error_mu);
            std::rethrow_exception(error);
        }
    }

    /// True once idle, false on deadline.
    bool waitIdle(Clock::time_point deadline) {
        if (deterministic()) {
            pump();
            rethrowIfFailed();
            return true;
        }
        std::unique_lock lk(quiet_mu);
        bool ok = quiet_cv.wait_until(lk, deadline, [&] { return pending.load() == 0 || aborted.load(); });
        lk.unlock();
        rethrowIfFailed();
        return ok;
    }

    void inject(std::size_t src, Value payload, std::uint64_t ordinal) {
        auto at = static_cast<NodeIndex>(ordinal % cfg.node_count);
        auto& counter = feeder_counters[{src, at}];
        Sender sender{kFeederBit | (static_cast<SenderId>(src) << 32) | at, &counter};
        std::int64_t expected = 0;
        first_ns.compare_exchange_strong(expected, nowNs());
        injected.fetch_add(1, std::memory_order_relaxed);
        DataRecord rec(std::move(payload), std::string(), SequenceStamp{sender.id, ++counter});
        deliver(src, rec, at, sender);
        if (deterministic()) {
            pump();
        }
        rethrowIfFailed();
    }

    void runDrains(Clock::time_point deadline);

    MetricsSnapshot snapshot() const {
        MetricsSnapshot m;
        {
            std::shared_lock lk(registry_mu);
            m.workers.reserve(slots.size());
            for (const auto& s : slots) {
                m.workers.push_back(WorkerMetrics{s->ref, nodes[s->wf_node].id, s->processed.load(), s->stored.load()});
            }
        }
        m.nodes.resize(cfg.node_count);
        for (std::size_t i = 0; i < cfg.node_count; ++i) {
            m.nodes[i].remote_sends = remote_sends[i]->load();
            m.nodes[i].local_sends = local_sends[i]->load();
        }
        m.records_injected = injected.load();
        m.total_sink_records = sink_records.load();
        if (auto f = first_ns.load(); f != 0) {
            m.first_record_time = fromNs(f);
        }
        if (auto l = last_ns.load(); l != 0) {
            m.last_record_time = fromNs(l);
        }
        return m;
    }

    std::uint64_t deploymentDigest() const {
        std::uint64_t h = 0;
        for (const auto& n : nodes) {
            h = mix64(h ^ digest(n.deployment));
        }
        return h;
    }
};

// --- contexts ----------------------------------------------------------------

namespace {

using Impl = Application::Impl;

/// Shared HookContext implementation over (application, workflow node, cluster node).
template<class Base>
class HookBase : public Base {
  public:
    HookBase(Impl& app, std::size_t wf_node, NodeIndex at) : app_(app), wf_node_(wf_node), at_(at) {}

    const std::string& node_name() const override { return app_.nodes[wf_node_].id; }
    const OperationDef& operation() const override { return *app_.nodes[wf_node_].op; }
    const Value& args() const override { return app_.nodes[wf_node_].args; }
    NodeIndex self_node() const override { return at_; }
    std::size_t node_count() const override { return app_.cfg.node_count; }
    std::uint64_t seed_for(std::string_view purpose) const override {
        return derive_seed(app_.cfg.seed, purpose, app_.nodes[wf_node_].name_hash);
    }
    CallbackResult call(std::string_view cb, const Value& state, std::span<const Value> args,
                        std::string_view in_port) const override {
        return app_.call(wf_node_, cb, state, args, in_port);
    }
    using HookContext::call;

  protected:
    Impl& app_;
    std::size_t wf_node_;
    NodeIndex at_;
};

/// Placement primitives; shared by deploy/process contexts and remote-exec scopes.
class SpawnOps {
  public:
    SpawnOps(Impl& app, std::size_t wf_node) : app_(app), wf_node_(wf_node) {}

    WorkerRef spawn(NodeIndex at, std::any state, Role role) {
        return app_.spawn(wf_node_, at, std::move(state), std::move(role));
    }
    WorkerRef spawnRemote(std::any state, Role role) {
        return app_.spawn(wf_node_, app_.chooseRemote(), std::move(state), std::move(role));
    }
    std::map<NodeIndex, Value> runOn(const std::vector<NodeIndex>& targets, const WorkerSpawner::RemoteFn& f);
    std::map<NodeIndex, Value> runOn(NodeIndex node, const WorkerSpawner::RemoteFn& f) {
        if (node >= app_.cfg.node_count) {
            throw Error(ErrorCode::kUnknownNode, "no cluster node " + std::to_string(node));
        }
        return runOn(std::vector<NodeIndex>{node}, f);
    }
    std::map<NodeIndex, Value> runOnN(std::size_t n, const WorkerSpawner::RemoteFn& f) {
        return runOn(app_.chooseNodes(n), f);
    }
    std::map<NodeIndex, Value> runOnAll(const WorkerSpawner::RemoteFn& f) {
        std::vector<NodeIndex> all(app_.cfg.node_count);
        std::iota(all.begin(), all.end(), NodeIndex{0});
        return runOn(all, f);
    }

  private:
    Impl& app_;
    std::size_t wf_node_;
};

/// The "local" view inside Remote.on and friends.
class RemoteScope final : public WorkerSpawner {
  public:
    RemoteScope(Impl& app, std::size_t wf_node, NodeIndex at) : ops_(app, wf_node), at_(at) {}

    NodeIndex self_node() const override { return at_; }
    WorkerRef local_worker(std::any state, Role role) override { return ops_.spawn(at_, std::move(state), std::move(role)); }
    WorkerRef remote_worker(std::any state, Role role) override {
        return ops_.spawnRemote(std::move(state), std::move(role));
    }
    WorkerRef worker_on(NodeIndex node, std::any state, Role role) override {
        return ops_.spawn(node, std::move(state), std::move(role));
    }
    std::map<NodeIndex, Value> on(NodeIndex node, const RemoteFn& f) override { return ops_.runOn(node, f); }
    std::map<NodeIndex, Value> on_n(std::size_t n, const RemoteFn& f) override { return ops_.runOnN(n, f); }
    std::map<NodeIndex, Value> on_all_workers(const RemoteFn& f) override { return ops_.runOnAll(f); }

  private:
    SpawnOps ops_;
    NodeIndex at_;
};

std::map<NodeIndex, Value> SpawnOps::runOn(const std::vector<NodeIndex>& targets, const WorkerSpawner::RemoteFn& f) {
    std::map<NodeIndex, Value> out;
    for (auto node : targets) {
        RemoteScope scope(app_, wf_node_, node);
        out.emplace(node, f(scope));
    }
    return out;
}

class DeployCtx final : public HookBase<DeployContext> {
  public:
    DeployCtx(Impl& app, std::size_t wf_node, NodeIndex at) : HookBase(app, wf_node, at), ops_(app, wf_node) {}

    WorkerRef local_worker(std::any state, Role role) override { return ops_.spawn(at_, std::move(state), std::move(role)); }
    WorkerRef remote_worker(std::any state, Role role) override {
        return ops_.spawnRemote(std::move(state), std::move(role));
    }
    WorkerRef worker_on(NodeIndex node, std::any state, Role role) override {
        return ops_.spawn(node, std::move(state), std::move(role));
    }
    std::map<NodeIndex, Value> on(NodeIndex node, const RemoteFn& f) override { return ops_.runOn(node, f); }
    std::map<NodeIndex, Value> on_n(std::size_t n, const RemoteFn& f) override { return ops_.runOnN(n, f); }
    std::map<NodeIndex, Value> on_all_workers(const RemoteFn& f) override { return ops_.runOnAll(f); }

  private:
    SpawnOps ops_;
};

template<class Base>
class DeliverBase : public HookBase<Base> {
  public:
    DeliverBase(Impl& app, std::size_t wf_node, NodeIndex at, Impl::Sender sender)
        : HookBase<Base>(app, wf_node, at), sender_(sender) {}

    const Value& deployment() const override { return this->app_.nodes[this->wf_node_].deployment; }
    void send(const WorkerRef& to, Message msg) override { this->app_.send(sender_, this->at_, to, std::move(msg)); }
    void emit(const Emissions& emissions) override {
        this->app_.route(this->wf_node_, emissions, this->at_, sender_);
    }
    using DeliverContext::emit;
    std::size_t pick(const DataRecord& record, std::size_t n, std::uint64_t salt) const override {
        if (n == 0) {
            throw Error(ErrorCode::kInvalidConfig, "pick from an empty range");
        }
        const auto& stamp = record.seq();
        std::uint64_t h = mix64(this->app_.cfg.seed ^ this->app_.nodes[this->wf_node_].name_hash);
        h = mix64(h ^ stamp.sender);
        h = mix64(h ^ stamp.counter);
        h = mix64(h ^ salt);
        return static_cast<std::size_t>((static_cast<unsigned __int128>(h) * n) >> 64);
    }

  protected:
    Impl::Sender sender_;
};

class DeliverCtx final : public DeliverBase<DeliverContext> {
  public:
    using DeliverBase::DeliverBase;
};

class DrainCtx final : public DeliverBase<DrainContext> {
  public:
    using DeliverBase::DeliverBase;
};

class ProcessCtx final : public DeliverBase<ProcessContext> {
  public:
    ProcessCtx(Impl& app, Impl::Slot& slot)
        : DeliverBase(app, slot.wf_node, slot.ref.node, Impl::Sender{slot.ref.id, &slot.emit_counter}),
          slot_(slot), ops_(app, slot.wf_node) {}

    const WorkerRef& self() const override { return slot_.ref; }
    void record_stored(std::int64_t delta) override { slot_.stored.fetch_add(delta, std::memory_order_relaxed); }

    WorkerRef local_worker(std::any state, Role role) override { return ops_.spawn(at_, std::move(state), std::move(role)); }
    WorkerRef remote_worker(std::any state, Role role) override {
        return ops_.spawnRemote(std::move(state), std::move(role));
    }
    WorkerRef worker_on(NodeIndex node, std::any state, Role role) override {
        return ops_.spawn(node, std::move(state), std::move(role));
    }
    std::map<NodeIndex, Value> on(NodeIndex node, const RemoteFn& f) override { return ops_.runOn(node, f); }
    std::map<NodeIndex, Value> on_n(std::size_t n, const RemoteFn& f) override { return ops_.runOnN(n, f); }
    std::map<NodeIndex, Value> on_all_workers(const RemoteFn& f) override { return ops_.runOnAll(f); }

  private:
    Impl::Slot& slot_;
    SpawnOps ops_;
};

}// namespace

// --- Impl --------------------------------------------------------------------

Application::Impl::Impl(const Workflow& wf, ClusterConfig config) : workflow(wf), cfg(std::move(config)) {
    cfg.validate();
    require_valid(workflow);

    std::size_t total_threads = cfg.node_count * cfg.executor_threads_per_node;
    switch (cfg.work_mode) {
        case WorkMode::kSpin: spin = true; break;
        case WorkMode::kBlock: spin = false; break;
        case WorkMode::kAuto:
            spin = deterministic() || std::thread::hardware_concurrency() >= total_threads;
            break;
    }

    placement_rng.seed(derive_seed(cfg.seed, "placement"));
    remote_rng.seed(derive_seed(cfg.seed, "remote-exec"));
    for (std::size_t i = 0; i < cfg.node_count; ++i) {
        remote_sends.push_back(std::make_unique<std::atomic<std::uint64_t>>(0));
        local_sends.push_back(std::make_unique<std::atomic<std::uint64_t>>(0));
    }

    for (const auto& [id, n] : workflow.nodes()) {
        index.emplace(id, nodes.size());
        nodes.push_back(NodeRt{id, n.operation, n.strategy, n.args, Value(), {}, hashString(id), 0});
    }
    for (auto& n : nodes) {
        for (const auto& p : n.op->out_ports()) {
            auto& routes = n.routes[p.name];
            for (const auto& l : workflow.links_from(n.id, p.name)) {
                routes.push_back(Route{index.at(l.dst), l.in_port});
            }
        }
    }
    auto order = workflow.topological_order();
    for (const auto& id : *order) {
        topo.push_back(index.at(id));
    }

    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        auto& n = nodes[*it];
        DeployCtx ctx(*this, *it, 0);
        try {
            n.deployment = n.strategy->deploy(n.args, ctx);
        } catch (const std::exception& e) {
            throw Error(ErrorCode::kDeployHookFailed,
                        "deploy hook of " + n.strategy->name + " failed for node " + n.id + ": " + e.what());
        }
        log::debug("deployed {} with {} ({} workers so far)", n.id, n.strategy->name, slots.size());
    }
    log::info("application deployed: {} nodes, {} workers, {} cluster nodes, {} executor",
              nodes.size(), slots.size(), cfg.node_count, deterministic() ? "deterministic" : "threaded");
    startExecutors();
}

Application::Impl::~Impl() {
    stopExecutors();
}

void Application::Impl::deliver(std::size_t dst, const DataRecord& record, NodeIndex at, const Sender& sender) {
    if (cfg.observer) {
        cfg.observer->on_deliver(nodes[dst].id, record, at);
    }
    DeliverCtx ctx(*this, dst, at, sender);
    nodes[dst].strategy->deliver(record, ctx);
}

void Application::Impl::processOne(Slot& s) {
    Envelope env;
    {
        std::lock_guard lk(s.mu);
        env = std::move(s.mailbox.front());
        s.mailbox.pop_front();
    }
    if (!aborted.load(std::memory_order_relaxed)) {
        const auto& n = nodes[s.wf_node];
        if (cfg.observer) {
            cfg.observer->on_process_begin(s.ref, env.msg);
        }
        try {
            ProcessCtx ctx(*this, s);
            s.state = n.strategy->process(std::move(env.msg), std::move(s.state), s.ref.role, ctx);
        } catch (const Error& e) {
            log::error("process hook of {} failed on worker {}: {}", n.id, s.ref.id, e.what());
            switch (e.code()) {
                case ErrorCode::kInvalidWorkerRef:
                case ErrorCode::kUnknownOutPort:
                case ErrorCode::kProtocolViolation: fail(std::current_exception()); break;
                default:
                    fail(std::make_exception_ptr(Error(ErrorCode::kProcessHookFailed,
                                                       "process hook of " + n.strategy->name + " failed on worker " +
                                                           Value(s.ref).to_string() + " (" + n.id + "): " + e.what())));
            }
        } catch (const std::exception& e) {
            log::error("process hook of {} failed on worker {}: {}", n.id, s.ref.id, e.what());
            fail(std::make_exception_ptr(Error(ErrorCode::kProcessHookFailed, "process hook of " + n.strategy->name +
                                                                                  " failed on worker " +
                                                                                  Value(s.ref).to_string() + " (" +
                                                                                  n.id + "): " + e.what())));
        }
        s.processed.fetch_add(1, std::memory_order_relaxed);
        if (cfg.observer) {
            cfg.observer->on_process_end(s.ref);
        }
    }
    finishOne();
}

void Application::Impl::executorLoop(NodeIndex node, std::size_t thread_index) {
#if defined(__linux__)
    if (!spin) {
        prctl(PR_SET_TIMERSLACK, 1000UL, 0, 0, 0);
    }
#endif
    std::mt19937_64 jitter(derive_seed(cfg.seed, "jitter", (static_cast<std::uint64_t>(node) << 16) | thread_index));
    auto& ex = *executors[node];
    while (true) {
        Slot* s = nullptr;
        {
            std::unique_lock lk(ex.mu);
            ex.cv.wait(lk, [&] { return stopping.load() || !ex.ready.empty(); });
            if (ex.ready.empty()) {
                return;
            }
            s = ex.ready.front();
            ex.ready.pop_front();
        }
        std::size_t budget = cfg.schedule_jitter ? 1 + jitter() % kBatch : kBatch;
        bool more = true;
        for (std::size_t i = 0; i < budget && more; ++i) {
            if (cfg.schedule_jitter) {
                switch (jitter() % 8) {
                    case 0: std::this_thread::yield(); break;
                    case 1: std::this_thread::sleep_for(std::chrono::microseconds(jitter() % 50)); break;
                    default: break;
                }
            }
            more = stepSlot(*s);
        }
        if (more) {
            std::lock_guard lk(ex.mu);
            ex.ready.push_back(s);
        }
    }
}

void Application::Impl::runDrains(Clock::time_point deadline) {
    for (auto idx : topo) {
        auto& n = nodes[idx];
        if (!n.strategy->drain) {
            continue;
        }
        for (int round = 0;; ++round) {
            Sender sender{kDrainBit | idx, &n.drain_counter};
            DrainCtx ctx(*this, idx, 0, sender);
            bool more = n.strategy->drain(ctx, round);
            log::debug("drained {} round {}", n.id, round);
            if (!waitIdle(deadline)) {
                throw TimeoutError(snapshot());
            }
            if (!more) {
                break;
            }
        }
    }
}

// --- Application -------------------------------------------------------------

Application::Application(const Workflow& workflow, ClusterConfig config)
    : impl_(std::make_unique<Impl>(workflow, std::move(config))) {}

Application::~Application() = default;

void Application::feed(std::string_view source, PayloadGenerator next, std::optional<double> rate) {
    std::vector<FeedSpec> specs;
    specs.push_back(FeedSpec{std::string(source), std::move(next), rate});
    feed_all(std::move(specs));
}

void Application::feed(std::string_view source, std::vector<Value> payloads, std::optional<double> rate) {
    feed(source, from_values(std::move(payloads)), rate);
}

void Application::feed_all(std::vector<FeedSpec> feeds) {
    struct Active {
        std::size_t node;
        PayloadGenerator next;
        std::optional<double> rate;
        std::uint64_t count = 0;
        bool done = false;
    };
    std::vector<Active> active;
    for (auto& f : feeds) {
        auto it = impl_->index.find(f.source);
        if (it == impl_->index.end()) {
            throw Error(ErrorCode::kUnknownNode, "unknown source node '" + f.source + "'");
        }
        const auto& n = impl_->nodes[it->second];
        if (!n.op->in_ports().empty()) {
            throw Error(ErrorCode::kNodeHasInPorts, "node '" + f.source + "' has in-ports and cannot be fed");
        }
        if (f.rate && !(*f.rate > 0)) {
            throw Error(ErrorCode::kInvalidConfig, "feed rate must be positive");
        }
        active.push_back(Active{it->second, std::move(f.next), f.rate});
    }
    auto start = Clock::now();
    auto dueAt = [&](const Active& a) {
        return start + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(static_cast<double>(a.count) / *a.rate));
    };
    std::size_t remaining = active.size();
    while (remaining > 0) {
        bool progressed = false;
        std::optional<Clock::time_point> earliest;
        for (auto& a : active) {
            if (a.done) {
                continue;
            }
            if (a.rate) {
                auto due = dueAt(a);
                if (due > Clock::now()) {
                    earliest = earliest ? std::min(*earliest, due) : due;
                    continue;
                }
            }
            auto payload = a.next();
            if (!payload) {
                a.done = true;
                --remaining;
                continue;
            }
            impl_->inject(a.node, std::move(*payload), a.count++);
            progressed = true;
        }
        if (!progressed && earliest) {
            std::this_thread::sleep_until(*earliest);
        }
    }
}

MetricsSnapshot Application::await_quiescence(std::chrono::milliseconds timeout) {
    auto deadline = Clock::now() + timeout;
    if (!impl_->waitIdle(deadline)) {
        throw TimeoutError(impl_->snapshot());
    }
    if (!impl_->drained) {
        impl_->drained = true;
        impl_->runDrains(deadline);
    }
    return impl_->snapshot();
}

MetricsSnapshot Application::metrics() const {
    return impl_->snapshot();
}

const Value& Application::deployment(std::string_view node) const {
    auto it = impl_->index.find(node);
    if (it == impl_->index.end()) {
        throw Error(ErrorCode::kUnknownNode, "unknown workflow node '" + std::string(node) + "'");
    }
    return impl_->nodes[it->second].deployment;
}

std::uint64_t Application::deployment_digest() const {
    return impl_->deploymentDigest();
}

const ClusterConfig& Application::config() const {
    return impl_->cfg;
}

}// namespace dstream
