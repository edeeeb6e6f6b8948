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
#include <dstream/strategies/space_saving.hpp>
#include <dstream/strategies/strategies.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <unordered_map>

namespace dstream {

namespace {

enum class Mode { kShuffle, kPkg, kDChoices, kWChoices };

/// Record plus its key when the operation is keyed.
struct BucketRecord {
    std::optional<Value> key;
    DataRecord record;
};

struct Flush {};
struct EmitMerged {};
struct MergePartial {
    Value key;
    Value state;
};

struct BucketState {
    Value single;
    std::unordered_map<Value, Value> keyed;
    /// Owner side of the merge: key -> folded state.
    std::map<Value, Value> merged;
};

struct ForwarderState {
    std::vector<std::uint64_t> loads;
    std::optional<SpaceSaving> sketch;
};

struct Params {
    Mode mode;
    std::size_t worker_count;
    std::size_t d;
    double theta;
    std::size_t sketch_capacity;
    std::size_t warmup;
    bool merge;
    std::shared_ptr<RoutingObserver> observer;
};

const Value& buckets(const Value& deployment) {
    return deployment.at("buckets");
}

Value keyOf(const HookContext& ctx, const DataRecord& record) {
    return ctx.call("key", ctx.initial_state(), record).result;
}

bool keyed(const HookContext& ctx) {
    return ctx.operation().has_callback("key");
}

std::any processBucket(const Params& p, Message& msg, std::any& state, ProcessContext& ctx) {
    auto& st = std::any_cast<BucketState&>(state);
    if (auto* in = std::any_cast<BucketRecord>(&msg)) {
        if (!in->key) {
            auto r = ctx.call("react", st.single, in->record);
            st.single = std::move(r.state);
            ctx.emit(r.emit);
            return std::move(state);
        }
        auto it = st.keyed.find(*in->key);
        if (it == st.keyed.end()) {
            it = st.keyed.emplace(*in->key, ctx.initial_state()).first;
            ctx.record_stored(1);
        }
        auto r = ctx.call("react", it->second, in->record);
        it->second = std::move(r.state);
        if (!p.merge) {
            ctx.emit(r.emit);
        }
        return std::move(state);
    }
    if (std::any_cast<Flush>(&msg)) {
        const auto& refs = buckets(ctx.deployment());
        std::vector<std::pair<Value, Value>> partials(st.keyed.begin(), st.keyed.end());
        std::sort(partials.begin(), partials.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [key, partial] : partials) {
            auto owner = key_slot(key, refs.size(), 0);
            ctx.send(refs[owner].as_worker(), MergePartial{key, std::move(partial)});
        }
        ctx.record_stored(-static_cast<std::int64_t>(st.keyed.size()));
        st.keyed.clear();
        return std::move(state);
    }
    if (auto* part = std::any_cast<MergePartial>(&msg)) {
        auto it = st.merged.find(part->key);
        if (it == st.merged.end()) {
            st.merged.emplace(std::move(part->key), std::move(part->state));
        } else {
            it->second = ctx.call("merge", it->second, std::span<const Value>(&part->state, 1)).state;
        }
        return std::move(state);
    }
    if (std::any_cast<EmitMerged>(&msg)) {
        const auto& out = ctx.operation().out_ports();
        if (!out.empty()) {
            Emissions e;
            for (const auto& [key, value] : st.merged) {
                e.add(out.front().name, Value::list({key, value}));
            }
            ctx.emit(e);
        }
        st.merged.clear();
        return std::move(state);
    }
    throw Error(ErrorCode::kProtocolViolation, "bucket received an unexpected message");
}

std::vector<std::size_t> candidatesFor(const Params& p, const Value& key, bool head) {
    std::vector<std::size_t> c;
    auto w = p.worker_count;
    if (head && p.mode == Mode::kWChoices) {
        c.resize(w);
        std::iota(c.begin(), c.end(), std::size_t{0});
        return c;
    }
    std::size_t n = head && p.mode == Mode::kDChoices ? p.d : 2;
    for (std::size_t i = 1; i <= n; ++i) {
        c.push_back(key_slot(key, w, i));
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

std::any processForwarder(const Params& p, Message& msg, std::any& state, ProcessContext& ctx) {
    auto& st = std::any_cast<ForwarderState&>(state);
    auto& in = std::any_cast<BucketRecord&>(msg);
    const auto& key = *in.key;
    bool head = false;
    if (st.sketch) {
        st.sketch->offer(key);
        head = st.sketch->n_seen() >= p.warmup && st.sketch->is_heavy(key, p.theta);
    }
    auto cands = candidatesFor(p, key, head);
    std::size_t chosen = cands.front();
    for (auto c : cands) {
        if (st.loads[c] < st.loads[chosen]) {
            chosen = c;
        }
    }
    if (p.observer) {
        RoutingDecision d{ctx.self(), key, head, cands, {}, chosen};
        for (auto c : cands) {
            d.loads.push_back(st.loads[c]);
        }
        p.observer->on_route(d);
    }
    ++st.loads[chosen];
    ctx.send(buckets(ctx.deployment())[chosen].as_worker(), std::move(in));
    return std::move(state);
}

std::string modeName(Mode m) {
    switch (m) {
        case Mode::kShuffle: return "sg";
        case Mode::kPkg: return "pkg";
        case Mode::kDChoices: return "dc";
        case Mode::kWChoices: return "wc";
    }
    return {};
}

StrategyPtr makeSplit(Params p) {
    auto s = std::make_shared<StrategyDef>();
    s->name = modeName(p.mode);
    s->required_callbacks = {"react"};
    if (p.mode != Mode::kShuffle) {
        s->required_callbacks.insert("key");
    }
    if (p.merge) {
        s->required_callbacks.insert({"key", "merge"});
    }
    s->roles = {"bucket"};
    if (p.mode != Mode::kShuffle) {
        s->roles.insert("forwarder");
    }
    Value::Dict cfg{{"worker_count", p.worker_count}, {"merge_enabled", p.merge}};
    if (p.mode == Mode::kDChoices) {
        cfg.emplace("d", p.d);
    }
    if (p.mode == Mode::kDChoices || p.mode == Mode::kWChoices) {
        cfg.emplace("head_threshold", p.theta);
        cfg.emplace("sketch_capacity", p.sketch_capacity);
        cfg.emplace("warmup", p.warmup);
    }
    s->config = Value(std::move(cfg));

    s->deploy = [p](const Value&, DeployContext& ctx) {
        Value::List bucket_refs;
        for (std::size_t i = 0; i < p.worker_count; ++i) {
            auto node = static_cast<NodeIndex>(i % ctx.node_count());
            bucket_refs.emplace_back(ctx.worker_on(node, BucketState{ctx.initial_state(), {}, {}}, "bucket"));
        }
        Value::Dict d{{"buckets", Value(std::move(bucket_refs))}};
        if (p.mode != Mode::kShuffle) {
            Value::List forwarders;
            for (const auto& [node, ref] : ctx.on_all_workers([&p](WorkerSpawner& local) {
                     ForwarderState fs{std::vector<std::uint64_t>(p.worker_count, 0), std::nullopt};
                     if (p.mode == Mode::kDChoices || p.mode == Mode::kWChoices) {
                         fs.sketch.emplace(p.sketch_capacity);
                     }
                     return Value(local.local_worker(std::move(fs), "forwarder"));
                 })) {
                forwarders.push_back(ref);
            }
            d.emplace("forwarders", Value(std::move(forwarders)));
        }
        return Value(std::move(d));
    };

    s->deliver = [p](const DataRecord& record, DeliverContext& ctx) {
        std::optional<Value> key;
        if (p.mode != Mode::kShuffle || keyed(ctx)) {
            key = keyOf(ctx, record);
        }
        if (p.mode == Mode::kShuffle) {
            const auto& refs = buckets(ctx.deployment());
            ctx.send(refs[ctx.pick(record, refs.size())].as_worker(), BucketRecord{std::move(key), record});
            return;
        }
        const auto& fw = ctx.deployment().at("forwarders");
        ctx.send(fw[ctx.self_node()].as_worker(), BucketRecord{std::move(key), record});
    };

    s->process = [p](Message msg, std::any state, const Role& role, ProcessContext& ctx) {
        if (role == "forwarder") {
            return processForwarder(p, msg, state, ctx);
        }
        return processBucket(p, msg, state, ctx);
    };

    if (p.merge) {
        s->drain = [](DrainContext& ctx, int round) {
            for (const auto& ref : buckets(ctx.deployment()).as_list()) {
                if (round == 0) {
                    ctx.send(ref.as_worker(), Flush{});
                } else {
                    ctx.send(ref.as_worker(), EmitMerged{});
                }
            }
            return round == 0;
        };
    }
    return s;
}

Params paramsFor(Mode mode, const SplitStrategyConfig& c) {
    Params p{mode, c.worker_count, c.d, c.head_threshold, c.sketch_capacity, c.warmup, c.merge_enabled, c.observer};
    if (mode == Mode::kDChoices || mode == Mode::kWChoices) {
        if (p.sketch_capacity == 0) {
            p.sketch_capacity = sketch_capacity_for(p.theta);
        } else if (!(p.theta > 0 && p.theta < 1)) {
            throw Error(ErrorCode::kInvalidConfig, "heavy-hitter threshold must lie in (0, 1)");
        }
        if (p.warmup == 0) {
            p.warmup = static_cast<std::size_t>(std::ceil(10.0 / p.theta - 1e-9));
        }
    }
    return p;
}

}// namespace

StrategyPtr shuffle_strategy(ShuffleConfig config) {
    if (config.worker_count < 1) {
        throw Error(ErrorCode::kInvalidConfig, "shuffle grouping needs at least one worker");
    }
    return makeSplit(Params{Mode::kShuffle, config.worker_count, 0, 0, 0, 0, config.merge_enabled, nullptr});
}

StrategyPtr pkg_strategy(SplitStrategyConfig config) {
    if (config.worker_count < 2) {
        throw Error(ErrorCode::kInvalidConfig, "partial key grouping needs at least two workers");
    }
    return makeSplit(paramsFor(Mode::kPkg, config));
}

StrategyPtr d_choices_strategy(SplitStrategyConfig config) {
    if (config.d < 2) {
        throw Error(ErrorCode::kInvalidConfig, "d-choices needs d >= 2");
    }
    if (config.d > config.worker_count) {
        throw Error(ErrorCode::kInvalidConfig, "d-choices needs d <= worker count");
    }
    return makeSplit(paramsFor(Mode::kDChoices, config));
}

StrategyPtr w_choices_strategy(SplitStrategyConfig config) {
    if (config.worker_count < 1) {
        throw Error(ErrorCode::kInvalidConfig, "w-choices needs at least one worker");
    }
    return makeSplit(paramsFor(Mode::kWChoices, config));
}

StrategyPtr make_strategy(std::string_view name, const StrategyOptions& o) {
    if (name == "kg") {
        return keyed_state_strategy(KeyedConfig{o.worker_count});
    }
    if (name == "sg") {
        return shuffle_strategy(ShuffleConfig{o.worker_count, o.merge_enabled});
    }
    SplitStrategyConfig c;
    c.worker_count = o.worker_count;
    c.d = o.d;
    c.head_threshold = o.head_threshold;
    c.merge_enabled = o.merge_enabled;
    c.observer = o.observer;
    if (name == "pkg") {
        return pkg_strategy(c);
    }
    if (name == "dc") {
        return d_choices_strategy(c);
    }
    if (name == "wc") {
        return w_choices_strategy(c);
    }
    throw Error(ErrorCode::kUnknownStrategy, "unknown strategy '" + std::string(name) + "'");
}

}// namespace dstream
