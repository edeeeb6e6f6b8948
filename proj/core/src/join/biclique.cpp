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
#include <dstream/join/join.hpp>
#include <dstream/strategies/murmur.hpp>

#include <algorithm>
#include <compare>
#include <limits>
#include <map>
#include <unordered_map>

namespace dstream {

namespace {

enum Side : std::uint8_t { kLeft = 0, kRight = 1 };

/// Total order over stamped records: counter, then sender, then side (left first).
struct Stamp {
    std::uint64_t counter = 0;
    std::uint64_t sender = 0;
    Side side = kLeft;

    friend auto operator<=>(const Stamp&, const Stamp&) = default;
};

struct JoinInput {
    Side side;
    Value key;
    DataRecord record;
};

struct Store {
    Stamp stamp;
    Value key;
    Value payload;
};

struct Probe {
    Stamp stamp;
    Value key;
    Value payload;
};

struct Clock {
    std::size_t sender;
    std::uint64_t value;
};

struct Sync {};

struct SenderState {
    std::size_t index = 0;
    std::uint64_t counter = 0;
    std::uint64_t last_broadcast = 0;
    std::size_t since_broadcast = 0;
};

struct StoredRow {
    Stamp stamp;
    Value payload;
};

struct JoinerState {
    Side side = kLeft;
    std::vector<std::uint64_t> clocks;
    std::uint64_t watermark = 0;
    std::unordered_multimap<Value, StoredRow> table;
    std::multimap<std::uint64_t, Probe> waiting;
};

struct Layout {
    std::size_t left;
    std::size_t right;
    std::size_t groups;
    std::size_t delta;
    bool contrand;
};

const char* roleOf(Side s) {
    return s == kLeft ? "joiner-left" : "joiner-right";
}

const Value& joiners(const Value& deployment, Side s) {
    return deployment.at(s == kLeft ? "left" : "right");
}

void broadcast(SenderState& st, ProcessContext& ctx) {
    const auto& d = ctx.deployment();
    Clock c{st.index, st.counter};
    for (const auto& ref : d.at("senders").as_list()) {
        if (ref.as_worker() != ctx.self()) {
            ctx.send(ref.as_worker(), c);
        }
    }
    for (Side s : {kLeft, kRight}) {
        for (const auto& ref : joiners(d, s).as_list()) {
            ctx.send(ref.as_worker(), c);
        }
    }
    st.last_broadcast = st.counter;
    st.since_broadcast = 0;
}

void processSender(const Layout& l, Message& msg, SenderState& st, ProcessContext& ctx) {
    if (auto* in = std::any_cast<JoinInput>(&msg)) {
        Stamp stamp{++st.counter, st.index, in->side};
        const auto& own = joiners(ctx.deployment(), in->side);
        const auto& other = joiners(ctx.deployment(), in->side == kLeft ? kRight : kLeft);
        std::size_t own_lo = 0, own_n = own.size(), other_lo = 0, other_n = other.size();
        if (l.contrand) {
            auto g = key_slot(in->key, l.groups, 0);
            own_n /= l.groups;
            other_n /= l.groups;
            own_lo = g * own_n;
            other_lo = g * other_n;
        }
        auto target = own_lo + ctx.pick(in->record, own_n, 3);
        ctx.send(own[target].as_worker(), Store{stamp, in->key, in->record.payload()});
        for (std::size_t i = other_lo; i < other_lo + other_n; ++i) {
            ctx.send(other[i].as_worker(), Probe{stamp, in->key, in->record.payload()});
        }
        if (++st.since_broadcast >= l.delta) {
            broadcast(st, ctx);
        }
        return;
    }
    if (auto* c = std::any_cast<Clock>(&msg)) {
        if (c->value > st.counter) {
            st.counter = c->value;
            if (st.counter - st.last_broadcast >= l.delta) {
                broadcast(st, ctx);
            }
        }
        return;
    }
    if (std::any_cast<Sync>(&msg)) {
        broadcast(st, ctx);
        return;
    }
    throw Error(ErrorCode::kProtocolViolation, "sender received an unexpected message");
}

void match(JoinerState& st, const Probe& p, ProcessContext& ctx) {
    auto [lo, hi] = st.table.equal_range(p.key);
    if (lo == hi) {
        return;
    }
    const auto& port = ctx.operation().out_ports().front().name;
    Emissions out;
    for (auto it = lo; it != hi; ++it) {
        if (!(it->second.stamp < p.stamp)) {
            continue;
        }
        const Value args[2] = {st.side == kLeft ? it->second.payload : p.payload,
                               st.side == kLeft ? p.payload : it->second.payload};
        out.add(port, ctx.call("join", ctx.initial_state(), args).result);
    }
    if (!out.empty()) {
        ctx.emit(out);
    }
}

void processJoiner(Message& msg, JoinerState& st, ProcessContext& ctx) {
    if (auto* s = std::any_cast<Store>(&msg)) {
        if (s->stamp.counter <= st.watermark) {
            throw Error(ErrorCode::kProtocolViolation, "store stamped " + std::to_string(s->stamp.counter) +
                                                           " arrived after watermark " +
                                                           std::to_string(st.watermark));
        }
        st.table.emplace(std::move(s->key), StoredRow{s->stamp, std::move(s->payload)});
        ctx.record_stored(1);
        return;
    }
    if (auto* p = std::any_cast<Probe>(&msg)) {
        if (p->stamp.counter <= st.watermark) {
            match(st, *p, ctx);
        } else {
            st.waiting.emplace(p->stamp.counter, std::move(*p));
        }
        return;
    }
    if (auto* c = std::any_cast<Clock>(&msg)) {
        st.clocks[c->sender] = std::max(st.clocks[c->sender], c->value);
        st.watermark = *std::min_element(st.clocks.begin(), st.clocks.end());
        auto end = st.waiting.upper_bound(st.watermark);
        for (auto it = st.waiting.begin(); it != end; ++it) {
            match(st, it->second, ctx);
        }
        st.waiting.erase(st.waiting.begin(), end);
        return;
    }
    throw Error(ErrorCode::kProtocolViolation, "joiner received an unexpected message");
}

StrategyPtr makeBiclique(const BicliqueConfig& c, bool contrand) {
    if (c.left_workers < 1 || c.right_workers < 1) {
        throw Error(ErrorCode::kInvalidConfig, "join biclique needs workers on both sides");
    }
    if (c.watermark_interval < 1) {
        throw Error(ErrorCode::kInvalidConfig, "watermark interval must be positive");
    }
    if (contrand && (c.subgroups < 1 || c.left_workers % c.subgroups != 0 || c.right_workers % c.subgroups != 0)) {
        throw Error(ErrorCode::kInvalidConfig, "subgroup count " + std::to_string(c.subgroups) +
                                                   " must divide both side worker counts");
    }
    Layout l{c.left_workers, c.right_workers, contrand ? c.subgroups : 1, c.watermark_interval, contrand};
    auto s = std::make_shared<StrategyDef>();
    s->name = contrand ? "jbcr" : "jb";
    s->required_callbacks = {"left_key", "right_key", "join"};
    s->roles = {"sender", "joiner-left", "joiner-right"};
    Value::Dict cfg{{"left_workers", c.left_workers},
                    {"right_workers", c.right_workers},
                    {"watermark_interval", c.watermark_interval}};
    if (contrand) {
        cfg.emplace("subgroups", c.subgroups);
    }
    s->config = Value(std::move(cfg));

    s->deploy = [l](const Value&, DeployContext& ctx) {
        auto nodes = ctx.node_count();
        Value::List senders;
        for (const auto& [node, ref] : ctx.on_all_workers([](WorkerSpawner& local) {
                 return Value(local.local_worker(SenderState{local.self_node()}, "sender"));
             })) {
            senders.push_back(ref);
        }
        Value::Dict d{{"senders", Value(std::move(senders))}};
        std::size_t placed = 0;
        for (Side side : {kLeft, kRight}) {
            Value::List refs;
            auto n = side == kLeft ? l.left : l.right;
            for (std::size_t i = 0; i < n; ++i, ++placed) {
                JoinerState js;
                js.side = side;
                js.clocks.assign(nodes, 0);
                refs.emplace_back(ctx.worker_on(static_cast<NodeIndex>(placed % nodes), std::move(js), roleOf(side)));
            }
            d.emplace(side == kLeft ? "left" : "right", Value(std::move(refs)));
        }
        return Value(std::move(d));
    };

    s->deliver = [](const DataRecord& record, DeliverContext& ctx) {
        bool left = record.in_port() == "left";
        auto key = ctx.call(left ? "left_key" : "right_key", ctx.initial_state(), record).result;
        const auto& senders = ctx.deployment().at("senders");
        ctx.send(senders[ctx.self_node()].as_worker(), JoinInput{left ? kLeft : kRight, std::move(key), record});
    };

    s->process = [l](Message msg, std::any state, const Role& role, ProcessContext& ctx) {
        if (role == "sender") {
            processSender(l, msg, std::any_cast<SenderState&>(state), ctx);
        } else {
            processJoiner(msg, std::any_cast<JoinerState&>(state), ctx);
        }
        return state;
    };

    // Two sync rounds: the first spreads every sender's clock (senders adopt the
    // maximum), the second broadcasts the now equal clocks and releases all probes.
    s->drain = [](DrainContext& ctx, int round) {
        for (const auto& ref : ctx.deployment().at("senders").as_list()) {
            ctx.send(ref.as_worker(), Sync{});
        }
        return round == 0;
    };
    return s;
}

}// namespace

StrategyPtr join_biclique_strategy(BicliqueConfig config) {
    return makeBiclique(config, false);
}

StrategyPtr join_biclique_contrand_strategy(BicliqueConfig config) {
    return makeBiclique(config, true);
}

StrategyPtr make_join_strategy(std::string_view name, const JoinOptions& o) {
    if (name == "jm") {
        return join_matrix_strategy(o.matrix);
    }
    BicliqueConfig c{o.left_workers, o.right_workers, o.subgroups, o.watermark_interval};
    if (name == "jb") {
        return join_biclique_strategy(c);
    }
    if (name == "jbcr") {
        return join_biclique_contrand_strategy(c);
    }
    throw Error(ErrorCode::kUnknownStrategy, "unknown join strategy '" + std::string(name) + "'");
}

}// namespace dstream
