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

#include <unordered_map>

namespace dstream {

namespace {

enum Side : int { kLeft = 0, kRight = 1 };

struct CellInput {
    Side side;
    Value key;
    Value payload;
};

struct Cell {
    std::unordered_multimap<Value, Value> tables[2];
};

}// namespace

StrategyPtr join_matrix_strategy(MatrixConfig config) {
    if (config.rows * config.cols < 1) {
        throw Error(ErrorCode::kInvalidConfig, "join matrix needs at least one cell");
    }
    auto s = std::make_shared<StrategyDef>();
    s->name = "jm";
    s->required_callbacks = {"left_key", "right_key", "join"};
    s->roles = {"cell"};
    s->config = Value::dict({{"rows", config.rows}, {"cols", config.cols}, {"round_robin", config.round_robin}});
    s->deploy = [config](const Value&, DeployContext& ctx) {
        Value::List cells;
        for (std::size_t i = 0; i < config.rows * config.cols; ++i) {
            cells.emplace_back(ctx.worker_on(static_cast<NodeIndex>(i % ctx.node_count()), Cell{}, "cell"));
        }
        return Value(std::move(cells));
    };
    s->deliver = [config](const DataRecord& record, DeliverContext& ctx) {
        const auto& cells = ctx.deployment();
        auto r = config.rows;
        auto c = config.cols;
        if (record.in_port() == "left") {
            auto key = ctx.call("left_key", ctx.initial_state(), record).result;
            auto row = config.round_robin ? record.seq().counter % r : ctx.pick(record, r, 1);
            for (std::size_t j = 0; j < c; ++j) {
                ctx.send(cells[row * c + j].as_worker(), CellInput{kLeft, key, record.payload()});
            }
        } else {
            auto key = ctx.call("right_key", ctx.initial_state(), record).result;
            auto col = config.round_robin ? record.seq().counter % c : ctx.pick(record, c, 2);
            for (std::size_t i = 0; i < r; ++i) {
                ctx.send(cells[i * c + col].as_worker(), CellInput{kRight, key, record.payload()});
            }
        }
    };
    s->process = [](Message msg, std::any state, const Role&, ProcessContext& ctx) {
        auto& cell = std::any_cast<Cell&>(state);
        auto& in = std::any_cast<CellInput&>(msg);
        const auto& port = ctx.operation().out_ports().front().name;
        auto [lo, hi] = cell.tables[1 - in.side].equal_range(in.key);
        Emissions out;
        for (auto it = lo; it != hi; ++it) {
            const Value args[2] = {in.side == kLeft ? in.payload : it->second, in.side == kLeft ? it->second : in.payload};
            out.add(port, ctx.call("join", ctx.initial_state(), args).result);
        }
        cell.tables[in.side].emplace(std::move(in.key), std::move(in.payload));
        ctx.record_stored(1);
        if (!out.empty()) {
            ctx.emit(out);
        }
        return state;
    };
    return s;
}

}// namespace dstream
