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
#include <dstream/operators/operators.hpp>

namespace dstream {

namespace {

struct Stage {
    std::string right;
    std::string key;
};

std::vector<Stage> stagesOf(Query q) {
    if (q == Query::kQ5) {
        return {{"nation", "regionkey"}, {"supplier", "nationkey"}, {"lineitem", "suppkey"}};
    }
    return {{"supplier", "nationkey"}, {"lineitem", "suppkey"}};
}

}// namespace

Query parse_query(std::string_view text) {
    if (text == "q5" || text == "Q5") {
        return Query::kQ5;
    }
    if (text == "q7" || text == "Q7") {
        return Query::kQ7;
    }
    throw Error(ErrorCode::kInvalidQuery, "unknown query '" + std::string(text) + "'");
}

std::vector<std::string> query_sources(Query q) {
    if (q == Query::kQ5) {
        return {"region", "nation", "supplier", "lineitem"};
    }
    return {"nation", "supplier", "lineitem"};
}

Workflow cascade_join_workflow(Query q, StrategyPtr strategy, std::function<void(const Value&)> consumer) {
    if (!strategy) {
        throw Error(ErrorCode::kMissingStrategy, "cascade joins need a join strategy");
    }
    WorkflowBuilder b;
    for (const auto& src : query_sources(q)) {
        b.add(ops::source().as(src));
    }
    std::string left = query_sources(q).front();
    std::string left_port = "out";
    std::size_t i = 0;
    for (const auto& stage : stagesOf(q)) {
        auto id = "join" + std::to_string(++i);
        auto field = stage.key;
        auto extract = [field](const Value& row) { return row.at(field); };
        NodeSpec spec{join_operation("equi_join", JoinFns{extract, extract, merge_rows}), strategy, Value(), id};
        b.add(spec);
        b.link(left, left_port, id, "left");
        b.link(stage.right, "out", id, "right");
        left = id;
        left_port = "matched";
    }
    b.add(ops::sink(std::move(consumer)).as("sink"));
    b.link(left, "matched", "sink", "in");
    return b.build();
}

}// namespace dstream
