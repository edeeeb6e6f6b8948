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
#ifndef DSTREAM_JOIN_JOIN_HPP_
#define DSTREAM_JOIN_JOIN_HPP_

#include <dstream/core/workflow.hpp>

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace dstream {

/**
 * Two-input equi-join operation: in-ports "left" and "right", out-port
 * "matched", callbacks left_key, right_key and join(left, right).
 */
struct JoinFns {
    std::function<Value(const Value&)> left_key;
    std::function<Value(const Value&)> right_key;
    std::function<Value(const Value& left, const Value& right)> join;
};

OperationPtr join_operation(std::string name, JoinFns fns, StrategyPtr default_strategy = nullptr);

/// Union of two dict payloads; fields of the right side win on conflicts.
Value merge_rows(const Value& left, const Value& right);

struct MatrixConfig {
    std::size_t rows = 1;
    std::size_t cols = 1;
    /// Pick rows/columns round-robin by record stamp instead of uniformly at random.
    bool round_robin = false;

    /// "RxC", e.g. "4x5".
    static MatrixConfig parse(std::string_view text);
};

/**
 * Join-Matrix: rows x cols cells placed row-major over the nodes. A left
 * record goes to every cell of one row, a right record to every cell of one
 * column; each cell runs a symmetric hash join.
 */
StrategyPtr join_matrix_strategy(MatrixConfig config);

struct BicliqueConfig {
    std::size_t left_workers = 10;
    std::size_t right_workers = 10;
    /// Key-hash subgroups per side (ContRand only).
    std::size_t subgroups = 1;
    /// Stamped records between clock broadcasts.
    std::size_t watermark_interval = 64;
};

/**
 * Join-Biclique: one sender per node stamps records with a logical clock,
 * stores each record at one joiner of its side and probes every joiner of
 * the other side. Probes wait for the clock watermark and only match stored
 * records with an earlier stamp, so every pair is emitted exactly once.
 */
StrategyPtr join_biclique_strategy(BicliqueConfig config);
/// Join-Biclique restricted to key-hash subgroups on both sides.
StrategyPtr join_biclique_contrand_strategy(BicliqueConfig config);

struct JoinOptions {
    MatrixConfig matrix{4, 5};
    std::size_t left_workers = 10;
    std::size_t right_workers = 10;
    std::size_t subgroups = 5;
    std::size_t watermark_interval = 64;
};

/// "jm", "jb", "jbcr". Throws UnknownStrategy.
StrategyPtr make_join_strategy(std::string_view name, const JoinOptions& options);

enum class Query { kQ5, kQ7 };

/// "q5" / "q7". Throws InvalidQuery.
Query parse_query(std::string_view text);

/// Source node ids of a query in stream order, e.g. {"nation", "supplier", "lineitem"}.
std::vector<std::string> query_sources(Query q);

/**
 * Left-deep cascade over dict rows:
 * Q5 = ((region x nation) x supplier) x lineitem on regionkey, nationkey, suppkey;
 * Q7 = (nation x supplier) x lineitem on nationkey, suppkey.
 * Join nodes are "join1".., the sink is "sink"; every join node uses `strategy`.
 */
Workflow cascade_join_workflow(Query q, StrategyPtr strategy, std::function<void(const Value&)> consumer = {});

}// namespace dstream

#endif// DSTREAM_JOIN_JOIN_HPP_
