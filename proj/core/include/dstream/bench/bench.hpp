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
#ifndef DSTREAM_BENCH_BENCH_HPP_
#define DSTREAM_BENCH_BENCH_HPP_

#include <dstream/core/workflow.hpp>
#include <dstream/join/join.hpp>
#include <dstream/runtime/application.hpp>
#include <dstream/strategies/strategies.hpp>

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace dstream::bench {

/// Count operation: key = word, state = integer count, merge = addition.
OperationPtr word_count_operation();

struct WordcountSpec {
    std::string strategy = "kg";
    std::size_t worker_count = 80;
    bool merge_enabled = false;
    std::size_t d = 4;
    double head_threshold = 0.01;
    std::shared_ptr<RoutingObserver> observer;
    std::function<void(const Value&)> consumer;
};

/// source -> count -> sink, where the count node uses the named strategy.
Workflow wordcount_workflow(const WordcountSpec& spec);

struct BenchResult {
    std::string benchmark;
    std::string strategy;
    std::string parameter;
    std::size_t workers = 0;
    std::uint64_t records = 0;
    double throughput_rps = 0;
    double imbalance = 0;
    std::uint64_t remote_msgs = 0;
    std::int64_t stored_tuples = 0;
    double elapsed_ms = 0;
    std::uint64_t seed = 0;
};

struct ClusterShape {
    std::size_t nodes = 4;
    std::size_t threads_per_node = 4;
    ExecutorMode executor = ExecutorMode::kThreaded;
    WorkMode work_mode = WorkMode::kAuto;
};

struct WordcountBench {
    std::string strategy = "kg";
    double z = 1.4;
    std::size_t vocabulary = 10000;
    std::size_t workers = 80;
    std::uint64_t records = 100000;
    bool merge = false;
    std::chrono::nanoseconds work = std::chrono::microseconds(100);
    std::uint64_t seed = 0;
    ClusterShape cluster;
};

/**
 * One WordCount run. Throughput is input records over the time from the first
 * injection to the last sink record; imbalance covers the count workers.
 * Throws ZeroRecords for an empty input.
 */
BenchResult run_wordcount(const WordcountBench& b);

struct JoinBench {
    std::string query = "q7";
    std::string strategy = "jm";
    JoinOptions options;
    double scale = 0.01;
    /// Records per second per source table; absent means unthrottled.
    std::map<std::string, double> rates;
    std::uint64_t seed = 0;
    ClusterShape cluster;
};

/// Workers of one join node under the configured strategy.
std::size_t join_workers(const std::string& strategy, const JoinOptions& options);

/**
 * One join cascade run. Throughput is sink records over the sink's active
 * time; stored tuples and imbalance refer to the final join node.
 */
BenchResult run_join(const JoinBench& b);

/// Seed of run `index`: the base seed for run 0, derived otherwise.
std::uint64_t run_seed(std::uint64_t base, std::size_t index);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const BenchResult& r);
/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

}// namespace dstream::bench

#endif// DSTREAM_BENCH_BENCH_HPP_
