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
#include <dstream/bench/bench.hpp>
#include <dstream/bench/tables.hpp>
#include <dstream/bench/zipf.hpp>
#include <dstream/operators/operators.hpp>

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace dstream::bench {

namespace {

ClusterConfig clusterFor(const ClusterShape& shape, std::uint64_t seed, std::chrono::nanoseconds work) {
    ClusterConfig c;
    c.node_count = shape.nodes;
    c.executor_threads_per_node = shape.threads_per_node;
    c.executor = shape.executor;
    c.work_mode = shape.work_mode;
    c.seed = seed;
    c.simulated_work = work;
    return c;
}

double elapsedMs(const MetricsSnapshot& m) {
    if (!m.first_record_time || !m.last_record_time) {
        return 0;
    }
    return std::chrono::duration<double, std::milli>(*m.last_record_time - *m.first_record_time).count();
}

std::string formatDouble(double v) {
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

}// namespace

OperationPtr word_count_operation() {
    return ops::keyed_reduce_operation([](const Value& word) { return word; },
                                       [](const Value& count, const Value&) { return Value(count.as_int() + 1); },
                                       Value(0), ops::ReduceOptions{ops::add_values, {"react", "merge"}});
}

Workflow wordcount_workflow(const WordcountSpec& spec) {
    StrategyOptions o;
    o.worker_count = spec.worker_count;
    o.d = spec.d;
    o.head_threshold = spec.head_threshold;
    o.merge_enabled = spec.merge_enabled;
    o.observer = spec.observer;
    WorkflowBuilder b;
    b.add(ops::source().as("source"));
    b.add(NodeSpec{word_count_operation(), make_strategy(spec.strategy, o), Value(), "count"});
    b.add(ops::sink(spec.consumer).as("sink"));
    b.chain({"source", "count", "sink"});
    return b.build();
}

std::uint64_t run_seed(std::uint64_t base, std::size_t index) {
    return index == 0 ? base : derive_seed(base, "run", index);
}

BenchResult run_wordcount(const WordcountBench& b) {
    if (b.records == 0) {
        throw Error(ErrorCode::kZeroRecords, "wordcount needs at least one record");
    }
    WordcountSpec spec;
    spec.strategy = b.strategy;
    spec.worker_count = b.workers;
    spec.merge_enabled = b.merge;
    auto wf = wordcount_workflow(spec);
    Application app(wf, clusterFor(b.cluster, b.seed, b.work));

    auto sampler = std::make_shared<ZipfSampler>(b.vocabulary, b.z, derive_seed(b.seed, "zipf"));
    auto left = std::make_shared<std::uint64_t>(b.records);
    app.feed("source", [sampler, left]() -> std::optional<Value> {
        if (*left == 0) {
            return std::nullopt;
        }
        --*left;
        return Value(zipf_word(sampler->next()));
    });
    auto m = app.await_quiescence();

    BenchResult r;
    r.benchmark = "wordcount";
    r.strategy = b.strategy;
    r.parameter = formatDouble(b.z);
    r.workers = b.workers;
    r.records = m.records_injected;
    r.elapsed_ms = elapsedMs(m);
    r.throughput_rps = compute_throughput(m.records_injected, *m.last_record_time - *m.first_record_time);
    r.imbalance = imbalance(m, WorkerGroup{"count", {"aggregator", "bucket"}});
    r.remote_msgs = m.remote_sends();
    r.stored_tuples = m.stored(WorkerGroup{"count", {}});
    r.seed = b.seed;
    return r;
}

std::size_t join_workers(const std::string& strategy, const JoinOptions& o) {
    if (strategy == "jm") {
        return o.matrix.rows * o.matrix.cols;
    }
    return o.left_workers + o.right_workers;
}

BenchResult run_join(const JoinBench& b) {
    auto q = parse_query(b.query);
    auto strategy = make_join_strategy(b.strategy, b.options);
    auto wf = cascade_join_workflow(q, strategy);
    auto tables = synthetic_tables(b.scale, b.seed);
    Application app(wf, clusterFor(b.cluster, b.seed, std::chrono::nanoseconds(0)));

    std::vector<FeedSpec> feeds;
    for (const auto& src : query_sources(q)) {
        std::optional<double> rate;
        if (auto it = b.rates.find(src); it != b.rates.end()) {
            rate = it->second;
        }
        feeds.push_back(FeedSpec{src, from_values(tables.table(src)), rate});
    }
    app.feed_all(std::move(feeds));
    auto m = app.await_quiescence();

    auto last = "join" + std::to_string(query_sources(q).size() - 1);
    BenchResult r;
    r.benchmark = "join";
    r.strategy = b.strategy;
    r.parameter = b.query;
    r.workers = join_workers(b.strategy, b.options);
    r.records = m.records_injected;
    r.elapsed_ms = elapsedMs(m);
    r.throughput_rps = m.total_sink_records > 0 ? compute_throughput(m) : 0.0;
    WorkerGroup joiners{last, {"cell", "joiner-left", "joiner-right"}};
    r.imbalance = m.processed(joiners) > 0 ? imbalance(m, joiners) : 0.0;
    r.remote_msgs = m.remote_sends();
    r.stored_tuples = m.stored(WorkerGroup{last, {}});
    r.seed = b.seed;
    return r;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

void write_csv_header(std::ostream& out) {
    out << "benchmark,strategy,parameter,workers,records,throughput_rps,imbalance,remote_msgs,stored_tuples,"
           "elapsed_ms,seed\r\n";
}

void write_csv_row(std::ostream& out, const BenchResult& r) {
    out << csv_field(r.benchmark) << ',' << csv_field(r.strategy) << ',' << csv_field(r.parameter) << ','
        << r.workers << ',' << r.records << ',' << formatDouble(r.throughput_rps) << ','
        << formatDouble(r.imbalance) << ',' << r.remote_msgs << ',' << r.stored_tuples << ','
        << formatDouble(r.elapsed_ms) << ',' << r.seed << "\r\n";
}

}// namespace dstream::bench
