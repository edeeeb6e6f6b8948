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
#ifndef DSTREAM_TESTS_CHECKS_HPP_
#define DSTREAM_TESTS_CHECKS_HPP_

#include <dstream/bench/bench.hpp>
#include <dstream/bench/tables.hpp>
#include <dstream/bench/zipf.hpp>
#include <dstream/join/join.hpp>
#include <dstream/strategies/murmur.hpp>
#include <dstream/strategies/space_saving.hpp>

#include "murmur_vectors.hpp"
#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_set>

// Parameterized checks shared by the unit tests and the acceptance runner.
namespace dstream::testing {

/// Remembers which worker is processing on the calling thread.
class CurrentWorker : public RuntimeObserver {
  public:
    void on_process_begin(const WorkerRef& w, const Message&) override { current() = w; }
    void on_process_end(const WorkerRef&) override { current().reset(); }

    static std::optional<WorkerRef>& current() {
        thread_local std::optional<WorkerRef> w;
        return w;
    }
};

/// Collects every routing decision.
class RouteLog : public RoutingObserver {
  public:
    void on_route(const RoutingDecision& d) override {
        std::lock_guard lk(mu_);
        decisions_.push_back(d);
    }
    std::vector<RoutingDecision> decisions() const {
        std::lock_guard lk(mu_);
        return decisions_;
    }

  private:
    mutable std::mutex mu_;
    std::vector<RoutingDecision> decisions_;
};

inline std::vector<Value> zipf_words(std::size_t records, std::size_t keys, double z, std::uint64_t seed) {
    std::vector<Value> out;
    out.reserve(records);
    for (auto& w : bench::zipf_generate(bench::ZipfConfig{keys, z, records, seed})) {
        out.emplace_back(std::move(w));
    }
    return out;
}

inline std::string describe(const Value& v) { return v.to_string(); }

// Key grouping: every key lands on exactly one aggregator, namely deployment[h0(key) mod W].
inline Outcome check_kg_routing(std::uint64_t seed, std::size_t records = 10'000, std::size_t keys = 1'000,
                                std::size_t buckets = 8, bool threaded = true) {
    Outcome out;
    std::mutex mu;
    std::map<Value, std::set<WorkerId>> owners;
    auto update = [&](const Value& state, const Value& word) {
        auto w = CurrentWorker::current();
        std::lock_guard lk(mu);
        owners[word].insert(w ? w->id : ~WorkerId{0});
        return Value(state.as_int() + 1);
    };
    WorkflowBuilder b;
    b.add(ops::source().as("source"));
    b.add(ops::keyed_reduce([](const Value& v) { return v; }, update, Value(0))
              .with(keyed_state_strategy(KeyedConfig{buckets}))
              .as("count"));
    b.add(ops::sink().as("sink"));
    b.chain({"source", "count", "sink"});
    auto cfg = threaded ? threaded_cluster(4, 2, seed) : deterministic_cluster(4, seed);
    cfg.observer = std::make_shared<CurrentWorker>();
    Application app(b.build(), cfg);
    auto words = zipf_words(records, keys, 1.4, seed);
    app.feed("source", words);
    auto m = app.await_quiescence();
    const auto& deployment = app.deployment("count").as_list();
    if (deployment.size() != buckets) {
        out.fail("expected " + std::to_string(buckets) + " aggregators");
    }
    for (const auto& [key, ws] : owners) {
        if (ws.size() != 1) {
            out.fail("key " + describe(key) + " processed by " + std::to_string(ws.size()) + " workers");
            continue;
        }
        if (*ws.begin() != deployment[key_slot(key, buckets)].as_worker().id) {
            out.fail("key " + describe(key) + " not at h0(key) mod W");
        }
    }
    if (m.processed(WorkerGroup{"count", {}}) != records || m.total_sink_records != records) {
        out.fail("record count mismatch");
    }
    return out;
}

struct SplitBoundsReport {
    Outcome outcome;
    std::size_t head_keys = 0;
    /// Largest number of buckets one key reached at one forwarder.
    std::size_t max_spread = 0;
};

/**
 * Routing bounds per forwarder: PKG keys reach at most 2 buckets, D-Choices
 * keys at most d, W-Choices tail keys at most 2. Every decision picks a
 * least-loaded candidate, the smallest index among ties.
 */
inline SplitBoundsReport check_split_bounds(const std::string& strategy, std::uint64_t seed,
                                            std::size_t records = 100'000, std::size_t workers = 80, double z = 2.0,
                                            std::size_t d = 4) {
    SplitBoundsReport rep;
    auto& out = rep.outcome;
    auto log = std::make_shared<RouteLog>();
    bench::WordcountSpec spec;
    spec.strategy = strategy;
    spec.worker_count = workers;
    spec.d = d;
    spec.observer = log;
    Application app(bench::wordcount_workflow(spec), deterministic_cluster(4, seed));
    app.feed("source", zipf_words(records, 10'000, z, seed));
    app.await_quiescence();
    struct Seen {
        std::set<std::size_t> buckets;
        bool head = false;
    };
    std::map<std::pair<WorkerId, Value>, Seen> seen;
    for (const auto& dec : log->decisions()) {
        auto& s = seen[{dec.forwarder.id, dec.key}];
        s.buckets.insert(dec.chosen);
        s.head = s.head || dec.head;
        auto it = std::find(dec.candidates.begin(), dec.candidates.end(), dec.chosen);
        if (it == dec.candidates.end()) {
            out.fail("chosen bucket is not a candidate");
            continue;
        }
        auto chosen_load = dec.loads[static_cast<std::size_t>(it - dec.candidates.begin())];
        for (std::size_t i = 0; i < dec.candidates.size(); ++i) {
            if (dec.loads[i] < chosen_load || (dec.loads[i] == chosen_load && dec.candidates[i] < dec.chosen)) {
                out.fail("decision does not pick the least loaded candidate");
            }
        }
    }
    if (log->decisions().size() != records) {
        out.fail("expected one routing decision per record");
    }
    for (const auto& [fk, s] : seen) {
        rep.head_keys += s.head ? 1 : 0;
        rep.max_spread = std::max(rep.max_spread, s.buckets.size());
        std::size_t bound = 2;
        if (strategy == "dc") {
            bound = std::max<std::size_t>(d, 2);
        } else if (strategy == "wc" && s.head) {
            bound = workers;
        }
        if (s.buckets.size() > bound) {
            out.fail(strategy + " key " + describe(fk.second) + " reached " + std::to_string(s.buckets.size()) +
                     " buckets at one forwarder");
        }
        if (strategy == "pkg" && s.head) {
            out.fail("pkg reported a head key");
        }
    }
    return rep;
}

/// Final (word, count) per word: the largest count emitted for it.
inline std::multiset<Value> final_counts(const std::vector<Value>& emitted) {
    std::map<Value, std::int64_t> last;
    for (const auto& e : emitted) {
        auto& c = last[e[0]];
        c = std::max(c, e[1].as_int());
    }
    std::multiset<Value> out;
    for (const auto& [w, c] : last) {
        out.insert(Value::list({w, c}));
    }
    return out;
}

/// WordCount with merge enabled ends with the sequential fold's counts; split strategies emit each word once.
inline Outcome check_wordcount_merge(const std::string& strategy, std::uint64_t seed, std::size_t records = 10'000,
                                     bool threaded = true) {
    Outcome out;
    Collector sink;
    bench::WordcountSpec spec;
    spec.strategy = strategy;
    spec.worker_count = 16;
    spec.merge_enabled = true;
    spec.consumer = sink.consumer();
    auto cfg = threaded ? threaded_cluster(4, 2, seed, true) : deterministic_cluster(4, seed);
    Application app(bench::wordcount_workflow(spec), cfg);
    auto words = zipf_words(records, 1'000, 1.4, seed);
    app.feed("source", words);
    app.await_quiescence();
    auto emitted = sink.values();
    auto expected = final_counts_oracle(words);
    if (final_counts(emitted) != expected) {
        out.fail(strategy + ": final counts differ from the sequential fold");
    }
    if (strategy != "kg" && emitted.size() != expected.size()) {
        out.fail(strategy + ": " + std::to_string(emitted.size()) + " emissions for " +
                 std::to_string(expected.size()) + " words");
    }
    return out;
}

/// Space-Saving guarantees on one stream: keys above n/k are tracked and count - error <= true <= count.
inline Outcome check_space_saving_stream(const std::vector<Value>& stream, std::size_t k) {
    Outcome out;
    SpaceSaving sketch(k);
    std::map<Value, std::uint64_t> truth;
    for (const auto& v : stream) {
        sketch.offer(v);
        ++truth[v];
    }
    if (sketch.size() > k) {
        out.fail("sketch exceeds capacity");
    }
    if (sketch.n_seen() != stream.size()) {
        out.fail("n_seen mismatch");
    }
    for (const auto& [key, n] : truth) {
        if (n * k > stream.size() && !sketch.contains(key)) {
            out.fail("frequent key " + describe(key) + " not tracked");
        }
    }
    for (const auto& [key, c] : sketch.counters()) {
        auto it = truth.find(key);
        auto t = it == truth.end() ? 0 : it->second;
        if (!(t <= c.count && c.count <= t + c.error)) {
            out.fail("estimate bounds violated for " + describe(key));
        }
    }
    return out;
}

/// Random stream: Zipf with random skew and vocabulary, or a uniform one.
inline std::vector<Value> random_stream(std::uint64_t seed, std::size_t n) {
    Gen g(seed);
    auto keys = static_cast<std::size_t>(g.int_in(10, 5'000));
    double z = g.coin(0.2) ? 0.0 : 0.5 + 1.5 * std::uniform_real_distribution<double>()(g.engine());
    return zipf_words(n, keys, z, g.u64());
}

struct JoinCase {
    std::vector<Value> left;
    std::vector<Value> right;
};

inline JoinCase random_join_case(std::uint64_t seed, std::size_t max_side = 500) {
    Gen g(seed);
    JoinCase c;
    auto nl = static_cast<std::size_t>(g.int_in(0, static_cast<std::int64_t>(max_side)));
    auto nr = static_cast<std::size_t>(g.int_in(0, static_cast<std::int64_t>(max_side)));
    auto keys = g.int_in(1, 60);
    for (std::size_t i = 0; i < nl; ++i) {
        c.left.push_back(Value::dict({{"k", g.int_in(0, keys)}, {"l", static_cast<std::int64_t>(i)}}));
    }
    for (std::size_t i = 0; i < nr; ++i) {
        c.right.push_back(Value::dict({{"k", g.int_in(0, keys)}, {"r", static_cast<std::int64_t>(i)}}));
    }
    return c;
}

inline JoinFns key_join_fns() {
    auto k = [](const Value& v) { return v.at("k"); };
    return JoinFns{k, k, merge_rows};
}

/// The join strategy configurations under test, by label.
inline std::vector<std::pair<std::string, StrategyPtr>> join_configurations() {
    return {
        {"jm 4x5", join_matrix_strategy(MatrixConfig{4, 5})},
        {"jm 1x1", join_matrix_strategy(MatrixConfig{1, 1})},
        {"jb", join_biclique_strategy(BicliqueConfig{10, 10, 1, 64})},
        {"jbcr g=5", join_biclique_contrand_strategy(BicliqueConfig{10, 10, 5, 64})},
        {"jbcr g=1", join_biclique_contrand_strategy(BicliqueConfig{10, 10, 1, 64})},
    };
}

/// Output multiset and duplicate freedom against the nested-loop oracle.
inline Outcome compare_join_output(const std::string& label, const std::vector<Value>& got,
                                   const std::multiset<Value>& expected) {
    Outcome out;
    std::multiset<Value> g(got.begin(), got.end());
    std::set<Value> distinct(got.begin(), got.end());
    if (distinct.size() != got.size()) {
        out.fail(label + ": " + std::to_string(got.size() - distinct.size()) + " duplicate results");
    }
    if (g != expected) {
        out.fail(label + ": " + std::to_string(got.size()) + " results, expected " + std::to_string(expected.size()));
    }
    return out;
}

inline Outcome check_join_case(const std::string& label, StrategyPtr strategy, const JoinCase& c, bool threaded,
                               std::uint64_t seed) {
    Collector sink;
    WorkflowBuilder b;
    b.add(ops::source().as("left"));
    b.add(ops::source().as("right"));
    b.add(NodeSpec{join_operation("join", key_join_fns()), std::move(strategy), Value(), "join"});
    b.add(ops::sink(sink.consumer()).as("sink"));
    b.link("left", "out", "join", "left");
    b.link("right", "out", "join", "right");
    b.link("join", "matched", "sink", "in");
    auto cfg = threaded ? threaded_cluster(4, 2, seed, true) : deterministic_cluster(4, seed);
    try {
        Application app(b.build(), cfg);
        app.feed_all({FeedSpec{"left", from_values(c.left), {}}, FeedSpec{"right", from_values(c.right), {}}});
        app.await_quiescence();
    } catch (const std::exception& e) {
        Outcome o;
        o.fail(label + ": " + e.what());
        return o;
    }
    auto fns = key_join_fns();
    return compare_join_output(label, sink.values(), nested_loop_join(c.left, c.right, fns.left_key, fns.right_key, fns.join));
}

/// Left-deep cascade oracle over the synthetic tables.
inline std::multiset<Value> cascade_oracle(Query q, const bench::SyntheticTables& t) {
    auto field = [](const char* f) { return [f](const Value& v) { return v.at(f); }; };
    auto step = [&](const std::vector<Value>& left, const std::vector<Value>& right, const char* f) {
        auto joined = nested_loop_join(left, right, field(f), field(f), merge_rows);
        return std::vector<Value>(joined.begin(), joined.end());
    };
    std::vector<Value> acc;
    if (q == Query::kQ5) {
        acc = step(step(t.region, t.nation, "regionkey"), t.supplier, "nationkey");
    } else {
        acc = step(t.nation, t.supplier, "nationkey");
    }
    acc = step(acc, t.lineitem, "suppkey");
    return {acc.begin(), acc.end()};
}

struct CascadeRun {
    std::vector<Value> results;
    MetricsSnapshot metrics;
};

inline CascadeRun run_cascade(Query q, StrategyPtr strategy, const bench::SyntheticTables& t, bool threaded,
                              std::uint64_t seed) {
    Collector sink;
    auto cfg = threaded ? threaded_cluster(4, 2, seed) : deterministic_cluster(4, seed);
    Application app(cascade_join_workflow(q, std::move(strategy), sink.consumer()), cfg);
    std::vector<FeedSpec> feeds;
    for (const auto& src : query_sources(q)) {
        feeds.push_back(FeedSpec{src, from_values(t.table(src)), {}});
    }
    app.feed_all(std::move(feeds));
    auto m = app.await_quiescence();
    return {sink.values(), std::move(m)};
}

struct StorageReport {
    Outcome outcome;
    std::vector<std::string> lines;
};

/**
 * Stored tuple counts on Q7: a 4x5 matrix keeps every left tuple in 5 cells
 * and every right tuple in 4; the biclique variants keep each tuple once,
 * left tuples on left joiners and right tuples on right joiners.
 */
inline StorageReport check_storage_factors(const bench::SyntheticTables& t, bool threaded, std::uint64_t seed) {
    StorageReport rep;
    auto& out = rep.outcome;
    // join1: nation x supplier; join2: (nation x supplier) x lineitem
    std::int64_t j1_rows = 0;
    for (const auto& s : t.supplier) {
        for (const auto& n : t.nation) {
            j1_rows += n.at("nationkey") == s.at("nationkey") ? 1 : 0;
        }
    }
    struct Side {
        std::string node;
        std::int64_t left;
        std::int64_t right;
    };
    std::vector<Side> sides{{"join1", static_cast<std::int64_t>(t.nation.size()), static_cast<std::int64_t>(t.supplier.size())},
                            {"join2", j1_rows, static_cast<std::int64_t>(t.lineitem.size())}};
    std::vector<std::pair<std::string, StrategyPtr>> configs{
        {"jm", join_matrix_strategy(MatrixConfig{4, 5})},
        {"jb", join_biclique_strategy(BicliqueConfig{10, 10, 1, 64})},
        {"jbcr", join_biclique_contrand_strategy(BicliqueConfig{10, 10, 5, 64})},
    };
    for (const auto& [name, strategy] : configs) {
        auto run = run_cascade(Query::kQ7, strategy, t, threaded, seed);
        for (const auto& s : sides) {
            auto total = run.metrics.stored(WorkerGroup{s.node, {}});
            std::int64_t expected = name == "jm" ? 5 * s.left + 4 * s.right : s.left + s.right;
            rep.lines.push_back(name + " " + s.node + ": stored " + std::to_string(total) + ", expected " +
                                std::to_string(expected));
            if (total != expected) {
                out.fail(name + " " + s.node + " stored " + std::to_string(total) + ", expected " +
                         std::to_string(expected));
            }
            if (name != "jm") {
                auto l = run.metrics.stored(WorkerGroup{s.node, {"joiner-left"}});
                auto r = run.metrics.stored(WorkerGroup{s.node, {"joiner-right"}});
                if (l != s.left || r != s.right) {
                    out.fail(name + " " + s.node + " per-side storage " + std::to_string(l) + "/" + std::to_string(r));
                }
            }
        }
    }
    return rep;
}

/// Swapping the count strategy changes exactly one node's strategy.
inline Outcome check_modularity() {
    Outcome out;
    std::vector<std::string> names{"kg", "sg", "pkg", "dc", "wc"};
    bench::WordcountSpec base;
    base.strategy = "kg";
    auto a = bench::wordcount_workflow(base);
    for (const auto& n : names) {
        auto spec = base;
        spec.strategy = n;
        auto b = bench::wordcount_workflow(spec);
        auto diff = structural_diff(a, b);
        if (n == "kg" ? !diff.empty() : diff.size() != 1) {
            out.fail(n + ": " + std::to_string(diff.size()) + " differences");
            continue;
        }
        if (!diff.empty() && diff[0].find("count") == std::string::npos) {
            out.fail(n + ": difference outside the count node: " + diff[0]);
        }
        if (a.nodes().size() != b.nodes().size() || a.links() != b.links()) {
            out.fail(n + ": topology changed");
        }
    }
    return out;
}

inline std::vector<std::byte> unhex(std::string_view hex) {
    std::vector<std::byte> out;
    for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
        out.push_back(static_cast<std::byte>(std::stoi(std::string(hex.substr(i, 2)), nullptr, 16)));
    }
    return out;
}

inline Outcome check_murmur_vectors() {
    Outcome out;
    auto run = [&](const MurmurVector& v) {
        auto bytes = unhex(v.hex);
        auto got = murmur3_x86_32(std::span<const std::byte>(bytes), v.seed);
        if (got != v.expected) {
            out.fail(std::string("hash of '") + v.hex + "' with seed " + std::to_string(v.seed) + " differs");
        }
    };
    std::for_each(std::begin(kMurmurKnown), std::end(kMurmurKnown), run);
    std::for_each(std::begin(kMurmurRandom), std::end(kMurmurRandom), run);
    return out;
}

struct ZipfReport {
    Outcome outcome;
    double worst_relative_error = 0;
};

/// Top-rank empirical frequencies against the analytic pmf.
inline ZipfReport check_zipf_fidelity(std::uint64_t seed, std::size_t samples = 1'000'000, std::size_t n = 10'000,
                                      double z = 1.4, std::size_t top = 10, double tolerance = 0.05) {
    ZipfReport rep;
    bench::ZipfSampler sampler(n, z, seed);
    std::vector<std::uint64_t> counts(top + 1, 0);
    for (std::size_t i = 0; i < samples; ++i) {
        auto r = sampler.next();
        if (r < 1 || r > n) {
            rep.outcome.fail("rank out of range");
            return rep;
        }
        if (r <= top) {
            ++counts[r];
        }
    }
    for (std::size_t r = 1; r <= top; ++r) {
        auto empirical = static_cast<double>(counts[r]) / static_cast<double>(samples);
        auto err = std::abs(empirical - sampler.pmf(r)) / sampler.pmf(r);
        rep.worst_relative_error = std::max(rep.worst_relative_error, err);
        if (err >= tolerance) {
            rep.outcome.fail("rank " + std::to_string(r) + " off by " + std::to_string(err * 100) + "%");
        }
    }
    return rep;
}

}// namespace dstream::testing

#endif// DSTREAM_TESTS_CHECKS_HPP_
