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
#include <dstream/join/join.hpp>

#include "checks.hpp"

#include <gtest/gtest.h>

using namespace dstream;
using namespace dstream::testing;

namespace {

/// Counts messages addressed to joiner workers.
class JoinerSends : public RuntimeObserver {
  public:
    void on_send(SenderId, const WorkerRef& to, const Message&) override {
        if (to.role == "joiner-left" || to.role == "joiner-right") {
            count.fetch_add(1);
        }
    }
    std::atomic<std::uint64_t> count{0};
};

std::uint64_t joinerMessages(StrategyPtr strategy, const JoinCase& c) {
    auto sends = std::make_shared<JoinerSends>();
    WorkflowBuilder b;
    b.add(ops::source().as("left"));
    b.add(ops::source().as("right"));
    b.add(NodeSpec{join_operation("join", key_join_fns()), std::move(strategy), Value(), "join"});
    b.link("left", "out", "join", "left");
    b.link("right", "out", "join", "right");
    auto cfg = deterministic_cluster(4, 1);
    cfg.observer = sends;
    Application app(b.build(), cfg);
    app.feed("left", c.left);
    app.feed("right", c.right);
    app.await_quiescence();
    return sends->count.load();
}

}// namespace

TEST(Join, MergeRows) {
    auto l = Value::dict({{"a", 1}, {"k", 2}});
    auto r = Value::dict({{"b", 3}, {"k", 4}});
    EXPECT_EQ(merge_rows(l, r), Value::dict({{"a", 1}, {"b", 3}, {"k", 4}}));
}

TEST(Join, MatrixParse) {
    auto m = MatrixConfig::parse("4x5");
    EXPECT_EQ(m.rows, 4u);
    EXPECT_EQ(m.cols, 5u);
    EXPECT_THROW(MatrixConfig::parse("4by5"), Error);
    EXPECT_THROW(MatrixConfig::parse("0x5"), Error);
}

TEST(Join, MatrixCellsRowMajor) {
    WorkflowBuilder b;
    b.add(ops::source().as("left"));
    b.add(ops::source().as("right"));
    b.add(NodeSpec{join_operation("join", key_join_fns()), join_matrix_strategy({4, 5}), Value(), "join"});
    b.link("left", "out", "join", "left");
    b.link("right", "out", "join", "right");
    Application app(b.build(), deterministic_cluster(3));
    const auto& cells = app.deployment("join");
    ASSERT_EQ(cells.size(), 20u);
    for (std::size_t i = 0; i < 20; ++i) {
        EXPECT_EQ(cells[i].as_worker().node, i % 3);
    }
}

TEST(Join, OracleEquivalence) {
    for (const auto& [label, strategy] : join_configurations()) {
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            auto c = random_join_case(seed, 150);
            for (bool threaded : {false, true}) {
                auto o = check_join_case(label, strategy, c, threaded, seed);
                EXPECT_TRUE(o.ok) << o.message << " (seed " << seed << ", threaded " << threaded << ")";
            }
        }
    }
}

TEST(Join, SingleSidedInputProducesNothing) {
    JoinCase c;
    for (int i = 0; i < 20; ++i) {
        c.left.push_back(Value::dict({{"k", i}}));
    }
    for (const auto& [label, strategy] : join_configurations()) {
        auto o = check_join_case(label, strategy, c, false, 1);
        EXPECT_TRUE(o.ok) << o.message;
    }
}

TEST(Join, MatrixRoundRobin) {
    auto c = random_join_case(77, 200);
    auto o = check_join_case("jm rr", join_matrix_strategy(MatrixConfig{3, 2, true}), c, true, 5);
    EXPECT_TRUE(o.ok) << o.message;
}

TEST(Join, SmallWatermarkInterval) {
    auto c = random_join_case(78, 200);
    for (std::size_t delta : {1u, 3u, 1000u}) {
        auto o = check_join_case("jb", join_biclique_strategy(BicliqueConfig{3, 4, 1, delta}), c, true, 6);
        EXPECT_TRUE(o.ok) << o.message << " delta " << delta;
    }
}

TEST(Join, ContRandProbeFanOut) {
    auto c = random_join_case(5, 300);
    auto n = c.left.size() + c.right.size();
    auto jb = joinerMessages(join_biclique_strategy(BicliqueConfig{10, 10, 1, 1'000'000}), c);
    auto jbcr = joinerMessages(join_biclique_contrand_strategy(BicliqueConfig{10, 10, 5, 1'000'000}), c);
    // one store plus 10 probes per record, against one store plus 2 probes
    EXPECT_EQ(jb - jbcr, n * 8);
}

TEST(Join, ContRandSubgroupsMustDivide) {
    EXPECT_THROW(join_biclique_contrand_strategy(BicliqueConfig{10, 10, 3, 64}), Error);
    EXPECT_THROW(join_biclique_contrand_strategy(BicliqueConfig{10, 10, 0, 64}), Error);
}

TEST(Join, ContRandSingleGroupEqualsBiclique) {
    auto c = random_join_case(9, 200);
    auto run = [&](StrategyPtr s) {
        auto sends = std::make_shared<JoinerSends>();
        Collector sink;
        WorkflowBuilder b;
        b.add(ops::source().as("left"));
        b.add(ops::source().as("right"));
        b.add(NodeSpec{join_operation("join", key_join_fns()), std::move(s), Value(), "join"});
        b.add(ops::sink(sink.consumer()).as("sink"));
        b.link("left", "out", "join", "left");
        b.link("right", "out", "join", "right");
        b.link("join", "matched", "sink", "in");
        auto cfg = deterministic_cluster(3, 8);
        cfg.observer = sends;
        Application app(b.build(), cfg);
        app.feed("left", c.left);
        app.feed("right", c.right);
        auto m = app.await_quiescence();
        return std::tuple{sink.values(), m.loads(WorkerGroup{"join", {}}), sends->count.load()};
    };
    EXPECT_EQ(run(join_biclique_strategy({10, 10, 1, 16})), run(join_biclique_contrand_strategy({10, 10, 1, 16})));
}

TEST(Join, Factory) {
    JoinOptions o;
    for (const char* n : {"jm", "jb", "jbcr"}) {
        EXPECT_EQ(make_join_strategy(n, o)->name, n);
    }
    try {
        make_join_strategy("hash", o);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kUnknownStrategy);
    }
}

TEST(Cascade, JoinCounts) {
    auto count = [](Query q) {
        auto wf = cascade_join_workflow(q, join_matrix_strategy({1, 1}));
        return std::count_if(wf.nodes().begin(), wf.nodes().end(),
                             [](const auto& n) { return n.first.starts_with("join"); });
    };
    EXPECT_EQ(count(Query::kQ5), 3);
    EXPECT_EQ(count(Query::kQ7), 2);
    EXPECT_EQ(query_sources(Query::kQ7), (std::vector<std::string>{"nation", "supplier", "lineitem"}));
    EXPECT_EQ(parse_query("q5"), Query::kQ5);
    try {
        parse_query("q9");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kInvalidQuery);
    }
}

TEST(Cascade, QueriesMatchOracle) {
    auto tables = bench::synthetic_tables(0.001, 4);
    for (Query q : {Query::kQ5, Query::kQ7}) {
        auto expected = cascade_oracle(q, tables);
        EXPECT_EQ(expected.size(), tables.lineitem.size());
        for (const auto& [label, strategy] : join_configurations()) {
            for (bool threaded : {false, true}) {
                auto run = run_cascade(q, strategy, tables, threaded, 3);
                auto o = compare_join_output(label, run.results, expected);
                EXPECT_TRUE(o.ok) << o.message << (q == Query::kQ5 ? " q5" : " q7");
            }
        }
    }
}

TEST(Cascade, StorageFactors) {
    auto rep = check_storage_factors(bench::synthetic_tables(0.001, 4), false, 2);
    EXPECT_TRUE(rep.outcome.ok) << rep.outcome.message;
}
