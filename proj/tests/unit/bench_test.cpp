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

#include "checks.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace dstream;
using namespace dstream::bench;
using namespace dstream::testing;

TEST(Zipf, TwoRanksLinearSkew) {
    ZipfSampler s(2, 1.0, 0);
    EXPECT_NEAR(s.pmf(1), 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(s.pmf(2), 1.0 / 3.0, 1e-12);
}

TEST(Zipf, TopRankProbabilities) {
    EXPECT_NEAR(ZipfSampler(10'000, 2.0, 0).pmf(1), 0.6079640597889888, 1e-9);
    EXPECT_NEAR(ZipfSampler(10'000, 1.4, 0).pmf(1), 0.3286, 1e-4);
}

TEST(Zipf, UniformAtZeroSkew) {
    ZipfSampler s(4, 0.0, 0);
    for (std::size_t r = 1; r <= 4; ++r) {
        EXPECT_DOUBLE_EQ(s.pmf(r), 0.25);
    }
}

TEST(Zipf, Invalid) {
    EXPECT_THROW(ZipfSampler(0, 1.0, 0), Error);
    EXPECT_THROW(ZipfSampler(10, -1.0, 0), Error);
    EXPECT_THROW(ZipfSampler(10, std::nan(""), 0), Error);
}

TEST(Zipf, Fidelity) {
    auto rep = check_zipf_fidelity(3, 200'000, 10'000, 1.4, 5, 0.05);
    EXPECT_TRUE(rep.outcome.ok) << rep.outcome.message;
}

TEST(Zipf, GeneratedWordsAreDeterministic) {
    ZipfConfig c{100, 1.2, 50, 9};
    auto a = zipf_generate(c);
    EXPECT_EQ(a, zipf_generate(c));
    EXPECT_EQ(a.size(), 50u);
    EXPECT_EQ(zipf_word(1), "word1");
}

TEST(Tables, Cardinalities) {
    auto one = table_cardinalities(1.0);
    EXPECT_EQ(one.region, 5u);
    EXPECT_EQ(one.nation, 25u);
    auto t = synthetic_tables(0.01, 1);
    EXPECT_EQ(t.region.size(), 5u);
    EXPECT_EQ(t.nation.size(), 25u);
    EXPECT_EQ(t.supplier.size(), 100u);
    EXPECT_EQ(t.lineitem.size(), 60'000u);
    EXPECT_THROW(synthetic_tables(0, 1), Error);
}

TEST(Tables, ForeignKeysValid) {
    auto t = synthetic_tables(0.005, 2);
    auto keys = [](const std::vector<Value>& rows, const char* f) {
        std::set<Value> out;
        for (const auto& r : rows) {
            out.insert(r.at(f));
        }
        return out;
    };
    auto regions = keys(t.region, "regionkey");
    auto nations = keys(t.nation, "nationkey");
    auto suppliers = keys(t.supplier, "suppkey");
    EXPECT_EQ(nations.size(), 25u);
    for (const auto& n : t.nation) {
        EXPECT_TRUE(regions.contains(n.at("regionkey")));
    }
    for (const auto& s : t.supplier) {
        EXPECT_TRUE(nations.contains(s.at("nationkey")));
    }
    for (const auto& l : t.lineitem) {
        EXPECT_TRUE(suppliers.contains(l.at("suppkey")));
    }
    auto again = synthetic_tables(0.005, 2);
    EXPECT_EQ(again.lineitem, t.lineitem);
}

TEST(Wordcount, KeyGroupingExample) {
    Collector sink;
    WordcountSpec spec;
    spec.worker_count = 4;
    spec.consumer = sink.consumer();
    Application app(wordcount_workflow(spec), deterministic_cluster(2));
    app.feed("source", {Value("a"), Value("b"), Value("a")});
    app.await_quiescence();
    EXPECT_EQ(sink.multiset(),
              (std::multiset<Value>{Value::list({"a", 1}), Value::list({"b", 1}), Value::list({"a", 2})}));
}

TEST(Wordcount, ConservationUnderMerge) {
    auto words = zipf_words(5'000, 500, 1.7, 12);
    for (const char* s : {"kg", "sg", "pkg", "dc", "wc"}) {
        Collector sink;
        WordcountSpec spec;
        spec.strategy = s;
        spec.worker_count = 16;
        spec.merge_enabled = true;
        spec.consumer = sink.consumer();
        Application app(wordcount_workflow(spec), threaded_cluster(2, 2, 4));
        app.feed("source", words);
        app.await_quiescence();
        std::int64_t total = 0;
        for (const auto& v : final_counts(sink.values())) {
            total += v[1].as_int();
        }
        EXPECT_EQ(total, 5'000) << s;
    }
}

TEST(Wordcount, UnknownStrategy) {
    WordcountSpec spec;
    spec.strategy = "zz";
    EXPECT_THROW(wordcount_workflow(spec), Error);
}

TEST(Wordcount, Modularity) {
    auto o = check_modularity();
    EXPECT_TRUE(o.ok) << o.message;
}

TEST(Bench, ZeroRecords) {
    WordcountBench b;
    b.records = 0;
    try {
        run_wordcount(b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kZeroRecords);
    }
}

TEST(Bench, WordcountRowIsReproducible) {
    WordcountBench b;
    b.strategy = "pkg";
    b.records = 2'000;
    b.workers = 16;
    b.work = std::chrono::nanoseconds(0);
    b.seed = 7;
    b.cluster.executor = ExecutorMode::kDeterministic;
    auto x = run_wordcount(b);
    auto y = run_wordcount(b);
    EXPECT_EQ(x.imbalance, y.imbalance);
    EXPECT_EQ(x.remote_msgs, y.remote_msgs);
    EXPECT_EQ(x.records, 2'000u);
    EXPECT_GT(x.throughput_rps, 0);
}

TEST(Bench, JoinStoredTuplesMatrix) {
    JoinBench b;
    b.strategy = "jm";
    b.scale = 0.001;
    b.cluster.executor = ExecutorMode::kDeterministic;
    auto r = run_join(b);
    auto t = synthetic_tables(0.001, b.seed);
    // final join: 100 (nation x supplier) rows on the left, all line items on the right
    EXPECT_EQ(r.stored_tuples, static_cast<std::int64_t>(5 * t.supplier.size() + 4 * t.lineitem.size()));
    EXPECT_EQ(join_workers("jm", b.options), 20u);
    EXPECT_EQ(join_workers("jb", b.options), 20u);
}

TEST(Bench, RunSeeds) {
    EXPECT_EQ(run_seed(5, 0), 5u);
    EXPECT_NE(run_seed(5, 1), run_seed(5, 2));
}

TEST(Csv, HeaderAndQuoting) {
    std::ostringstream out;
    write_csv_header(out);
    EXPECT_EQ(out.str(),
              "benchmark,strategy,parameter,workers,records,throughput_rps,imbalance,remote_msgs,stored_tuples,"
              "elapsed_ms,seed\r\n");
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_field("line\nbreak"), "\"line\nbreak\"");
}

TEST(Csv, Row) {
    BenchResult r{"wordcount", "kg", "2.0", 80, 100, 12.5, 1.5, 3, 0, 8.0, 7};
    std::ostringstream out;
    write_csv_row(out, r);
    EXPECT_EQ(out.str().substr(0, 22), "wordcount,kg,2.0,80,10");
    EXPECT_TRUE(out.str().ends_with(",7\r\n"));
}
