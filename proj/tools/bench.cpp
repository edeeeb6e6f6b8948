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

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

using namespace dstream;

namespace {

struct Common {
    std::uint64_t seed = 0;
    std::size_t runs = 1;
    std::string out = "-";
    std::size_t nodes = 4;
    std::size_t threads = 4;
    bool deterministic = false;
};

void addCommon(CLI::App& cmd, Common& c) {
    cmd.add_option("--seed", c.seed, "Base seed")->capture_default_str();
    cmd.add_option("--runs", c.runs, "Repetitions with derived seeds")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--out", c.out, "CSV output file, - for standard output")->capture_default_str();
    cmd.add_option("--nodes", c.nodes, "Logical cluster nodes")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--threads", c.threads, "Executor threads per node")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_flag("--deterministic", c.deterministic, "Single-threaded reproducible executor");
}

bench::ClusterShape shapeOf(const Common& c) {
    bench::ClusterShape s;
    s.nodes = c.nodes;
    s.threads_per_node = c.threads;
    s.executor = c.deterministic ? ExecutorMode::kDeterministic : ExecutorMode::kThreaded;
    return s;
}

}// namespace

int main(int argc, char** argv) {
    CLI::App app{"Runs WordCount and join-cascade benchmarks and writes CSV rows."};
    app.require_subcommand(1);

    Common wc_common;
    bench::WordcountBench wc;
    std::int64_t work_us = 100;
    auto* wc_cmd = app.add_subcommand("wordcount", "WordCount over Zipf-distributed words");
    wc_cmd->add_option("--strategy", wc.strategy, "Distribution strategy")
        ->check(CLI::IsMember({"kg", "sg", "pkg", "dc", "wc"}))
        ->capture_default_str();
    wc_cmd->add_option("--z", wc.z, "Zipf exponent (0 = uniform)")->capture_default_str();
    wc_cmd->add_option("--workers", wc.workers, "Count workers")->capture_default_str();
    wc_cmd->add_option("--records", wc.records, "Input records")->capture_default_str();
    wc_cmd->add_option("--vocabulary", wc.vocabulary, "Distinct words")->capture_default_str();
    wc_cmd->add_flag("--merge", wc.merge, "Merge split partial counts at the end");
    wc_cmd->add_option("--work-us", work_us, "Simulated work per message in microseconds")->capture_default_str();
    addCommon(*wc_cmd, wc_common);

    Common join_common;
    bench::JoinBench jb;
    std::string matrix = "4x5";
    std::map<std::string, double> rates;
    double rate_lineitems = 0, rate_suppliers = 0, rate_nations = 0, rate_regions = 0;
    auto* join_cmd = app.add_subcommand("join", "Q5/Q7-style join cascades over synthetic tables");
    join_cmd->add_option("--query", jb.query, "Query")->check(CLI::IsMember({"q5", "q7"}))->capture_default_str();
    join_cmd->add_option("--strategy", jb.strategy, "Join strategy")
        ->check(CLI::IsMember({"jm", "jb", "jbcr"}))
        ->capture_default_str();
    join_cmd->add_option("--matrix", matrix, "Join-Matrix shape RxC")->capture_default_str();
    join_cmd->add_option("--subgroups", jb.options.subgroups, "ContRand subgroups")->capture_default_str();
    join_cmd->add_option("--left-workers", jb.options.left_workers, "Biclique left joiners")->capture_default_str();
    join_cmd->add_option("--right-workers", jb.options.right_workers, "Biclique right joiners")->capture_default_str();
    join_cmd->add_option("--watermark-interval", jb.options.watermark_interval, "Records between clock broadcasts")
        ->capture_default_str();
    join_cmd->add_option("--scale", jb.scale, "Table scale factor")->capture_default_str();
    join_cmd->add_option("--rate-lineitems", rate_lineitems, "Line items per second (0 = unthrottled)");
    join_cmd->add_option("--rate-suppliers", rate_suppliers, "Suppliers per second (0 = unthrottled)");
    join_cmd->add_option("--rate-nations", rate_nations, "Nations per second (0 = unthrottled)");
    join_cmd->add_option("--rate-regions", rate_regions, "Regions per second (0 = unthrottled)");
    addCommon(*join_cmd, join_common);

    CLI11_PARSE(app, argc, argv);

    try {
        const Common& common = wc_cmd->parsed() ? wc_common : join_common;
        std::ofstream file;
        std::ostream* out = &std::cout;
        if (common.out != "-") {
            file.open(common.out);
            if (!file) {
                std::cerr << "cannot open " << common.out << "\n";
                return 1;
            }
            out = &file;
        }
        bench::write_csv_header(*out);
        for (std::size_t i = 0; i < common.runs; ++i) {
            bench::BenchResult r;
            if (wc_cmd->parsed()) {
                wc.seed = bench::run_seed(common.seed, i);
                wc.work = std::chrono::microseconds(work_us);
                wc.cluster = shapeOf(common);
                r = bench::run_wordcount(wc);
            } else {
                jb.options.matrix = MatrixConfig::parse(matrix);
                for (auto [name, rate] : {std::pair{"lineitem", rate_lineitems}, std::pair{"supplier", rate_suppliers},
                                          std::pair{"nation", rate_nations}, std::pair{"region", rate_regions}}) {
                    if (rate > 0) {
                        jb.rates[name] = rate;
                    }
                }
                jb.seed = bench::run_seed(common.seed, i);
                jb.cluster = shapeOf(common);
                r = bench::run_join(jb);
            }
            bench::write_csv_row(*out, r);
            out->flush();
        }
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
