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
#include <dstream/bench/tables.hpp>
#include <dstream/core/error.hpp>
#include <dstream/runtime/cluster.hpp>

#include <cmath>
#include <random>

namespace dstream::bench {

const std::vector<Value>& SyntheticTables::table(const std::string& name) const {
    if (name == "region") {
        return region;
    }
    if (name == "nation") {
        return nation;
    }
    if (name == "supplier") {
        return supplier;
    }
    if (name == "lineitem") {
        return lineitem;
    }
    throw Error(ErrorCode::kInvalidQuery, "unknown table '" + name + "'");
}

TableCardinalities table_cardinalities(double scale) {
    if (!(scale > 0) || !std::isfinite(scale)) {
        throw Error(ErrorCode::kInvalidConfig, "scale must be positive");
    }
    auto rows = [scale](double per_unit) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(per_unit * scale)));
    };
    return TableCardinalities{5, 25, rows(10'000), rows(6'000'000)};
}

SyntheticTables synthetic_tables(double scale, std::uint64_t seed) {
    auto card = table_cardinalities(scale);
    std::mt19937_64 rng(derive_seed(seed, "tables"));
    auto pick = [&rng](std::size_t n) { return static_cast<std::int64_t>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)); };

    SyntheticTables t;
    for (std::size_t i = 0; i < card.region; ++i) {
        t.region.push_back(Value::dict({{"regionkey", kRegionKeyBase + static_cast<std::int64_t>(i)}}));
    }
    for (std::size_t i = 0; i < card.nation; ++i) {
        t.nation.push_back(Value::dict({{"nationkey", kNationKeyBase + static_cast<std::int64_t>(i)},
                                        {"regionkey", kRegionKeyBase + pick(card.region)}}));
    }
    for (std::size_t i = 0; i < card.supplier; ++i) {
        t.supplier.push_back(Value::dict({{"suppkey", kSupplierKeyBase + static_cast<std::int64_t>(i)},
                                          {"nationkey", kNationKeyBase + pick(card.nation)}}));
    }
    for (std::size_t i = 0; i < card.lineitem; ++i) {
        t.lineitem.push_back(Value::dict({{"orderkey", kOrderKeyBase + static_cast<std::int64_t>(i)},
                                          {"suppkey", kSupplierKeyBase + pick(card.supplier)}}));
    }
    return t;
}

}// namespace dstream::bench
