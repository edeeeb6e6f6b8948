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
#ifndef DSTREAM_BENCH_TABLES_HPP_
#define DSTREAM_BENCH_TABLES_HPP_

#include <dstream/core/value.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dstream::bench {

/// Key offsets keeping every table's key domain disjoint.
inline constexpr std::int64_t kRegionKeyBase = 0;
inline constexpr std::int64_t kNationKeyBase = 1'000;
inline constexpr std::int64_t kSupplierKeyBase = 1'000'000;
inline constexpr std::int64_t kOrderKeyBase = 1'000'000'000;

/**
 * TPC-H shaped rows as dicts: region{regionkey}, nation{nationkey,
 * regionkey}, supplier{suppkey, nationkey}, lineitem{orderkey, suppkey}.
 * Foreign keys are drawn uniformly from the parent table.
 */
struct SyntheticTables {
    std::vector<Value> region;
    std::vector<Value> nation;
    std::vector<Value> supplier;
    std::vector<Value> lineitem;

    const std::vector<Value>& table(const std::string& name) const;
};

struct TableCardinalities {
    std::size_t region;
    std::size_t nation;
    std::size_t supplier;
    std::size_t lineitem;
};

/// 5 regions, 25 nations, 10000 * scale suppliers, 6000000 * scale line items (at least one each).
TableCardinalities table_cardinalities(double scale);

/// Throws InvalidConfig unless scale > 0.
SyntheticTables synthetic_tables(double scale, std::uint64_t seed);

}// namespace dstream::bench

#endif// DSTREAM_BENCH_TABLES_HPP_
