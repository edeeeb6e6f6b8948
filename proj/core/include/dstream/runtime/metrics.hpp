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
#ifndef DSTREAM_RUNTIME_METRICS_HPP_
#define DSTREAM_RUNTIME_METRICS_HPP_

#include <dstream/core/error.hpp>
#include <dstream/core/value.hpp>

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace dstream {

using Clock = std::chrono::steady_clock;

struct WorkerMetrics {
    WorkerRef ref;
    std::string node;  ///< workflow node the worker belongs to
    std::uint64_t processed = 0;
    std::int64_t stored = 0;
};

struct NodeMetrics {
    std::uint64_t remote_sends = 0;
    std::uint64_t local_sends = 0;
};

/// Selects workers of one workflow node (empty: all nodes), optionally by role.
struct WorkerGroup {
    std::string node;
    std::set<Role> roles;

    bool contains(const WorkerMetrics& w) const;
};

struct MetricsSnapshot {
    std::vector<WorkerMetrics> workers;
    std::vector<NodeMetrics> nodes;  ///< indexed by logical node
    std::uint64_t records_injected = 0;
    std::uint64_t total_sink_records = 0;
    std::optional<Clock::time_point> first_record_time;
    std::optional<Clock::time_point> last_record_time;

    std::uint64_t remote_sends() const;
    std::uint64_t local_sends() const;
    std::uint64_t processed(const WorkerGroup& group = {}) const;
    std::int64_t stored(const WorkerGroup& group = {}) const;
    std::vector<std::uint64_t> loads(const WorkerGroup& group) const;

    /// Flat key/value export, e.g. "worker.12.processed", "node.0.remote_sends".
    std::map<std::string, double> flat() const;
};

/// records / elapsed, in records per second. Throws ZeroRecords or ZeroElapsed.
double compute_throughput(std::uint64_t records, std::chrono::nanoseconds elapsed);
/// total_sink_records over (last_record_time - first_record_time).
double compute_throughput(const MetricsSnapshot& m);

/// max / mean of the loads. Throws ZeroRecords when empty or all zero.
double imbalance(std::span<const std::uint64_t> loads);
double imbalance(const MetricsSnapshot& m, const WorkerGroup& group);

}// namespace dstream

#endif// DSTREAM_RUNTIME_METRICS_HPP_
