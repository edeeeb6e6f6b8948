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
#include <dstream/runtime/metrics.hpp>

#include <algorithm>
#include <numeric>

namespace dstream {

bool WorkerGroup::contains(const WorkerMetrics& w) const {
    return (node.empty() || w.node == node) && (roles.empty() || roles.contains(w.ref.role));
}

std::uint64_t MetricsSnapshot::remote_sends() const {
    std::uint64_t n = 0;
    for (const auto& m : nodes) {
        n += m.remote_sends;
    }
    return n;
}

std::uint64_t MetricsSnapshot::local_sends() const {
    std::uint64_t n = 0;
    for (const auto& m : nodes) {
        n += m.local_sends;
    }
    return n;
}

std::uint64_t MetricsSnapshot::processed(const WorkerGroup& group) const {
    std::uint64_t n = 0;
    for (const auto& w : workers) {
        if (group.contains(w)) {
            n += w.processed;
        }
    }
    return n;
}

std::int64_t MetricsSnapshot::stored(const WorkerGroup& group) const {
    std::int64_t n = 0;
    for (const auto& w : workers) {
        if (group.contains(w)) {
            n += w.stored;
        }
    }
    return n;
}

std::vector<std::uint64_t> MetricsSnapshot::loads(const WorkerGroup& group) const {
    std::vector<std::uint64_t> out;
    for (const auto& w : workers) {
        if (group.contains(w)) {
            out.push_back(w.processed);
        }
    }
    return out;
}

std::map<std::string, double> MetricsSnapshot::flat() const {
    std::map<std::string, double> out;
    for (const auto& w : workers) {
        auto prefix = "worker." + std::to_string(w.ref.id) + ".";
        out[prefix + "processed"] = static_cast<double>(w.processed);
        out[prefix + "stored"] = static_cast<double>(w.stored);
        out[prefix + "node"] = static_cast<double>(w.ref.node);
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto prefix = "node." + std::to_string(i) + ".";
        out[prefix + "remote_sends"] = static_cast<double>(nodes[i].remote_sends);
        out[prefix + "local_sends"] = static_cast<double>(nodes[i].local_sends);
    }
    out["records_injected"] = static_cast<double>(records_injected);
    out["total_sink_records"] = static_cast<double>(total_sink_records);
    return out;
}

double compute_throughput(std::uint64_t records, std::chrono::nanoseconds elapsed) {
    if (records == 0) {
        throw Error(ErrorCode::kZeroRecords, "throughput of zero records is undefined");
    }
    if (elapsed.count() <= 0) {
        throw Error(ErrorCode::kZeroElapsed, "throughput over a non-positive interval is undefined");
    }
    return static_cast<double>(records) / std::chrono::duration<double>(elapsed).count();
}

double compute_throughput(const MetricsSnapshot& m) {
    if (m.total_sink_records == 0 || !m.first_record_time || !m.last_record_time) {
        throw Error(ErrorCode::kZeroRecords, "no records reached a sink");
    }
    return compute_throughput(m.total_sink_records, *m.last_record_time - *m.first_record_time);
}

double imbalance(std::span<const std::uint64_t> loads) {
    if (loads.empty()) {
        throw Error(ErrorCode::kZeroRecords, "imbalance of an empty group");
    }
    auto total = std::accumulate(loads.begin(), loads.end(), 0.0,
                                 [](double acc, std::uint64_t v) { return acc + static_cast<double>(v); });
    if (total == 0) {
        throw Error(ErrorCode::kZeroRecords, "imbalance of an idle group");
    }
    auto mean = total / static_cast<double>(loads.size());
    return static_cast<double>(*std::max_element(loads.begin(), loads.end())) / mean;
}

double imbalance(const MetricsSnapshot& m, const WorkerGroup& group) {
    auto l = m.loads(group);
    return imbalance(l);
}

}// namespace dstream
