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
#ifndef DSTREAM_RUNTIME_CLUSTER_HPP_
#define DSTREAM_RUNTIME_CLUSTER_HPP_

#include <dstream/core/record.hpp>
#include <dstream/core/strategy.hpp>
#include <dstream/core/value.hpp>

#include <chrono>
#include <cstdint>
#include <memory>
#include <string_view>

namespace dstream {

enum class ExecutorMode {
    /// One thread, one message per scheduling turn, fixed order. Reproducible.
    kDeterministic,
    /// executor_threads_per_node threads per logical node.
    kThreaded,
};

/// How simulated per-message work occupies an executor thread.
enum class WorkMode {
    /// Spin when every executor thread can own a hardware thread, block otherwise.
    kAuto,
    kSpin,
    kBlock,
};

/// Hooks for instrumentation. Called from executor threads; must be thread-safe.
class RuntimeObserver {
  public:
    virtual ~RuntimeObserver() = default;
    virtual void on_send(SenderId /*from*/, const WorkerRef& /*to*/, const Message& /*msg*/) {}
    virtual void on_process_begin(const WorkerRef& /*worker*/, const Message& /*msg*/) {}
    virtual void on_process_end(const WorkerRef& /*worker*/) {}
    virtual void on_deliver(std::string_view /*node*/, const DataRecord& /*record*/, NodeIndex /*at*/) {}
};

struct ClusterConfig {
    std::size_t node_count = 1;
    std::size_t executor_threads_per_node = 1;
    std::uint64_t seed = 0;
    /// Applied inside operation callbacks marked as work callbacks.
    std::chrono::nanoseconds simulated_work{0};
    ExecutorMode executor = ExecutorMode::kDeterministic;
    WorkMode work_mode = WorkMode::kAuto;
    /// Randomly yields and pauses executor threads between messages (threaded mode only).
    bool schedule_jitter = false;
    std::shared_ptr<RuntimeObserver> observer;

    /// Throws InvalidConfig.
    void validate() const;
};

/// SplitMix64 finaliser, the basis of every derived seed.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose, std::uint64_t salt = 0);

}// namespace dstream

#endif// DSTREAM_RUNTIME_CLUSTER_HPP_
