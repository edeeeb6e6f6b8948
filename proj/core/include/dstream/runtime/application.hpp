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
#ifndef DSTREAM_RUNTIME_APPLICATION_HPP_
#define DSTREAM_RUNTIME_APPLICATION_HPP_

#include <dstream/core/workflow.hpp>
#include <dstream/runtime/cluster.hpp>
#include <dstream/runtime/metrics.hpp>

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dstream {

/// Pulls the next payload; nullopt ends the stream.
using PayloadGenerator = std::function<std::optional<Value>()>;

PayloadGenerator from_values(std::vector<Value> values);

struct FeedSpec {
    std::string source;
    PayloadGenerator next;
    /// Records per second; nullopt feeds as fast as possible.
    std::optional<double> rate;
};

class TimeoutError : public Error {
  public:
    explicit TimeoutError(MetricsSnapshot partial);
    const MetricsSnapshot& partial() const { return partial_; }

  private:
    MetricsSnapshot partial_;
};

/**
 * A deployed workflow running on a simulated cluster.
 *
 * Logical nodes are scheduling domains inside this process. Each worker
 * owns a FIFO mailbox and is never active on two threads at once; sends
 * that cross logical nodes are counted as remote. Deploy hooks run once per
 * workflow node in reverse topological order (sinks first).
 */
class Application {
  public:
    /// Validates and deploys. Throws ValidationError or DeployHookFailed.
    Application(const Workflow& workflow, ClusterConfig config);
    ~Application();

    Application(const Application&) = delete;
    Application& operator=(const Application&) = delete;

    /**
     * Injects payloads into a source node through its strategy's deliver
     * hook, spreading injections round-robin over the logical nodes. With a
     * rate the injection is paced against the start time.
     */
    void feed(std::string_view source, PayloadGenerator next, std::optional<double> rate = std::nullopt);
    void feed(std::string_view source, std::vector<Value> payloads, std::optional<double> rate = std::nullopt);
    /// Feeds several sources concurrently, each at its own rate.
    void feed_all(std::vector<FeedSpec> feeds);

    /**
     * Waits until every mailbox is empty and no hook runs, then runs the
     * drain hooks in topological order. Rethrows the first hook failure.
     * Throws TimeoutError with partial metrics when the deadline passes.
     */
    MetricsSnapshot await_quiescence(std::chrono::milliseconds timeout = std::chrono::minutes(10));

    MetricsSnapshot metrics() const;
    const Value& deployment(std::string_view node) const;
    /// Digest over every node's deployment data.
    std::uint64_t deployment_digest() const;
    const ClusterConfig& config() const;

    struct Impl;

  private:
    std::unique_ptr<Impl> impl_;
};

inline std::unique_ptr<Application> deploy_application(const Workflow& workflow, ClusterConfig config) {
    return std::make_unique<Application>(workflow, std::move(config));
}

}// namespace dstream

#endif// DSTREAM_RUNTIME_APPLICATION_HPP_
