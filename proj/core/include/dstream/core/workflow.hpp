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
#ifndef DSTREAM_CORE_WORKFLOW_HPP_
#define DSTREAM_CORE_WORKFLOW_HPP_

#include <dstream/core/operation.hpp>
#include <dstream/core/strategy.hpp>
#include <dstream/core/value.hpp>

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dstream {

struct Link {
    std::string src;
    std::string out_port;
    std::string dst;
    std::string in_port;

    friend bool operator==(const Link&, const Link&) = default;
    friend auto operator<=>(const Link&, const Link&) = default;
};

std::string to_string(const Link& link);

struct WorkflowNode {
    std::string id;
    OperationPtr operation;
    StrategyPtr strategy;
    Value args;
};

/// DAG of operation instances joined by port-to-port links.
class Workflow {
  public:
    Workflow() = default;
    /// Stores the nodes and links as given, without checks (see validate_workflow).
    Workflow(std::vector<WorkflowNode> nodes, std::vector<Link> links);

    const std::map<std::string, WorkflowNode>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }
    const WorkflowNode* find(std::string_view id) const;
    const WorkflowNode& node(std::string_view id) const;

    /// Nodes whose operation has no in-ports.
    std::vector<std::string> sources() const;
    /// Kahn order; empty optional if the link graph has a cycle.
    std::optional<std::vector<std::string>> topological_order() const;
    std::vector<Link> links_from(std::string_view src, std::string_view out_port) const;

    /// Copy with the strategy of `id` replaced.
    Workflow with_strategy(std::string_view id, StrategyPtr strategy) const;

  private:
    std::map<std::string, WorkflowNode> nodes_;
    std::vector<Link> links_;
};

/**
 * Differences between two workflows, one line each. Operations compare by
 * shape, strategies by name and configuration, args by value.
 */
std::vector<std::string> structural_diff(const Workflow& a, const Workflow& b);

/// A node to add to a workflow. The strategy falls back to the operation's default.
struct NodeSpec {
    OperationPtr operation;
    StrategyPtr strategy;
    Value args;
    std::string alias;

    NodeSpec& with(StrategyPtr s) {
        strategy = std::move(s);
        return *this;
    }
    NodeSpec& as(std::string id) {
        alias = std::move(id);
        return *this;
    }
    NodeSpec& with_args(Value a) {
        args = std::move(a);
        return *this;
    }
};

/**
 * Incremental workflow construction.
 *
 *     WorkflowBuilder b;
 *     b.add(source_spec.as("sales"));
 *     b.add(join_spec.as("join"));
 *     b.link("clicks", "out", "join", "right");
 *     b.chain({"sales", "join", "rate", "publish"});
 *     Workflow w = b.build();
 *
 * Chaining links out-port index 0 of each node to in-port index 0 of the next.
 * Structural errors (duplicate ids, unknown nodes or ports, chaining from a
 * node without outputs) throw from the call that introduces them.
 */
class WorkflowBuilder {
  public:
    /// Adds a node and returns its id (alias or a generated "<operation>#<n>").
    std::string add(NodeSpec spec);
    WorkflowBuilder& link(std::string src, std::string out_port, std::string dst, std::string in_port);
    WorkflowBuilder& chain(const std::vector<std::string>& ids);
    /// Adds every spec and chains them in order (operator style). Returns the ids.
    std::vector<std::string> pipe(std::vector<NodeSpec> specs);

    Workflow build() const;

  private:
    const WorkflowNode& existing(const std::string& id) const;

    std::vector<WorkflowNode> nodes_;
    std::vector<Link> links_;
    std::size_t generated_ = 0;
};

// --- validation --------------------------------------------------------------

struct CycleDetected {
    std::vector<std::string> nodes;
    friend bool operator==(const CycleDetected&, const CycleDetected&) = default;
};
struct UnknownPort {
    Link link;
    friend bool operator==(const UnknownPort&, const UnknownPort&) = default;
};
struct MissingCallback {
    std::string node;
    std::string callback;
    friend bool operator==(const MissingCallback&, const MissingCallback&) = default;
};

using Violation = std::variant<CycleDetected, UnknownPort, MissingCallback>;

std::string to_string(const Violation& v);

/// Every violation of the workflow, not just the first. Empty means valid.
std::vector<Violation> validate_workflow(const Workflow& workflow);

class ValidationError : public Error {
  public:
    explicit ValidationError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

  private:
    std::vector<Violation> violations_;
};

/// Throws ValidationError unless the workflow is valid.
const Workflow& require_valid(const Workflow& workflow);

}// namespace dstream

#endif// DSTREAM_CORE_WORKFLOW_HPP_
