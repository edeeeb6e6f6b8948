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
#include <dstream/core/workflow.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

namespace dstream {

std::string to_string(const Link& link) {
    return link.src + "." + link.out_port + " ~> " + link.dst + "." + link.in_port;
}

Workflow::Workflow(std::vector<WorkflowNode> nodes, std::vector<Link> links) : links_(std::move(links)) {
    for (auto& n : nodes) {
        auto id = n.id;
        nodes_.insert_or_assign(std::move(id), std::move(n));
    }
    std::sort(links_.begin(), links_.end());
    links_.erase(std::unique(links_.begin(), links_.end()), links_.end());
}

const WorkflowNode* Workflow::find(std::string_view id) const {
    auto it = nodes_.find(std::string(id));
    return it == nodes_.end() ? nullptr : &it->second;
}

const WorkflowNode& Workflow::node(std::string_view id) const {
    const auto* n = find(id);
    if (n == nullptr) {
        throw Error(ErrorCode::kUnknownNode, "unknown workflow node '" + std::string(id) + "'");
    }
    return *n;
}

std::vector<std::string> Workflow::sources() const {
    std::vector<std::string> out;
    for (const auto& [id, n] : nodes_) {
        if (n.operation && n.operation->in_ports().empty()) {
            out.push_back(id);
        }
    }
    return out;
}

std::optional<std::vector<std::string>> Workflow::topological_order() const {
    std::map<std::string, std::size_t> indegree;
    std::map<std::string, std::set<std::string>> succ;
    for (const auto& [id, n] : nodes_) {
        indegree[id] = 0;
    }
    for (const auto& l : links_) {
        if (!nodes_.contains(l.src) || !nodes_.contains(l.dst)) {
            continue;
        }
        if (succ[l.src].insert(l.dst).second) {
            ++indegree[l.dst];
        }
    }
    std::deque<std::string> ready;
    for (const auto& [id, d] : indegree) {
        if (d == 0) {
            ready.push_back(id);
        }
    }
    std::vector<std::string> order;
    while (!ready.empty()) {
        auto id = ready.front();
        ready.pop_front();
        order.push_back(id);
        for (const auto& s : succ[id]) {
            if (--indegree[s] == 0) {
                ready.push_back(s);
            }
        }
    }
    if (order.size() != nodes_.size()) {
        return std::nullopt;
    }
    return order;
}

std::vector<Link> Workflow::links_from(std::string_view src, std::string_view out_port) const {
    std::vector<Link> out;
    for (const auto& l : links_) {
        if (l.src == src && l.out_port == out_port) {
            out.push_back(l);
        }
    }
    return out;
}

Workflow Workflow::with_strategy(std::string_view id, StrategyPtr strategy) const {
    Workflow copy = *this;
    auto it = copy.nodes_.find(std::string(id));
    if (it == copy.nodes_.end()) {
        throw Error(ErrorCode::kUnknownNode, "unknown workflow node '" + std::string(id) + "'");
    }
    it->second.strategy = std::move(strategy);
    return copy;
}

bool same_strategy(const StrategyDef& a, const StrategyDef& b) {
    return a.name == b.name && a.config == b.config;
}

std::vector<std::string> structural_diff(const Workflow& a, const Workflow& b) {
    std::vector<std::string> diff;
    for (const auto& [id, na] : a.nodes()) {
        const auto* nb = b.find(id);
        if (nb == nullptr) {
            diff.push_back("node " + id + ": only in first");
            continue;
        }
        if ((na.operation == nullptr) != (nb->operation == nullptr) ||
            (na.operation && !same_shape(*na.operation, *nb->operation))) {
            diff.push_back("node " + id + ": operation differs");
        }
        if ((na.strategy == nullptr) != (nb->strategy == nullptr) ||
            (na.strategy && !same_strategy(*na.strategy, *nb->strategy))) {
            diff.push_back("node " + id + ": strategy differs");
        }
        if (na.args != nb->args) {
            diff.push_back("node " + id + ": args differ");
        }
    }
    for (const auto& [id, nb] : b.nodes()) {
        if (a.find(id) == nullptr) {
            diff.push_back("node " + id + ": only in second");
        }
    }
    for (const auto& l : a.links()) {
        if (std::find(b.links().begin(), b.links().end(), l) == b.links().end()) {
            diff.push_back("link " + to_string(l) + ": only in first");
        }
    }
    for (const auto& l : b.links()) {
        if (std::find(a.links().begin(), a.links().end(), l) == a.links().end()) {
            diff.push_back("link " + to_string(l) + ": only in second");
        }
    }
    return diff;
}

// --- builder -----------------------------------------------------------------

std::string WorkflowBuilder::add(NodeSpec spec) {
    if (!spec.operation) {
        throw Error(ErrorCode::kInvalidOperation, "node spec without operation");
    }
    auto taken = [this](const std::string& id) {
        return std::any_of(nodes_.begin(), nodes_.end(), [&](const auto& n) { return n.id == id; });
    };
    std::string id = spec.alias;
    if (id.empty()) {
        id = spec.operation->name();
        while (taken(id)) {
            id = spec.operation->name() + "#" + std::to_string(++generated_);
        }
    } else if (taken(id)) {
        throw Error(ErrorCode::kDuplicateNode, "duplicate node id '" + id + "'");
    }
    StrategyPtr strategy = spec.strategy ? spec.strategy : spec.operation->default_strategy();
    if (!strategy) {
        throw Error(ErrorCode::kMissingStrategy,
                    "node '" + id + "' has no strategy and operation " + spec.operation->name() + " has no default");
    }
    nodes_.push_back(WorkflowNode{id, std::move(spec.operation), std::move(strategy), std::move(spec.args)});
    return id;
}

const WorkflowNode& WorkflowBuilder::existing(const std::string& id) const {
    auto it = std::find_if(nodes_.begin(), nodes_.end(), [&](const auto& n) { return n.id == id; });
    if (it == nodes_.end()) {
        throw Error(ErrorCode::kUnknownNode, "unknown node '" + id + "'");
    }
    return *it;
}

WorkflowBuilder& WorkflowBuilder::link(std::string src, std::string out_port, std::string dst, std::string in_port) {
    const auto& s = existing(src);
    const auto& d = existing(dst);
    Link l{std::move(src), std::move(out_port), std::move(dst), std::move(in_port)};
    if (s.operation->out_port(l.out_port) == nullptr || d.operation->in_port(l.in_port) == nullptr) {
        throw Error(ErrorCode::kUnknownPort, "link references an unknown port: " + to_string(l));
    }
    links_.push_back(std::move(l));
    return *this;
}

WorkflowBuilder& WorkflowBuilder::chain(const std::vector<std::string>& ids) {
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
        const auto& s = existing(ids[i]);
        const auto& d = existing(ids[i + 1]);
        if (s.operation->out_ports().empty()) {
            throw Error(ErrorCode::kChainWithoutOutput, "cannot chain from '" + s.id + "': it has no out-ports");
        }
        if (d.operation->in_ports().empty()) {
            throw Error(ErrorCode::kUnknownPort, "cannot chain into '" + d.id + "': it has no in-ports");
        }
        links_.push_back(Link{s.id, s.operation->out_ports().front().name, d.id, d.operation->in_ports().front().name});
    }
    return *this;
}

std::vector<std::string> WorkflowBuilder::pipe(std::vector<NodeSpec> specs) {
    std::vector<std::string> ids;
    ids.reserve(specs.size());
    for (auto& s : specs) {
        ids.push_back(add(std::move(s)));
    }
    chain(ids);
    return ids;
}

Workflow WorkflowBuilder::build() const {
    return Workflow(nodes_, links_);
}

// --- validation --------------------------------------------------------------

namespace {

std::optional<std::vector<std::string>> findCycle(const Workflow& w) {
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& l : w.links()) {
        if (w.find(l.src) && w.find(l.dst)) {
            succ[l.src].push_back(l.dst);
        }
    }
    enum class Mark { kWhite, kGrey, kBlack };
    std::map<std::string, Mark> mark;
    std::vector<std::string> stack;
    std::optional<std::vector<std::string>> cycle;

    std::function<void(const std::string&)> visit = [&](const std::string& id) {
        mark[id] = Mark::kGrey;
        stack.push_back(id);
        for (const auto& next : succ[id]) {
            if (cycle) {
                return;
            }
            if (mark[next] == Mark::kGrey) {
                auto from = std::find(stack.begin(), stack.end(), next);
                cycle = std::vector<std::string>(from, stack.end());
                return;
            }
            if (mark[next] == Mark::kWhite) {
                visit(next);
            }
        }
        stack.pop_back();
        mark[id] = Mark::kBlack;
    };
    for (const auto& [id, n] : w.nodes()) {
        if (!cycle && mark[id] == Mark::kWhite) {
            visit(id);
        }
    }
    return cycle;
}

}// namespace

std::string to_string(const Violation& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, CycleDetected>) {
                std::string s = "CycleDetected(";
                for (std::size_t i = 0; i < x.nodes.size(); ++i) {
                    s += (i ? ", " : "") + x.nodes[i];
                }
                return s + ")";
            } else if constexpr (std::is_same_v<T, UnknownPort>) {
                return "UnknownPort(" + to_string(x.link) + ")";
            } else {
                return "MissingCallback(" + x.node + ", " + x.callback + ")";
            }
        },
        v);
}

std::vector<Violation> validate_workflow(const Workflow& workflow) {
    std::vector<Violation> out;
    if (auto cycle = findCycle(workflow)) {
        out.emplace_back(CycleDetected{std::move(*cycle)});
    }
    for (const auto& l : workflow.links()) {
        const auto* s = workflow.find(l.src);
        const auto* d = workflow.find(l.dst);
        bool ok = s && d && s->operation && d->operation && s->operation->out_port(l.out_port) &&
                  d->operation->in_port(l.in_port);
        if (!ok) {
            out.emplace_back(UnknownPort{l});
        }
    }
    for (const auto& [id, n] : workflow.nodes()) {
        if (!n.operation || !n.strategy) {
            continue;
        }
        for (const auto& cb : n.strategy->required_callbacks) {
            if (!n.operation->has_callback(cb)) {
                out.emplace_back(MissingCallback{id, cb});
            }
        }
    }
    return out;
}

namespace {
std::string describe(const std::vector<Violation>& vs) {
    std::ostringstream os;
    os << "workflow is invalid:";
    for (const auto& v : vs) {
        os << ' ' << to_string(v) << ';';
    }
    return os.str();
}
}// namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(ErrorCode::kValidationFailed, describe(violations)), violations_(std::move(violations)) {}

const Workflow& require_valid(const Workflow& workflow) {
    auto violations = validate_workflow(workflow);
    if (!violations.empty()) {
        throw ValidationError(std::move(violations));
    }
    return workflow;
}

}// namespace dstream
