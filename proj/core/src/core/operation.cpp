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
#include <dstream/core/operation.hpp>
#include <dstream/core/record.hpp>

#include <algorithm>

namespace dstream {

void Emissions::add(std::string_view port, Value payload) {
    for (auto& [name, values] : entries_) {
        if (name == port) {
            values.push_back(std::move(payload));
            return;
        }
    }
    entries_.emplace_back(std::string(port), std::vector<Value>{std::move(payload)});
}

std::size_t Emissions::total() const {
    std::size_t n = 0;
    for (const auto& e : entries_) {
        n += e.second.size();
    }
    return n;
}

std::span<const Value> Emissions::on(std::string_view port) const {
    for (const auto& [name, values] : entries_) {
        if (name == port) {
            return values;
        }
    }
    return {};
}

const Value& CallbackScope::arg(std::size_t i) const {
    if (i >= args_.size()) {
        throw Error(ErrorCode::kInvalidOperation, "callback argument " + std::to_string(i) + " not supplied");
    }
    return args_[i];
}

CallbackResult CallbackScope::finish(Value result) && {
    CallbackResult out;
    out.state = written_ ? std::move(*written_) : state_;
    out.result = std::move(result);
    out.emit = std::move(emit_);
    return out;
}

namespace {

std::vector<Port> makePorts(const std::string& op, const std::vector<std::string>& names, PortDirection dir) {
    std::vector<Port> ports;
    ports.reserve(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i].empty()) {
            throw Error(ErrorCode::kInvalidOperation, "operation " + op + ": empty port name");
        }
        if (std::find(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(i), names[i]) !=
            names.begin() + static_cast<std::ptrdiff_t>(i)) {
            throw Error(ErrorCode::kInvalidOperation, "operation " + op + ": duplicate port '" + names[i] + "'");
        }
        ports.push_back(Port{dir, names[i], i});
    }
    return ports;
}

const Port* findPort(const std::vector<Port>& ports, std::string_view name) {
    for (const auto& p : ports) {
        if (p.name == name) {
            return &p;
        }
    }
    return nullptr;
}

}// namespace

OperationDef::OperationDef(OperationSpec spec)
    : name_(std::move(spec.name)), in_ports_(makePorts(name_, spec.in, PortDirection::kIn)),
      out_ports_(makePorts(name_, spec.out, PortDirection::kOut)), initial_state_(std::move(spec.initial_state)),
      default_strategy_(std::move(spec.default_strategy)), callbacks_(std::move(spec.callbacks)),
      work_callbacks_(std::move(spec.work_callbacks)) {
    if (name_.empty()) {
        throw Error(ErrorCode::kInvalidOperation, "operation name must not be empty");
    }
    for (const auto& [cb, fn] : callbacks_) {
        if (!fn) {
            throw Error(ErrorCode::kInvalidOperation, "operation " + name_ + ": callback '" + cb + "' is empty");
        }
    }
    for (const auto& cb : work_callbacks_) {
        if (!has_callback(cb)) {
            throw Error(ErrorCode::kInvalidOperation,
                        "operation " + name_ + ": work callback '" + cb + "' is not defined");
        }
    }
}

const Port* OperationDef::in_port(std::string_view name) const {
    return findPort(in_ports_, name);
}

const Port* OperationDef::out_port(std::string_view name) const {
    return findPort(out_ports_, name);
}

std::set<std::string> OperationDef::callback_names() const {
    std::set<std::string> names;
    for (const auto& [cb, fn] : callbacks_) {
        names.insert(cb);
    }
    return names;
}

const CallbackFn* OperationDef::callback(std::string_view name) const {
    auto it = callbacks_.find(name);
    return it == callbacks_.end() ? nullptr : &it->second;
}

bool same_shape(const OperationDef& a, const OperationDef& b) {
    return a.name() == b.name() && a.in_ports() == b.in_ports() && a.out_ports() == b.out_ports() &&
           a.callback_names() == b.callback_names() && a.initial_state() == b.initial_state();
}

CallbackFailed::CallbackFailed(std::string node, std::string callback, std::string cause)
    : Error(ErrorCode::kCallbackFailed, "callback '" + callback + "' failed" + (node.empty() ? "" : " in " + node) +
                                            ": " + cause),
      node_(std::move(node)), callback_(std::move(callback)), cause_(std::move(cause)) {}

CallbackResult invoke_callback(const OperationDef& op, std::string_view callback, const Value& state,
                               std::span<const Value> args, std::string_view in_port) {
    const CallbackFn* fn = op.callback(callback);
    if (fn == nullptr) {
        throw Error(ErrorCode::kUnknownCallback,
                    "operation " + op.name() + " has no callback '" + std::string(callback) + "'");
    }
    CallbackScope scope(state, args, in_port);
    Value result;
    try {
        result = (*fn)(scope);
    } catch (const std::exception& e) {
        throw CallbackFailed(op.name(), std::string(callback), e.what());
    } catch (...) {
        throw CallbackFailed(op.name(), std::string(callback), "unknown exception");
    }
    return std::move(scope).finish(std::move(result));
}

const SequenceStamp& DataRecord::seq() const {
    if (!seq_) {
        throw Error(ErrorCode::kMetadataMissing, "record was not routed through the runtime");
    }
    return *seq_;
}

const std::string& DataRecord::in_port() const {
    if (!seq_) {
        throw Error(ErrorCode::kMetadataMissing, "record was not routed through the runtime");
    }
    return in_port_;
}

std::string_view record_port(const DataRecord& record) {
    return record.in_port();
}

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kDuplicateNode: return "DuplicateNode";
        case ErrorCode::kUnknownNode: return "UnknownNode";
        case ErrorCode::kUnknownPort: return "UnknownPort";
        case ErrorCode::kChainWithoutOutput: return "ChainWithoutOutput";
        case ErrorCode::kMissingStrategy: return "MissingStrategy";
        case ErrorCode::kInvalidOperation: return "InvalidOperation";
        case ErrorCode::kValidationFailed: return "ValidationFailed";
        case ErrorCode::kUnknownCallback: return "UnknownCallback";
        case ErrorCode::kCallbackFailed: return "CallbackFailed";
        case ErrorCode::kMetadataMissing: return "MetadataMissing";
        case ErrorCode::kDeployHookFailed: return "DeployHookFailed";
        case ErrorCode::kProcessHookFailed: return "ProcessHookFailed";
        case ErrorCode::kInvalidWorkerRef: return "InvalidWorkerRef";
        case ErrorCode::kUnknownRole: return "UnknownRole";
        case ErrorCode::kOutsideHook: return "OutsideHook";
        case ErrorCode::kUnknownOutPort: return "UnknownOutPort";
        case ErrorCode::kNodeHasInPorts: return "NodeHasInPorts";
        case ErrorCode::kTimeout: return "Timeout";
        case ErrorCode::kZeroRecords: return "ZeroRecords";
        case ErrorCode::kZeroElapsed: return "ZeroElapsed";
        case ErrorCode::kInvalidConfig: return "InvalidConfig";
        case ErrorCode::kUnknownStrategy: return "UnknownStrategy";
        case ErrorCode::kMissingCallback: return "MissingCallback";
        case ErrorCode::kInvalidQuery: return "InvalidQuery";
        case ErrorCode::kProtocolViolation: return "ProtocolViolation";
    }
    return "Unknown";
}

}// namespace dstream
